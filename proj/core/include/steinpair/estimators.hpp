#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinpair/pair_model.hpp"
#include "steinpair/parallel.hpp"
#include "steinpair/stats.hpp"

namespace steinpair {

// purpose tags fed into derive_stream's worker slot so the phases of one run
// never share a stream
inline constexpr std::uint64_t kStreamBound = 0x10;
inline constexpr std::uint64_t kStreamPairs = 0x20;
inline constexpr std::uint64_t kStreamKernel = 0x30;
inline constexpr std::uint64_t kStreamRates = 0x1000;      // + n index
inline constexpr std::uint64_t kStreamBootstrap = 0x2000;  // + n index

struct ValueSe {
    double value = 0.0;
    double se = 0.0;
};

/// The three estimated terms of the Berry-Esseen right-hand side and their
/// assembled sum. t3 already carries the residual scale (1/c1 for non-normal
/// targets). rhs.se is a joint bootstrap over the shared configurations.
struct BoundTerms {
    ValueSe t1, t2, t3;
    ValueSe rhs;
    std::uint64_t replications = 0;
    std::uint64_t seed = 0;
};

/// Bootstrap (B resamples) standard error of the mean of vals.
double bootstrap_se_of_mean(std::span<const double> vals, int B, RngStream rng);

template <PairModel M>
BoundTerms estimate_bound_terms(const M& model, std::uint64_t reps, std::uint64_t seed,
                                int workers = 0) {
    if (reps < 2) throw std::invalid_argument("estimate_bound_terms: need M >= 2");
    const double lambda = model.lambda();
    const TargetLaw& target = model.target();
    const double scale = target.residual_scale();
    std::vector<double> t1(reps), t2(reps), resid(reps), combined(reps);
    parallel_for(reps, workers, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            RngStream rng = derive_stream(seed, kStreamBound, i);
            const auto cfg = model.sample_config(rng);
            const CondStats cs = model.cond_stats(cfg);
            cs.validate();
            t1[i] = std::abs(1.0 - cs.ed2 / (2.0 * lambda));
            t2[i] = std::abs(cs.edabs) / lambda;
            resid[i] = std::abs((cs.ed - lambda * target.drift(cs.w)) / lambda);
            combined[i] = t1[i] + t2[i] + scale * resid[i];
        }
    });
    BoundTerms out;
    out.replications = reps;
    out.seed = seed;
    const MeanSe m1 = mean_se(t1), m2 = mean_se(t2), mr = mean_se(resid);
    out.t1 = {m1.mean, m1.se};
    out.t2 = {m2.mean, m2.se};
    out.t3 = {scale * mr.mean, scale * mr.se};
    out.rhs.value = out.t1.value + out.t2.value + out.t3.value;
    out.rhs.se = bootstrap_se_of_mean(combined, 200, derive_stream(seed, kStreamBootstrap, 0));
    return out;
}

/// Corollary bound term 2 sqrt(E|E(Delta^3|X)| / lambda) with a delta-method
/// standard error; replaces t2 when invoked.
template <PairModel M>
ValueSe corollary2_term(const M& model, std::uint64_t reps, std::uint64_t seed,
                        int workers = 0) {
    if (reps < 2) throw std::invalid_argument("corollary2_term: need M >= 2");
    const double lambda = model.lambda();
    std::vector<double> e3(reps);
    parallel_for(reps, workers, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            RngStream rng = derive_stream(seed, kStreamBound, i);
            const auto cfg = model.sample_config(rng);
            e3[i] = std::abs(model.cond_stats(cfg).ed3);
        }
    });
    const MeanSe m = mean_se(e3);
    if (!(m.mean > 0.0)) return {0.0, 0.0};
    return {2.0 * std::sqrt(m.mean / lambda), m.se / std::sqrt(lambda * m.mean)};
}

struct Corollary1Terms {
    BoundTerms terms;     // t2 slot carries {3*delta_max, 0}
    double delta_max = 0.0;
    double mean_abs_w = 0.0;
    bool mean_abs_w_ok = false;  // E|W| <= 2 premise, checked empirically
};

/// Bounded-difference corollary: rhs = t1 + t3 + 3 delta_max. Requires an
/// a.s. bound on |Delta|; throws std::logic_error when the model has none.
template <PairModel M>
Corollary1Terms corollary1_terms(const M& model, std::uint64_t reps, std::uint64_t seed,
                                 int workers = 0) {
    if constexpr (!HasDeltaBound<M>) {
        throw std::logic_error("corollary1_terms: model provides no delta_max bound");
    } else {
        if (reps < 2) throw std::invalid_argument("corollary1_terms: need M >= 2");
        const double lambda = model.lambda();
        const TargetLaw& target = model.target();
        const double scale = target.residual_scale();
        std::vector<double> t1(reps), resid(reps), absw(reps), combined(reps);
        parallel_for(reps, workers, [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                RngStream rng = derive_stream(seed, kStreamBound, i);
                const auto cfg = model.sample_config(rng);
                const CondStats cs = model.cond_stats(cfg);
                t1[i] = std::abs(1.0 - cs.ed2 / (2.0 * lambda));
                resid[i] = std::abs((cs.ed - lambda * target.drift(cs.w)) / lambda);
                absw[i] = std::abs(cs.w);
                combined[i] = t1[i] + scale * resid[i];
            }
        });
        Corollary1Terms out;
        out.delta_max = model.delta_max();
        const MeanSe m1 = mean_se(t1), mr = mean_se(resid), mw = mean_se(absw);
        out.terms.replications = reps;
        out.terms.seed = seed;
        out.terms.t1 = {m1.mean, m1.se};
        out.terms.t2 = {3.0 * out.delta_max, 0.0};
        out.terms.t3 = {scale * mr.mean, scale * mr.se};
        out.terms.rhs.value = out.terms.t1.value + out.terms.t2.value + out.terms.t3.value;
        out.terms.rhs.se =
            bootstrap_se_of_mean(combined, 200, derive_stream(seed, kStreamBootstrap, 0));
        out.mean_abs_w = mw.mean;
        out.mean_abs_w_ok = mw.mean <= 2.0;
        return out;
    }
}

struct DiagnosticRow {
    std::string name;
    double value = 0.0;
    double se = 0.0;
    bool pass = true;
    bool gated = true;  // ungated rows are informational only
};

struct DiagnosticReport {
    std::vector<DiagnosticRow> rows;
    bool pass = true;
    std::string summary() const;
};

namespace detail {
DiagnosticReport assemble_diagnostics(std::span<const double> u, std::span<const double> v,
                                      std::span<const double> kernel_w,
                                      std::span<const double> kernel_ed,
                                      std::span<const double> kernel_ed2, double lambda);
}

/// Statistical exchangeability check over pair draws plus the regression-
/// condition check (pair-sampler Delta^2 against the kernel's E(Delta^2|X)).
template <PairModel M>
DiagnosticReport exchangeability_check(const M& model, std::uint64_t reps,
                                       std::uint64_t seed, int workers = 0) {
    if constexpr (!HasPairSampler<M>) {
        throw std::logic_error("exchangeability_check: model provides no pair sampler");
    } else {
        if (reps < 16) throw std::invalid_argument("exchangeability_check: M too small");
        std::vector<double> u(reps), v(reps), w(reps), ed(reps), ed2(reps);
        parallel_for(reps, workers, [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                RngStream rng = derive_stream(seed, kStreamPairs, i);
                const auto [wi, wj] = model.sample_pair(rng);
                u[i] = wi;
                v[i] = wj;
                RngStream rng2 = derive_stream(seed, kStreamKernel, i);
                const CondStats cs = model.cond_stats(model.sample_config(rng2));
                w[i] = cs.w;
                ed[i] = cs.ed;
                ed2[i] = cs.ed2;
            }
        });
        return detail::assemble_diagnostics(u, v, w, ed, ed2, model.lambda());
    }
}

}  // namespace steinpair
