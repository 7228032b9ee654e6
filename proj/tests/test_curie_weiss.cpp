#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "steinpair/curie_weiss.hpp"
#include "steinpair/estimators.hpp"

using namespace steinpair;

namespace {

// exact law of S_n for +/-1 spins at size n (enumeration over spin counts)
std::map<int, double> exact_sn_law(int n, double beta) {
    std::map<int, double> law;
    double total = 0.0;
    double binom = 1.0;  // C(n, k)
    for (int k = 0; k <= n; ++k) {
        const int s = 2 * k - n;
        const double w = binom * std::exp(beta * s * s / (2.0 * n));
        law[s] = w;
        total += w;
        binom = binom * (n - k) / (k + 1.0);
    }
    for (auto& [s, p] : law) p /= total;
    return law;
}

// independent per-configuration conditional mean of Delta (no tanh shortcut)
double enum_ed(const std::vector<double>& x, double beta, double scale) {
    const int n = static_cast<int>(x.size());
    double s = 0.0;
    for (const double xi : x) s += xi;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xbar = (s - x[static_cast<std::size_t>(i)]) / n;
        double z = 0.0, m1 = 0.0;
        for (const double cand : {-1.0, 1.0}) {
            const double w = 0.5 * std::exp(beta * cand * cand / (2.0 * n) + beta * xbar * cand);
            z += w;
            m1 += w * cand;
        }
        acc += x[static_cast<std::size_t>(i)] - m1 / z;
    }
    return scale * acc / n;
}

}  // namespace

TEST_CASE("base measures: standardization and moments") {
    const BaseMeasure two = BaseMeasure::two_point();
    CHECK(two.moment(1) == doctest::Approx(0.0));
    CHECK(two.moment(2) == doctest::Approx(1.0));
    CHECK(two.moment(4) == doctest::Approx(1.0));

    const BaseMeasure uni = BaseMeasure::uniform();
    CHECK(uni.moment(2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(uni.moment(4) == doctest::Approx(9.0 / 5.0).epsilon(1e-14));

    CHECK_NOTHROW(BaseMeasure::atoms({-std::sqrt(2.0), 0.0, std::sqrt(2.0)},
                                     {0.25, 0.5, 0.25}));
    CHECK_THROWS_AS(BaseMeasure::atoms({-1.0, 2.0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(BaseMeasure::atoms({-1.0, 1.0}, {0.4, 0.4}), std::invalid_argument);
}

TEST_CASE("exponential-moment probes") {
    const MgfConditionReport sub = check_mgf_condition(BaseMeasure::two_point(), 0.5);
    CHECK(sub.ok);
    CHECK(sub.b >= 0.99);  // ln cosh t <= t^2/2 with equality rate at t -> 0

    const MgfConditionReport crit = check_mgf_condition(BaseMeasure::two_point(), 1.0, 2);
    CHECK(crit.ok);
    CHECK(crit.b1 > 0.0);
    CHECK(crit.b2 > 1.0);

    CHECK(check_mgf_condition(BaseMeasure::uniform(), 1.0, 2).ok);
}

TEST_CASE("type-k detection") {
    const TypeK two = detect_type_k(BaseMeasure::two_point());
    CHECK(two.k == 2);
    CHECK(two.lambda_rho == doctest::Approx(2.0));  // E Z^4 - E xi^4 = 3 - 1

    const TypeK uni = detect_type_k(BaseMeasure::uniform());
    CHECK(uni.k == 2);
    CHECK(uni.lambda_rho == doctest::Approx(3.0 - 9.0 / 5.0).epsilon(1e-12));

    const TypeK tri = detect_type_k(
        BaseMeasure::atoms({-std::sqrt(2.0), 0.0, std::sqrt(2.0)}, {0.25, 0.5, 0.25}));
    CHECK(tri.k == 2);
    CHECK(tri.lambda_rho == doctest::Approx(1.0));
}

TEST_CASE("c2 by Richardson differentiation matches closed forms") {
    // two-point: H(s) = s^2/2 - ln cosh s, H''''(0) = 2, c2 = 1/12
    CHECK(curie_weiss_c2(BaseMeasure::two_point(), 2) ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-8));
    // moment identity for k = 2: c2 = (3 - mu4)/24
    CHECK(curie_weiss_c2(BaseMeasure::uniform(), 2) ==
          doctest::Approx((3.0 - 9.0 / 5.0) / 24.0).epsilon(1e-7));
    CHECK(curie_weiss_c2(BaseMeasure::atoms({-std::sqrt(2.0), 0.0, std::sqrt(2.0)},
                                            {0.25, 0.5, 0.25}),
                         2) == doctest::Approx(1.0 / 24.0).epsilon(1e-7));
}

TEST_CASE("model construction guards") {
    CHECK_THROWS_AS(CurieWeissModel(BaseMeasure::two_point(), 1.5, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(CurieWeissModel(BaseMeasure::two_point(), 0.0, 8),
                    std::invalid_argument);
}

TEST_CASE("n = 1: the beta factor cancels and the spin is uniform") {
    const CurieWeissModel model(BaseMeasure::two_point(), 0.5, 1);
    RngStream rng = derive_stream(71, 0, 0);
    double freq = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) freq += model.sample_config(rng)[0] > 0.0;
    freq /= reps;
    CHECK(std::abs(freq - 0.5) <= 4.0 * 0.5 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("exact sampler matches full enumeration at n = 8 (chi-square)") {
    const int n = 8;
    const double beta = 0.5;
    const CurieWeissModel model(BaseMeasure::two_point(), beta, n);
    const auto law = exact_sn_law(n, beta);
    std::map<int, int> counts;
    const int reps = 1000000;
    RngStream rng = derive_stream(72, 0, 0);
    for (int i = 0; i < reps; ++i) {
        const auto x = model.sample_config(rng);
        int s = 0;
        for (const double xi : x) s += xi > 0.0 ? 1 : -1;
        counts[s]++;
    }
    double chi2 = 0.0;
    for (const auto& [s, p] : law) {
        const double expected = reps * p;
        const double diff = counts[s] - expected;
        chi2 += diff * diff / expected;
    }
    const double pval = oracles::chi_square_p_value(chi2, static_cast<int>(law.size()) - 1);
    CHECK(pval > 0.001);

    // total-variation sanity: TV <= 4 sqrt(states / M)
    double tv = 0.0;
    for (const auto& [s, p] : law)
        tv += 0.5 * std::abs(static_cast<double>(counts[s]) / reps - p);
    CHECK(tv <= 4.0 * std::sqrt(law.size() / static_cast<double>(reps)));
}

TEST_CASE("kernel conditional mean matches enumeration to 1e-12") {
    RngStream rng = derive_stream(73, 0, 0);
    for (const double beta : {0.5, 1.0}) {
        const CurieWeissModel model(BaseMeasure::two_point(), beta, 8);
        double worst = 0.0;
        for (int rep = 0; rep < 40; ++rep) {
            const auto x = model.sample_config(rng);
            const CondStats cs = model.cond_stats(x);
            worst = std::max(worst, std::abs(cs.ed - enum_ed(x, beta, model.scale())));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("tanh conditional identity for +/-1 spins holds exactly") {
    const int n = 12;
    const double beta = 0.8;
    const BaseMeasure rho = BaseMeasure::two_point();
    RngStream rng = derive_stream(74, 0, 0);
    for (int rep = 0; rep < 50; ++rep) {
        double s = 0.0;
        std::vector<double> x(n);
        for (auto& xi : x) {
            xi = rng.below(2) == 0 ? -1.0 : 1.0;
            s += xi;
        }
        const int i = static_cast<int>(rng.below(n));
        const double xbar = (s - x[static_cast<std::size_t>(i)]) / n;
        const auto gm = rho.gibbs_moments(beta / (2.0 * n), beta * xbar,
                                          x[static_cast<std::size_t>(i)]);
        CHECK(gm.m1 == doctest::Approx(std::tanh(beta * xbar)).epsilon(1e-14));
        CHECK(gm.m2 == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("zero local field gives zero conditional mean for symmetric rho") {
    for (const BaseMeasure& rho : {BaseMeasure::two_point(), BaseMeasure::uniform()}) {
        const auto gm = rho.gibbs_moments(0.01, 0.0, 0.5);
        CHECK(std::abs(gm.m1) <= 1e-14);
    }
}

TEST_CASE("auxiliary-field normalizer matches enumeration at small n") {
    for (const int n : {2, 4, 6}) {
        for (const double beta : {0.5, 1.0}) {
            const CurieWeissModel model(BaseMeasure::two_point(), beta, n);
            // E exp(beta S^2/2n) by enumeration over spin counts
            double exact = 0.0;
            double binom = 1.0;
            for (int k = 0; k <= n; ++k) {
                const int s = 2 * k - n;
                exact += binom * std::pow(0.5, n) * std::exp(beta * s * s / (2.0 * n));
                binom = binom * (n - k) / (k + 1.0);
            }
            CHECK(model.auxiliary_normalizer() == doctest::Approx(exact).epsilon(1e-6));
        }
    }
}

TEST_CASE("sub-critical target is N(0, 1/(1-beta))") {
    const CurieWeissModel model(BaseMeasure::two_point(), 0.5, 16);
    const TargetLaw target = build_cw_target(model);
    CHECK(target.drift(1.0) == doctest::Approx(0.5));
    // N(0,2): F(1) = Phi(1/sqrt(2))
    CHECK(target.cdf(1.0) ==
          doctest::Approx(0.5 * std::erfc(-1.0 / std::sqrt(2.0) / std::sqrt(2.0)))
              .epsilon(1e-9));
    CHECK(target.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(model.lambda() == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("critical target is c1 e^{-c2 y^{2k}} with k = 2, c2 = 1/12") {
    const CurieWeissModel model(BaseMeasure::two_point(), 1.0, 16);
    CHECK(model.type_k() == 2);
    CHECK(model.c2() == doctest::Approx(1.0 / 12.0).epsilon(1e-8));
    CHECK(model.lambda() == doctest::Approx(std::pow(16.0, -1.5)).epsilon(1e-12));
    const TargetLaw target = build_cw_target(model);
    // drift 2k c2 w^{2k-1} = w^3/3
    CHECK(target.drift(2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-7));
    CHECK(target.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("critical scaling: Var(n^{-3/4} S_n) approaches the target variance") {
    // quadrature moment of the constructed target law (independent Simpson)
    const CurieWeissModel probe(BaseMeasure::two_point(), 1.0, 16);
    const TargetLaw target = build_cw_target(probe);
    const double var_target = oracles::integrate(
        [&target](double y) { return y * y * target.pdf(y); }, target.lower(),
        target.upper(), 1e-12);
    // the law is built from the Richardson c2 (~1e-8 relative), which moves
    // the variance by the same order
    CHECK(var_target == doctest::Approx(1.1708286566075289).epsilon(1e-7));

    double prev_gap = 1e9;
    for (const int n : {64, 256, 1024}) {
        const CurieWeissModel model(BaseMeasure::two_point(), 1.0, n);
        std::vector<double> w(20000);
        for (std::size_t i = 0; i < w.size(); ++i) {
            RngStream rng = derive_stream(75, kStreamRates + n, i);
            w[i] = model.w_of(model.sample_config(rng));
        }
        const MeanSe ms = mean_se(w);
        double var = 0.0;
        for (const double x : w) var += (x - ms.mean) * (x - ms.mean);
        var /= static_cast<double>(w.size() - 1);
        const double gap = std::abs(var - var_target);
        CHECK(gap <= prev_gap + 0.05);
        prev_gap = gap;
    }
    CHECK(prev_gap <= 0.08);
}

TEST_CASE("continuous-measure kernel agrees with a quadrature oracle") {
    const int n = 10;
    const double beta = 1.0;
    const BaseMeasure rho = BaseMeasure::uniform();
    const CurieWeissModel model(rho, beta, n);
    RngStream rng = derive_stream(76, 0, 0);
    const auto x = model.sample_config(rng);
    double s = 0.0;
    for (const double xi : x) s += xi;
    const double sqrt3 = std::sqrt(3.0);
    const double q = beta / (2.0 * n);
    for (const std::size_t i : {std::size_t{0}, std::size_t{5}}) {
        const double xbar = (s - x[i]) / n;
        const auto gm = rho.gibbs_moments(q, beta * xbar, x[i]);
        auto weight = [&](double t) { return std::exp(q * t * t + beta * xbar * t); };
        const double z = oracles::integrate(weight, -sqrt3, sqrt3, 1e-13);
        const double m1 =
            oracles::integrate([&](double t) { return t * weight(t); }, -sqrt3, sqrt3, 1e-13) / z;
        const double xi_val = x[i];
        const double ds =
            oracles::integrate(
                [&](double t) { return (xi_val - t) * std::abs(xi_val - t) * weight(t); },
                -sqrt3, sqrt3, 1e-13) /
            z;
        CHECK(gm.m1 == doctest::Approx(m1).epsilon(1e-8));
        CHECK(gm.d_signed == doctest::Approx(ds).epsilon(1e-8));
    }
}

TEST_CASE("critical model on a user atoms measure works end to end") {
    const BaseMeasure tri =
        BaseMeasure::atoms({-std::sqrt(2.0), 0.0, std::sqrt(2.0)}, {0.25, 0.5, 0.25});
    const CurieWeissModel model(tri, 1.0, 16);
    CHECK(model.type_k() == 2);
    CHECK(model.c2() == doctest::Approx(1.0 / 24.0).epsilon(1e-7));
    std::vector<double> ed(10000);
    for (std::size_t i = 0; i < ed.size(); ++i) {
        RngStream rng = derive_stream(79, kStreamKernel, i);
        const auto x = model.sample_config(rng);
        for (const double xi : x)
            REQUIRE((xi == 0.0 || std::abs(std::abs(xi) - std::sqrt(2.0)) < 1e-12));
        const CondStats cs = model.cond_stats(x);
        cs.validate();
        ed[i] = cs.ed;
    }
    const MeanSe ms = mean_se(ed);
    CHECK(std::abs(ms.mean) <= 4.0 * ms.se);
}

TEST_CASE("variance identity tightens with n: |mean(ed2)/(2 lambda) - 1| decreases") {
    double prev = 1e9;
    for (const int n : {8, 32, 128}) {
        const CurieWeissModel model(BaseMeasure::two_point(), 0.5, n);
        std::vector<double> r(20000);
        for (std::size_t i = 0; i < r.size(); ++i) {
            RngStream rng = derive_stream(78, kStreamKernel + n, i);
            r[i] = model.cond_stats(model.sample_config(rng)).ed2 / (2.0 * model.lambda());
        }
        const double dev = std::abs(mean_se(r).mean - 1.0);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev <= 0.02);
}

TEST_CASE("pair sampler: mean of W - W' vanishes statistically") {
    const CurieWeissModel model(BaseMeasure::two_point(), 1.0, 16);
    std::vector<double> diff(20000);
    for (std::size_t i = 0; i < diff.size(); ++i) {
        RngStream rng = derive_stream(77, kStreamPairs, i);
        const auto [u, v] = model.sample_pair(rng);
        diff[i] = u - v;
    }
    const MeanSe ms = mean_se(diff);
    CHECK(std::abs(ms.mean) <= 4.0 * ms.se);
}
