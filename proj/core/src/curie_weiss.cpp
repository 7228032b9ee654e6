#include "steinpair/curie_weiss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steinpair/quadrature.hpp"

namespace steinpair {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

double log_sinhc(double x) {  // ln(sinh x / x), even, stable at 0
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return std::log1p(x2 / 6.0 * (1.0 + x2 / 20.0));
    }
    return ax + std::log1p(-std::exp(-2.0 * ax)) - std::log(2.0 * ax);
}

double normal_even_moment(int j) {  // E Z^j for even j: (j-1)!!
    double acc = 1.0;
    for (int m = j - 1; m >= 1; m -= 2) acc *= m;
    return acc;
}

}  // namespace

BaseMeasure BaseMeasure::two_point() {
    BaseMeasure rho;
    rho.kind_ = Kind::two_point;
    rho.xs_ = {-1.0, 1.0};
    rho.ps_ = {0.5, 0.5};
    return rho;
}

BaseMeasure BaseMeasure::atoms(std::vector<double> xs, std::vector<double> ps) {
    if (xs.size() != ps.size() || xs.size() < 2)
        throw std::invalid_argument("BaseMeasure::atoms: need >= 2 matching atoms");
    double mass = 0.0, mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(ps[i] > 0.0)) throw std::invalid_argument("BaseMeasure::atoms: p_j > 0 required");
        mass += ps[i];
        mean += ps[i] * xs[i];
    }
    for (std::size_t i = 0; i < xs.size(); ++i) var += ps[i] * xs[i] * xs[i];
    if (std::abs(mass - 1.0) > 1e-10 || std::abs(mean) > 1e-10 || std::abs(var - 1.0) > 1e-10)
        throw std::invalid_argument(
            "BaseMeasure::atoms: measure must be standardized (mass 1, mean 0, variance 1)");
    BaseMeasure rho;
    rho.kind_ = Kind::atoms;
    rho.xs_ = std::move(xs);
    rho.ps_ = std::move(ps);
    return rho;
}

BaseMeasure BaseMeasure::uniform() {
    BaseMeasure rho;
    rho.kind_ = Kind::uniform;
    return rho;
}

const char* BaseMeasure::name() const {
    switch (kind_) {
        case Kind::two_point: return "two_point";
        case Kind::atoms: return "atoms";
        case Kind::uniform: return "uniform";
    }
    return "?";
}

double BaseMeasure::moment(int j) const {
    if (kind_ == Kind::uniform) {
        if (j % 2 == 1) return 0.0;
        return std::pow(kSqrt3, j) / (j + 1.0);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) acc += ps_[i] * std::pow(xs_[i], j);
    return acc;
}

double BaseMeasure::log_mgf(double t) const {
    switch (kind_) {
        case Kind::two_point: {
            const double at = std::abs(t);
            return at + std::log1p(std::exp(-2.0 * at)) - std::log(2.0);
        }
        case Kind::atoms: {
            double shift = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < xs_.size(); ++i)
                shift = std::max(shift, t * xs_[i]);
            double acc = 0.0;
            for (std::size_t i = 0; i < xs_.size(); ++i)
                acc += ps_[i] * std::exp(t * xs_[i] - shift);
            return shift + std::log(acc);
        }
        case Kind::uniform:
            return log_sinhc(kSqrt3 * t);
    }
    return 0.0;
}

double BaseMeasure::tilted_sample(double t, RngStream& rng) const {
    switch (kind_) {
        case Kind::two_point:
            return rng.uniform01() < 1.0 / (1.0 + std::exp(-2.0 * t)) ? 1.0 : -1.0;
        case Kind::atoms: {
            double shift = t * xs_[0];
            for (std::size_t i = 1; i < xs_.size(); ++i) shift = std::max(shift, t * xs_[i]);
            double total = 0.0;
            for (std::size_t i = 0; i < xs_.size(); ++i)
                total += ps_[i] * std::exp(t * xs_[i] - shift);
            double u = rng.uniform01() * total;
            for (std::size_t i = 0; i < xs_.size(); ++i) {
                u -= ps_[i] * std::exp(t * xs_[i] - shift);
                if (u <= 0.0) return xs_[i];
            }
            return xs_.back();
        }
        case Kind::uniform: {
            const double u = rng.uniform01();
            const double s = kSqrt3;
            if (std::abs(t) < 1e-10) return s * (2.0 * u - 1.0);
            // inverse CDF of e^{t x} on [-s, s]
            return s + std::log1p(std::expm1(-2.0 * t * s) * (1.0 - u)) / t;
        }
    }
    return 0.0;
}

BaseMeasure::GibbsMoments BaseMeasure::gibbs_moments(double q, double theta,
                                                     double xi) const {
    GibbsMoments gm{0.0, 0.0, 0.0, 0.0};
    if (discrete()) {
        double shift = -std::numeric_limits<double>::infinity();
        for (const double x : xs_) shift = std::max(shift, q * x * x + theta * x);
        double z = 0.0, m1 = 0.0, m2 = 0.0, ds = 0.0, d3 = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            const double x = xs_[i];
            const double w = ps_[i] * std::exp(q * x * x + theta * x - shift);
            z += w;
            m1 += w * x;
            m2 += w * x * x;
            const double diff = xi - x;
            ds += w * diff * std::abs(diff);
            d3 += w * diff * diff * diff;
        }
        gm.m1 = m1 / z;
        gm.m2 = m2 / z;
        gm.d_signed = ds / z;
        gm.d_cubed = d3 / z;
        return gm;
    }
    // continuous uniform: Gauss-Legendre panels, split at xi for the signed term
    const double s = kSqrt3;
    const double shift = q * s * s + std::abs(theta) * s;
    auto weight = [&](double x) { return std::exp(q * x * x + theta * x - shift); };
    const double split = std::clamp(xi, -s, s);
    double z = 0.0, m1 = 0.0, m2 = 0.0, ds = 0.0, d3 = 0.0;
    auto accumulate = [&](double lo, double hi, double sign) {
        if (!(hi > lo)) return;
        const auto& rule = gauss_legendre(24);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = mid + half * rule.nodes[i];
            const double w = rule.weights[i] * half * weight(x) / (2.0 * s);
            z += w;
            m1 += w * x;
            m2 += w * x * x;
            const double diff = xi - x;
            ds += w * sign * diff * diff;
            d3 += w * diff * diff * diff;
        }
    };
    accumulate(-s, split, +1.0);
    accumulate(split, s, -1.0);
    gm.m1 = m1 / z;
    gm.m2 = m2 / z;
    gm.d_signed = ds / z;
    gm.d_cubed = d3 / z;
    return gm;
}

double BaseMeasure::gibbs_sample(double q, double theta, RngStream& rng) const {
    if (discrete()) {
        double shift = -std::numeric_limits<double>::infinity();
        for (const double x : xs_) shift = std::max(shift, q * x * x + theta * x);
        double total = 0.0;
        for (std::size_t i = 0; i < xs_.size(); ++i)
            total += ps_[i] * std::exp(q * xs_[i] * xs_[i] + theta * xs_[i] - shift);
        double u = rng.uniform01() * total;
        for (std::size_t i = 0; i < xs_.size(); ++i) {
            u -= ps_[i] * std::exp(q * xs_[i] * xs_[i] + theta * xs_[i] - shift);
            if (u <= 0.0) return xs_[i];
        }
        return xs_.back();
    }
    // rejection against the pure exponential tilt; q (x^2 - s^2) <= 0
    const double s = kSqrt3;
    for (int iter = 0; iter < 100000; ++iter) {
        const double x = tilted_sample(theta, rng);
        if (rng.uniform01() <= std::exp(q * (x * x - s * s))) return x;
    }
    throw std::runtime_error("BaseMeasure::gibbs_sample: rejection stalled");
}

MgfConditionReport check_mgf_condition(const BaseMeasure& rho, double beta, int k) {
    MgfConditionReport rep;
    rep.probe_limit = 20.0;
    constexpr int kProbe = 400;
    if (beta < 1.0) {
        double b_inf = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= kProbe; ++i) {
            const double t = rep.probe_limit * i / kProbe;
            for (const double tt : {t, -t}) {
                const double lm = rho.log_mgf(tt);
                if (lm > 0.0) b_inf = std::min(b_inf, tt * tt / (2.0 * lm));
            }
        }
        rep.b = b_inf;
        rep.ok = b_inf > beta;
        rep.note = rep.ok ? "sub-gaussian bound witnessed on the probe grid"
                          : "no b > beta on the probe grid";
        return rep;
    }
    // critical case: deficit b1 below b0, strict sub-gaussian slack b2 above
    rep.b0 = 1.0;
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kProbe; ++i) {
        const double t = rep.probe_limit * i / kProbe;
        for (const double tt : {t, -t}) {
            const double lm = rho.log_mgf(tt);
            if (std::abs(tt) <= rep.b0) {
                const double h = 0.5 * tt * tt - lm;
                b1 = std::min(b1, h / std::pow(std::abs(tt), 2 * k));
            } else if (lm > 0.0) {
                b2 = std::min(b2, tt * tt / (2.0 * lm));
            }
        }
    }
    rep.b1 = b1;
    rep.b2 = b2;
    rep.ok = b1 > 0.0 && b2 > 1.0;
    rep.note = rep.ok ? "critical-case bounds witnessed on the probe grid"
                      : "critical-case condition failed on the probe grid";
    return rep;
}

TypeK detect_type_k(const BaseMeasure& rho, double tol) {
    for (int j = 3; j <= 12; ++j) {
        const double nm = (j % 2 == 1) ? 0.0 : normal_even_moment(j);
        const double diff = nm - rho.moment(j);
        if (std::abs(diff) > tol * std::max(1.0, std::abs(nm))) {
            if (j % 2 == 1)
                throw std::domain_error(
                    "detect_type_k: first mismatching moment has odd order; measure is "
                    "not of type k");
            if (!(diff > 0.0))
                throw std::domain_error("detect_type_k: moment deficit not positive");
            return {j / 2, diff};
        }
    }
    throw std::domain_error("detect_type_k: no moment deficit found up to order 12");
}

double curie_weiss_c2(const BaseMeasure& rho, int k) {
    if (k < 1) throw std::invalid_argument("curie_weiss_c2: k >= 1 required");
    auto h_fn = [&rho](double s) { return 0.5 * s * s - rho.log_mgf(s); };
    const int order = 2 * k;
    std::vector<double> binom(static_cast<std::size_t>(order) + 1, 0.0);
    binom[0] = 1.0;
    for (int i = 1; i <= order; ++i)
        for (int j = i; j >= 1; --j) binom[static_cast<std::size_t>(j)] += binom[static_cast<std::size_t>(j - 1)];
    auto stencil = [&](double h) {
        double acc = 0.0;
        for (int j = 0; j <= order; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            acc += sign * binom[static_cast<std::size_t>(j)] * h_fn((k - j) * h);
        }
        return acc / std::pow(h, order);
    };
    // base step 0.1: small enough for the h^2 series, large enough that the
    // cancellation in s^2/2 - ln mgf stays below the target accuracy
    const double h0 = k <= 2 ? 0.1 : 0.2;
    constexpr int kLevels = 4;
    double table[kLevels][kLevels];
    for (int i = 0; i < kLevels; ++i) table[i][0] = stencil(h0 / std::pow(2.0, i));
    for (int j = 1; j < kLevels; ++j) {
        const double p = std::pow(4.0, j);
        for (int i = j; i < kLevels; ++i)
            table[i][j] = (p * table[i][j - 1] - table[i - 1][j - 1]) / (p - 1.0);
    }
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) fact *= i;
    return table[kLevels - 1][kLevels - 1] / fact;
}

namespace {

TargetLaw make_cw_target(double beta, int k, double c2) {
    if (beta < 1.0) return build_target(DriftSpec::linear(1.0 - beta), Interval{}, 0.0);
    return build_target(DriftSpec::monomial(2.0 * k * c2, k), Interval{}, 0.0);
}

}  // namespace

CurieWeissModel::CurieWeissModel(BaseMeasure rho, double beta, int n)
    : rho_(std::move(rho)), beta_(beta), n_(n) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("CurieWeissModel: beta must lie in (0, 1]");
    if (n < 1) throw std::invalid_argument("CurieWeissModel: n >= 1 required");
    critical_ = beta >= 1.0 - 1e-12;
    if (critical_) {
        const TypeK tk = detect_type_k(rho_);
        k_ = tk.k;
        c2_ = curie_weiss_c2(rho_, k_);
        if (!(c2_ > 0.0))
            throw std::domain_error("CurieWeissModel: c2 <= 0, rho is not of type k");
        const double nn = static_cast<double>(n_);
        lambda_ = std::pow(nn, -2.0 + 1.0 / k_);
        scale_ = std::pow(nn, -1.0 + 1.0 / (2.0 * k_));
    } else {
        k_ = 0;
        c2_ = 0.0;
        lambda_ = 1.0 / static_cast<double>(n_);
        scale_ = 1.0 / std::sqrt(static_cast<double>(n_));
    }
    mgf_report_ = check_mgf_condition(rho_, beta_, critical_ ? k_ : 2);
    if (!mgf_report_.ok)
        throw std::domain_error("CurieWeissModel: exponential-moment condition failed: " +
                                mgf_report_.note);
    target_ = std::make_shared<const TargetLaw>(make_cw_target(beta_, k_, c2_));

    // auxiliary scalar marginal ∝ phi(z) mgf(sqrt(beta/n) z)^n; the closure
    // owns a copy of rho because the model may be moved after construction
    const double a = std::sqrt(beta_ / static_cast<double>(n_));
    auto logf = [a, nn = static_cast<double>(n_), rho = rho_](double z) {
        return -0.5 * z * z + nn * rho.log_mgf(a * z);
    };
    double zmax = 1.0;
    const double top = logf(0.0);
    int guard = 0;
    while (std::max(logf(zmax), logf(-zmax)) > top - 46.0 && guard++ < 4000) zmax *= 1.25;
    aux_ = std::make_shared<const TabulatedDensity>(
        TabulatedDensity::build(logf, -zmax, zmax));
}

double CurieWeissModel::tilt_of(double z) const {
    return std::sqrt(beta_ / static_cast<double>(n_)) * z;
}

CurieWeissModel::config_type CurieWeissModel::sample_config(RngStream& rng) const {
    const double t = tilt_of(aux_->sample(rng));
    config_type x(static_cast<std::size_t>(n_));
    if (rho_.kind() == BaseMeasure::Kind::two_point) {
        const double p_up = 1.0 / (1.0 + std::exp(-2.0 * t));
        for (auto& xi : x) xi = rng.uniform01() < p_up ? 1.0 : -1.0;
    } else {
        for (auto& xi : x) xi = rho_.tilted_sample(t, rng);
    }
    return x;
}

double CurieWeissModel::w_of(const config_type& x) const {
    double s = 0.0;
    for (const double xi : x) s += xi;
    return scale_ * s;
}

CondStats CurieWeissModel::cond_stats(const config_type& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("CurieWeissModel: config length mismatch");
    const double nn = static_cast<double>(n_);
    double s = 0.0;
    for (const double xi : x) s += xi;

    double sum_d1 = 0.0;  // sum_i (X_i - m1_i)
    double sum_d2 = 0.0;  // sum_i (X_i^2 - 2 X_i m1_i + m2_i)
    double sum_ds = 0.0;  // sum_i E[(X_i - X')|X_i - X'|]
    double sum_d3 = 0.0;  // sum_i E[(X_i - X')^3]
    if (rho_.kind() == BaseMeasure::Kind::two_point) {
        // conditional of a +/-1 spin: E(X'|rest) = tanh(beta Xbar_i)
        const double m1_up = std::tanh(beta_ * (s - 1.0) / nn);
        const double m1_dn = std::tanh(beta_ * (s + 1.0) / nn);
        const double n_up = 0.5 * (nn + s);
        const double n_dn = nn - n_up;
        const double dev = n_up * (1.0 - m1_up) + n_dn * (-1.0 - m1_dn);
        sum_d1 = dev;
        sum_d2 = n_up * (2.0 - 2.0 * m1_up) + n_dn * (2.0 + 2.0 * m1_dn);
        sum_ds = 2.0 * dev;
        sum_d3 = 4.0 * dev;
    } else {
        const double q = beta_ / (2.0 * nn);
        for (const double xi : x) {
            const double xbar = (s - xi) / nn;
            const auto gm = rho_.gibbs_moments(q, beta_ * xbar, xi);
            sum_d1 += xi - gm.m1;
            sum_d2 += xi * xi - 2.0 * xi * gm.m1 + gm.m2;
            sum_ds += gm.d_signed;
            sum_d3 += gm.d_cubed;
        }
    }
    CondStats cs;
    cs.w = scale_ * s;
    cs.ed = scale_ / nn * sum_d1;
    cs.ed2 = scale_ * scale_ / nn * sum_d2;
    cs.edabs = scale_ * scale_ / nn * sum_ds;
    cs.ed3 = scale_ * scale_ * scale_ / nn * sum_d3;
    return cs;
}

std::pair<double, double> CurieWeissModel::sample_pair(RngStream& rng) const {
    const auto x = sample_config(rng);
    double s = 0.0;
    for (const double xi : x) s += xi;
    const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_)));
    const double xbar = (s - x[i]) / static_cast<double>(n_);
    const double fresh =
        rho_.gibbs_sample(beta_ / (2.0 * static_cast<double>(n_)), beta_ * xbar, rng);
    return {scale_ * s, scale_ * (s - x[i] + fresh)};
}

double CurieWeissModel::auxiliary_normalizer() const {
    return aux_->total_mass() * std::exp(aux_->log_shift()) / std::sqrt(2.0 * M_PI);
}

TargetLaw build_cw_target(const CurieWeissModel& model) {
    return make_cw_target(model.beta(), model.type_k(), model.c2());
}

}  // namespace steinpair
