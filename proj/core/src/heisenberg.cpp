#include "steinpair/heisenberg.hpp"

#include <cmath>
#include <stdexcept>

#include "steinpair/quadrature.hpp"

namespace steinpair {

double Vec3::norm() const { return std::sqrt(norm2()); }

namespace {

double log_sinhc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return std::log1p(x2 / 6.0 * (1.0 + x2 / 20.0));
    }
    return ax + std::log1p(-std::exp(-2.0 * ax)) - std::log(2.0 * ax);
}

}  // namespace

double heis_psi(double x) {
    const double ax = std::abs(x);
    if (ax < 0.1) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 +
                    x2 * (-1.0 / 45.0 +
                          x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * (2.0 / 93555.0)))));
    }
    return 1.0 / std::tanh(x) - 1.0 / x;
}

double heis_psi_prime(double x) {
    const double ax = std::abs(x);
    if (ax < 0.1) {
        const double x2 = x * x;
        return 1.0 / 3.0 +
               x2 * (-1.0 / 15.0 +
                     x2 * (2.0 / 189.0 + x2 * (-7.0 / 4725.0 + x2 * (2.0 / 10395.0))));
    }
    const double sh = std::sinh(x);
    return 1.0 / (x * x) - 1.0 / (sh * sh);
}

double solve_kappa(double beta) {
    if (!(beta > 3.0))
        throw std::invalid_argument("solve_kappa: no positive root for beta <= 3");
    auto f = [beta](double x) { return beta * heis_psi(x) - x; };
    double lo = 1e-8, hi = beta;  // f(lo) > 0 (psi'(0) = 1/3), f(beta) < 0 (psi < 1)
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        const double fx = f(x);
        const double dfx = beta * heis_psi_prime(x) - 1.0;
        if (dfx == 0.0) break;
        const double nx = x - fx / dfx;
        if (nx > 0.0 && std::abs(nx - x) < 1e-17 * x) { x = nx; break; }
        if (nx > 0.0) x = nx;
    }
    return x;
}

double compute_b2(double beta, double kappa) {
    // 1/kappa^2 - 1/sinh^2(kappa) equals psi'(kappa)
    const double lambda_factor = 1.0 - beta * heis_psi_prime(kappa);
    if (!(lambda_factor > 0.0))
        throw std::domain_error("compute_b2: 1 - beta psi'(kappa) must be positive");
    return 4.0 * beta * beta * heis_psi_prime(kappa) / (lambda_factor * kappa * kappa);
}

VmfCosMoments vmf_cos_moments(double b) {
    if (std::abs(b) < 0.05) {
        const double b2 = b * b;
        const double psi_over_b = 1.0 / 3.0 - b2 / 45.0 + 2.0 * b2 * b2 / 945.0;
        return {b * psi_over_b, 1.0 - 2.0 * (1.0 / 3.0 - b2 / 45.0 + 2.0 * b2 * b2 / 945.0),
                b * (1.0 / 5.0 + b2 * (-1.0 / 105.0 + b2 * (4.0 / 4725.0)))};
    }
    const double psi = heis_psi(b);
    const double coth = 1.0 / std::tanh(b);
    return {psi, 1.0 - 2.0 * psi / b, coth * (1.0 + 6.0 / (b * b)) - 3.0 / b - 6.0 / (b * b * b)};
}

double vmf_cos_sign_moment(double c, double b) {
    if (std::abs(b) < 0.05) {
        // quadrature branch: the closed form loses digits to 1/b^3 cancellation
        const double inv_norm = 1.0 / (2.0 * std::exp(log_sinhc(b)));
        auto piece = [&](double lo, double hi, double sign) {
            if (!(hi > lo)) return 0.0;
            return sign * integrate_gl_fn(
                              [&](double t) {
                                  const double d = c - t;
                                  return d * d * std::exp(b * t) * inv_norm;
                              },
                              lo, hi, 16);
        };
        return piece(-1.0, c, +1.0) + piece(c, 1.0, -1.0);
    }
    // scaled antiderivative of (c-t)^2 e^{b t}: values e^{b(t-1)} stay <= 1
    auto anti = [&](double t) {
        const double d = c - t;
        return std::exp(b * (t - 1.0)) * (d * d / b + 2.0 * d / (b * b) + 2.0 / (b * b * b));
    };
    const double norm = b / (1.0 - std::exp(-2.0 * b));  // b e^{-b} / (2 sinh b) scaling folded in
    return norm * (2.0 * anti(c) - anti(-1.0) - anti(1.0));
}

double vmf_sample_cos(double c, RngStream& rng) {
    const double u = rng.uniform01();
    if (c < 1e-12) return 2.0 * u - 1.0;
    const double t = 1.0 + std::log1p(std::expm1(-2.0 * c) * (1.0 - u)) / c;
    return std::clamp(t, -1.0, 1.0);
}

Vec3 uniform_sphere(RngStream& rng) {
    const double z = 2.0 * rng.uniform01() - 1.0;
    const double phi = 2.0 * M_PI * rng.uniform01();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

Vec3 vmf_sample(const Vec3& mean_direction, double concentration, RngStream& rng) {
    if (concentration < 1e-12) return uniform_sphere(rng);
    const double ct = vmf_sample_cos(concentration, rng);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = 2.0 * M_PI * rng.uniform01();
    // orthonormal frame around the mean direction
    const Vec3& mu = mean_direction;
    Vec3 e1 = std::abs(mu.x) < 0.6 ? Vec3{1.0, 0.0, 0.0}
             : std::abs(mu.y) < 0.6 ? Vec3{0.0, 1.0, 0.0}
                                    : Vec3{0.0, 0.0, 1.0};
    e1 = e1 - mu * mu.dot(e1);
    e1 = e1 * (1.0 / e1.norm());
    const Vec3 e2{mu.y * e1.z - mu.z * e1.y, mu.z * e1.x - mu.x * e1.z,
                  mu.x * e1.y - mu.y * e1.x};
    return mu * ct + (e1 * std::cos(phi) + e2 * std::sin(phi)) * st;
}

double heis_ed_display(double beta, double kappa, int n, double w, double s_norm) {
    const double nn = static_cast<double>(n);
    const double sq = std::sqrt(nn);
    const double m = beta * s_norm / nn;
    return 2.0 / nn * w + 2.0 / sq - 2.0 * beta / (sq * kappa * kappa) * m * heis_psi(m);
}

HeisenbergModel::HeisenbergModel(double beta, int n) : beta_(beta), n_(n) {
    if (!(beta > 3.0)) throw std::invalid_argument("HeisenbergModel: beta > 3 required");
    if (n < 2) throw std::invalid_argument("HeisenbergModel: n >= 2 required");
    kappa_ = solve_kappa(beta);
    b2_ = compute_b2(beta, kappa_);
    b_ = std::sqrt(b2_);
    lambda_ = (1.0 - beta * heis_psi_prime(kappa_)) / static_cast<double>(n);

    // radial auxiliary marginal ∝ r^2 e^{-r^2/2} (sinh(ar)/(ar))^n
    const double a = std::sqrt(beta_ / static_cast<double>(n_));
    auto logf = [a, nn = static_cast<double>(n_)](double r) {
        return r <= 0.0 ? -std::numeric_limits<double>::infinity()
                        : 2.0 * std::log(r) - 0.5 * r * r + nn * log_sinhc(a * r);
    };
    const double rstar = std::max(kappa_ / a, 1.0);
    const double top = logf(rstar);
    double rmax = rstar;
    int guard = 0;
    while (logf(rmax) > top - 46.0 && guard++ < 400) rmax *= 1.2;
    radial_ = std::make_shared<const TabulatedDensity>(
        TabulatedDensity::build(logf, 0.0, rmax));
}

HeisenbergModel::config_type HeisenbergModel::sample_config(RngStream& rng) const {
    const double r = radial_->sample(rng);
    const Vec3 direction = uniform_sphere(rng);
    const double conc = std::sqrt(beta_ / static_cast<double>(n_)) * r;
    config_type sigma(static_cast<std::size_t>(n_));
    for (auto& s : sigma) s = vmf_sample(direction, conc, rng);
    return sigma;
}

double HeisenbergModel::w_raw(double s_norm2) const {
    const double nn = static_cast<double>(n_);
    return std::sqrt(nn) * (beta_ * beta_ * s_norm2 / (nn * nn * kappa_ * kappa_) - 1.0);
}

double HeisenbergModel::w_of(const config_type& sigma) const {
    Vec3 s{};
    for (const auto& v : sigma) s = s + v;
    return w_raw(s.norm2()) / b_;
}

CondStats HeisenbergModel::cond_stats(const config_type& sigma) const {
    if (static_cast<int>(sigma.size()) != n_)
        throw std::invalid_argument("HeisenbergModel: config length mismatch");
    const double nn = static_cast<double>(n_);
    Vec3 s{};
    for (const auto& v : sigma) s = s + v;

    // Delta given resample at i: q (<sigma_i, v_i> - <sigma_i', v_i>) with
    // v_i = S - sigma_i; the resampled spin is vMF(v_i/|v_i|, beta |v_i|/n)
    const double q = 2.0 * std::sqrt(nn) * beta_ * beta_ / (nn * nn * kappa_ * kappa_);
    double sum1 = 0.0, sum2 = 0.0, sum_abs = 0.0, sum3 = 0.0;
    for (const auto& si : sigma) {
        const Vec3 v = s - si;
        const double s2 = v.norm2();
        if (s2 < 1e-28) continue;  // antipodal degenerate: Delta == 0 at this site
        const double s1 = std::sqrt(s2);
        const double bi = beta_ * s1 / nn;
        const double ci = si.dot(v) / s1;  // cos alpha_i
        const auto m = vmf_cos_moments(bi);
        sum1 += s1 * (ci - m.m1);
        sum2 += s2 * (ci * ci - 2.0 * ci * m.m1 + m.m2);
        sum_abs += s2 * vmf_cos_sign_moment(ci, bi);
        const double c3 = ci * ci * ci - 3.0 * ci * ci * m.m1 + 3.0 * ci * m.m2 - m.m3;
        sum3 += s2 * s1 * c3;
    }
    CondStats cs;
    cs.w = w_raw(s.norm2()) / b_;
    cs.ed = q / nn * sum1 / b_;
    cs.ed2 = q * q / nn * sum2 / b2_;
    cs.edabs = q * q / nn * sum_abs / b2_;
    cs.ed3 = q * q * q / nn * sum3 / (b2_ * b_);
    return cs;
}

double HeisenbergModel::auxiliary_normalizer() const {
    // chi(3) density of |G| is sqrt(2/pi) r^2 e^{-r^2/2}
    return std::sqrt(2.0 / M_PI) * radial_->total_mass() * std::exp(radial_->log_shift());
}

std::pair<double, double> HeisenbergModel::sample_pair(RngStream& rng) const {
    const auto sigma = sample_config(rng);
    Vec3 s{};
    for (const auto& v : sigma) s = s + v;
    const double w = w_raw(s.norm2()) / b_;
    const auto i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_)));
    const Vec3 v = s - sigma[i];
    const double s1 = v.norm();
    if (s1 < 1e-14) return {w, w};
    const double nn = static_cast<double>(n_);
    const Vec3 fresh = vmf_sample(v * (1.0 / s1), beta_ * s1 / nn, rng);
    const double q = 2.0 * std::sqrt(nn) * beta_ * beta_ / (nn * nn * kappa_ * kappa_);
    const double delta_raw = q * (sigma[i].dot(v) - fresh.dot(v));
    return {w, w - delta_raw / b_};
}

}  // namespace steinpair
