#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "steinpair/estimators.hpp"
#include "steinpair/heisenberg.hpp"

using namespace steinpair;

namespace {
// frozen 30-digit evaluations for beta = 4
constexpr double kKappa4 = 2.3993572805154677;
constexpr double kB2At4 = 3.5483378204819175;

double vmf_density(double t, double b) {
    if (std::abs(b) < 1e-12) return 0.5;
    return b * std::exp(b * t) / (2.0 * std::sinh(b));
}
}  // namespace

TEST_CASE("psi and psi': series branch joins the closed form smoothly") {
    for (const double x : {0.0998, 0.0999, 0.1001, 0.02, 0.2, 1.0, 10.0}) {
        const double direct = 1.0 / std::tanh(x) - 1.0 / x;
        CHECK(heis_psi(x) == doctest::Approx(direct).epsilon(1e-12));
        const double sh = std::sinh(x);
        CHECK(heis_psi_prime(x) ==
              doctest::Approx(1.0 / (x * x) - 1.0 / (sh * sh)).epsilon(1e-10));
    }
    CHECK(heis_psi(1e-8) == doctest::Approx(1e-8 / 3.0).epsilon(1e-12));
    CHECK(heis_psi_prime(1e-8) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("solve_kappa: boundary behavior, oracle agreement, defining identity") {
    CHECK_THROWS_AS(solve_kappa(3.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_kappa(2.0), std::invalid_argument);
    CHECK(solve_kappa(3.001) < 0.12);  // root exits the origin as beta -> 3+

    const double kappa = solve_kappa(4.0);
    CHECK(kappa == doctest::Approx(kKappa4).epsilon(1e-12));
    CHECK(std::abs(4.0 * heis_psi(kappa) - kappa) <= 1e-10);

    // independent 200-step bisection oracle
    double lo = 1e-8, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = 1.0 / std::tanh(mid) - 1.0 / mid - mid / 4.0;
        (f > 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(kappa - 0.5 * (lo + hi)) <= 1e-10);
}

TEST_CASE("B^2: frozen value, positivity across beta, sinh inequality") {
    const double kappa = solve_kappa(4.0);
    CHECK(compute_b2(4.0, kappa) == doctest::Approx(kB2At4).epsilon(1e-12));
    for (double beta = 3.01; beta <= 10.0; beta += 0.13) {
        const double k = solve_kappa(beta);
        CHECK(1.0 / (k * k) - 1.0 / (std::sinh(k) * std::sinh(k)) > 0.0);
        CHECK(1.0 - beta * heis_psi_prime(k) > 0.0);  // lambda > 0
        CHECK(compute_b2(beta, k) > 0.0);
    }
}

TEST_CASE("vMF cosine moments against the Simpson oracle") {
    for (const double b : {1e-4, 0.01, 0.04, 0.06, 0.5, 2.0, 10.0}) {
        const double z = oracles::integrate([b](double t) { return vmf_density(t, b); },
                                            -1.0, 1.0, 1e-14);
        auto mom = [&](int p) {
            return oracles::integrate(
                       [b, p](double t) { return std::pow(t, p) * vmf_density(t, b); }, -1.0,
                       1.0, 1e-14) /
                   z;
        };
        const VmfCosMoments m = vmf_cos_moments(b);
        CHECK(m.m1 == doctest::Approx(mom(1)).epsilon(1e-10));
        CHECK(m.m2 == doctest::Approx(mom(2)).epsilon(1e-10));
        CHECK(m.m3 == doctest::Approx(mom(3)).epsilon(1e-9));
    }
}

TEST_CASE("vMF signed square moment against the split-integral oracle") {
    for (const double b : {1e-3, 0.04, 0.06, 0.9, 4.0, 9.0}) {
        for (const double c : {-0.99, -0.4, 0.0, 0.37, 0.95}) {
            const double plus = oracles::integrate(
                [&](double t) { return (c - t) * (c - t) * vmf_density(t, b); }, -1.0, c,
                1e-14);
            const double minus = oracles::integrate(
                [&](double t) { return (c - t) * (c - t) * vmf_density(t, b); }, c, 1.0,
                1e-14);
            CHECK(vmf_cos_sign_moment(c, b) ==
                  doctest::Approx(plus - minus).epsilon(1e-9));
        }
    }
}

TEST_CASE("vMF sampler: uniform limit and mean cosine") {
    RngStream rng = derive_stream(81, 0, 0);
    // c -> 0: cos theta uniform on [-1, 1]
    double mean = 0.0, min = 1.0, max = -1.0;
    for (int i = 0; i < 200000; ++i) {
        const double t = vmf_sample_cos(0.0, rng);
        mean += t;
        min = std::min(min, t);
        max = std::max(max, t);
    }
    CHECK(std::abs(mean / 200000.0) <= 4.0 / std::sqrt(3.0 * 200000.0));
    CHECK(min < -0.999);
    CHECK(max > 0.999);

    // empirical mean cosine matches psi(c) within 4 SE, M = 1e6
    for (const double c : {0.01, 0.5, 2.0, 10.0}) {
        double acc = 0.0, acc2 = 0.0;
        const int reps = 1000000;
        for (int i = 0; i < reps; ++i) {
            const double t = vmf_sample_cos(c, rng);
            acc += t;
            acc2 += t * t;
        }
        const double m = acc / reps;
        const double sd = std::sqrt(std::max(acc2 / reps - m * m, 0.0));
        CHECK(std::abs(m - heis_psi(c)) <= 4.0 * sd / std::sqrt(static_cast<double>(reps)));
    }
}

TEST_CASE("vMF direction sampler preserves unit norm and the mean direction") {
    RngStream rng = derive_stream(82, 0, 0);
    const Vec3 mu{0.36, -0.48, 0.8};
    Vec3 acc{};
    for (int i = 0; i < 100000; ++i) {
        const Vec3 v = vmf_sample(mu, 3.0, rng);
        REQUIRE(v.norm() == doctest::Approx(1.0).epsilon(1e-9));
        acc = acc + v;
    }
    acc = acc * (1.0 / acc.norm());
    CHECK(acc.dot(mu) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("magnetization concentrates: beta |S|/n near kappa") {
    const HeisenbergModel model(4.0, 2000);
    std::vector<double> ms(10000);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        RngStream rng = derive_stream(83, kStreamRates, i);
        const auto sigma = model.sample_config(rng);
        Vec3 s{};
        for (const auto& v : sigma) s = s + v;
        ms[i] = 4.0 * s.norm() / 2000.0;
    }
    const MeanSe stat = mean_se(ms);
    CHECK(std::abs(stat.mean - model.kappa()) <= 3.0 * stat.se);
}

TEST_CASE("ed display vanishes at the fixed point") {
    const double beta = 4.0;
    const double kappa = solve_kappa(beta);
    for (const int n : {100, 1000}) {
        const double s_norm = n * kappa / beta;  // beta |S|/n = kappa, W = 0
        CHECK(std::abs(heis_ed_display(beta, kappa, n, 0.0, s_norm)) <= 1e-14);
    }
}

TEST_CASE("kernel: ed2 nonnegative and the n=3 aligned toy matches quadrature") {
    const HeisenbergModel model(4.0, 3);
    const Vec3 up{0.0, 0.0, 1.0};
    const HeisenbergModel::config_type aligned = {up, up, up};
    const CondStats cs = model.cond_stats(aligned);
    CHECK(cs.ed2 >= 0.0);

    // oracle: every site sees v = 2 e_z, b = 2 beta/3, cos alpha = 1
    const double nn = 3.0, beta = 4.0, kappa = model.kappa();
    const double b = beta * 2.0 / nn;
    const double z = oracles::integrate([b](double t) { return vmf_density(t, b); }, -1.0,
                                        1.0, 1e-14);
    auto mom = [&](int p) {
        return oracles::integrate(
                   [b, p](double t) { return std::pow(t, p) * vmf_density(t, b); }, -1.0,
                   1.0, 1e-14) /
               z;
    };
    const double q = 2.0 * std::sqrt(nn) * beta * beta / (nn * nn * kappa * kappa);
    const double b2 = model.b2();
    const double ed2_oracle = q * q / nn * (3.0 * 4.0 * (1.0 - 2.0 * mom(1) + mom(2))) / b2;
    CHECK(cs.ed2 == doctest::Approx(ed2_oracle).epsilon(1e-8));

    const double sign_oracle = oracles::integrate(
        [&](double t) { return (1.0 - t) * std::abs(1.0 - t) * vmf_density(t, b); }, -1.0,
        1.0, 1e-14) / z;
    const double edabs_oracle = q * q / nn * (3.0 * 4.0 * sign_oracle) / b2;
    CHECK(cs.edabs == doctest::Approx(edabs_oracle).epsilon(1e-8));

    const double cube_oracle = oracles::integrate(
        [&](double t) { return std::pow(1.0 - t, 3) * vmf_density(t, b); }, -1.0, 1.0,
        1e-14) / z;
    const double ed3_oracle = q * q * q / nn * (3.0 * 8.0 * cube_oracle) / std::pow(b2, 1.5);
    CHECK(cs.ed3 == doctest::Approx(ed3_oracle).epsilon(1e-8));
}

TEST_CASE("ed2 stays nonnegative over sampled configurations") {
    const HeisenbergModel model(4.0, 40);
    for (std::uint64_t i = 0; i < 500; ++i) {
        RngStream rng = derive_stream(84, kStreamKernel, i);
        const CondStats cs = model.cond_stats(model.sample_config(rng));
        CHECK(cs.ed2 >= 0.0);
        CHECK_NOTHROW(cs.validate());
    }
}

TEST_CASE("energy consistency at small n") {
    for (const int n : {3, 6}) {
        const HeisenbergModel model(4.0, n);
        // 1D quadrature oracle of sqrt(2/pi) int r^2 e^{-r^2/2} sinhc(ar)^n dr,
        // summed over unit segments so the adaptive probe cannot miss the mass
        const double a = std::sqrt(4.0 / n);
        auto radial = [&](double r) {
            const double x = a * r;
            const double sinhc = x < 1e-8 ? 1.0 : std::sinh(x) / x;
            return r * r * std::exp(-0.5 * r * r) * std::pow(sinhc, n);
        };
        double integral = 0.0;
        for (int k = 0; k < 30; ++k)
            integral += oracles::integrate(radial, k, k + 1.0, 1e-13);
        const double oracle = std::sqrt(2.0 / M_PI) * integral;
        const double z = model.auxiliary_normalizer();
        CHECK(z == doctest::Approx(oracle).epsilon(1e-4));

        // Monte Carlo cross-check: E exp(-beta |S|^2/2n) under the Gibbs law
        // must invert the normalizer
        std::vector<double> vals(1000000);
        parallel_for(vals.size(), 0, [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                RngStream rng = derive_stream(85, kStreamRates + n, i);
                const auto sigma = model.sample_config(rng);
                Vec3 s{};
                for (const auto& v : sigma) s = s + v;
                vals[i] = std::exp(-4.0 * s.norm2() / (2.0 * n));
            }
        });
        const MeanSe ms = mean_se(vals);
        CHECK(std::abs(ms.mean * z - 1.0) <= 4.0 * ms.se * z);
    }
}

TEST_CASE("exchangeability diagnostics pass at n = 50") {
    const HeisenbergModel model(4.0, 50);
    const DiagnosticReport rep = exchangeability_check(model, 20000, 86, 2);
    CHECK(rep.pass);
}

TEST_CASE("antipodal degenerate site does not break the kernel") {
    const HeisenbergModel model(4.0, 2);
    const HeisenbergModel::config_type antipodal = {{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}};
    CondStats cs;
    CHECK_NOTHROW(cs = model.cond_stats(antipodal));
    CHECK(std::isfinite(cs.ed));
    CHECK(std::isfinite(cs.ed2));
}
