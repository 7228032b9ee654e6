#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "steinpair/pair_model.hpp"
#include "steinpair/tabulated_density.hpp"

namespace steinpair {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const;
};

/// psi(x) = coth(x) - 1/x, with a series branch near 0 against cancellation.
double heis_psi(double x);
/// psi'(x) = 1/x^2 - 1/sinh(x)^2.
double heis_psi_prime(double x);

/// Unique positive root of beta psi(x) = x for beta > 3 (bracketed bisection
/// plus Newton polish). Throws std::invalid_argument for beta <= 3.
double solve_kappa(double beta);

/// B^2 = (4 beta^2 / ((1 - beta psi'(kappa)) kappa^2)) (1/kappa^2 - 1/sinh^2 kappa).
double compute_b2(double beta, double kappa);

/// Moments of the cosine T of a von Mises-Fisher deviation, density
/// ∝ e^{b t} on [-1, 1]: E T, E T^2, E T^3.
struct VmfCosMoments {
    double m1, m2, m3;
};
VmfCosMoments vmf_cos_moments(double b);

/// E[(c - T)|c - T|] under the same density (piecewise closed form).
double vmf_cos_sign_moment(double c, double b);

/// Inverse-CDF draw of the vMF cosine at concentration c (c = 0 is uniform).
double vmf_sample_cos(double c, RngStream& rng);
Vec3 vmf_sample(const Vec3& mean_direction, double concentration, RngStream& rng);
Vec3 uniform_sphere(RngStream& rng);

/// First-moment display with |sigma^(i)| collapsed to |S|;
/// vanishes at the fixed point beta |S|/n = kappa. The kernel itself uses the
/// exact per-site form.
double heis_ed_display(double beta, double kappa, int n, double w, double s_norm);

/// Mean-field Heisenberg model on (S^2)^n for beta > 3. The statistic is
/// standardized: w = W_n / B with W_n = sqrt(n)(beta^2 |S_n|^2 / (n kappa)^2 - 1),
/// so the target is the standard normal.
class HeisenbergModel {
  public:
    using config_type = std::vector<Vec3>;

    HeisenbergModel(double beta, int n);

    int n() const { return n_; }
    double beta() const { return beta_; }
    double kappa() const { return kappa_; }
    double b2() const { return b2_; }

    config_type sample_config(RngStream& rng) const;
    double w_of(const config_type& sigma) const;
    CondStats cond_stats(const config_type& sigma) const;
    std::pair<double, double> sample_pair(RngStream& rng) const;

    double lambda() const { return lambda_; }
    const TargetLaw& target() const { return standard_normal_target(); }

    /// E exp(beta |S_n|^2 / 2n) under the product of uniform sphere measures,
    /// from the tabulated radial marginal.
    double auxiliary_normalizer() const;

  private:
    double w_raw(double s_norm2) const;

    double beta_ = 0.0;
    int n_ = 0;
    double kappa_ = 0.0;
    double b2_ = 0.0, b_ = 0.0;
    double lambda_ = 0.0;
    std::shared_ptr<const TabulatedDensity> radial_;
};

}  // namespace steinpair
