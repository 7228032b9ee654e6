#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "steinpair/pair_model.hpp"
#include "steinpair/tabulated_density.hpp"

namespace steinpair {

/// Single-spin base measure rho: mean 0, variance 1 (checked at construction
/// to 1e-10). Exponential-moment conditions are probed numerically per beta.
class BaseMeasure {
  public:
    enum class Kind { two_point, atoms, uniform };

    static BaseMeasure two_point();  // +/-1 with probability 1/2
    static BaseMeasure atoms(std::vector<double> xs, std::vector<double> ps);
    static BaseMeasure uniform();    // uniform on [-sqrt(3), sqrt(3)]

    Kind kind() const { return kind_; }
    const char* name() const;
    bool discrete() const { return kind_ != Kind::uniform; }
    const std::vector<double>& atom_xs() const { return xs_; }
    const std::vector<double>& atom_ps() const { return ps_; }

    double moment(int j) const;   // exact raw moment
    double log_mgf(double t) const;

    /// Draw from the exponentially tilted measure dρ_t ∝ e^{t x} dρ(x).
    double tilted_sample(double t, RngStream& rng) const;

    /// Conditional moments of the Gibbs-resampled coordinate whose law is
    /// ∝ exp(q x^2 + theta x) dρ(x): m1 = E X', m2 = E X'^2, and the signed
    /// moments D = E[(xi - X')|xi - X'|], D3 = E[(xi - X')^3].
    struct GibbsMoments {
        double m1, m2, d_signed, d_cubed;
    };
    GibbsMoments gibbs_moments(double q, double theta, double xi) const;

    /// Draw X' from the Gibbs conditional ∝ exp(q x^2 + theta x) dρ(x).
    double gibbs_sample(double q, double theta, RngStream& rng) const;

  private:
    BaseMeasure() = default;
    Kind kind_ = Kind::two_point;
    std::vector<double> xs_, ps_;  // atoms (two_point stored as atoms too)
};

/// Numeric probe of the exponential-moment conditions on a grid of t.
struct MgfConditionReport {
    bool ok = false;
    double b = 0.0;            // sub-critical: witnessed b with E e^{t xi} <= e^{t^2/2b}
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;  // critical-case constants
    double probe_limit = 0.0;  // |t| <= probe_limit was checked
    std::string note;          // outside the grid the condition is unverified
};
MgfConditionReport check_mgf_condition(const BaseMeasure& rho, double beta, int k = 2);

/// Type-k detection: first 2k-1 moments match the standard normal, deficit
/// lambda_rho > 0 at order 2k. Throws when no such k <= 6 exists.
struct TypeK {
    int k = 0;
    double lambda_rho = 0.0;
};
TypeK detect_type_k(const BaseMeasure& rho, double tol = 1e-9);

/// H^{(2k)}(0) / (2k)! with H(s) = s^2/2 - ln E e^{s xi}, by Richardson-
/// extrapolated central differences.
double curie_weiss_c2(const BaseMeasure& rho, int k);

/// General Curie-Weiss model: exact auxiliary-field sampler and Gibbs-
/// conditional kernel. beta in (0,1) is sub-critical with W = n^{-1/2} S_n;
/// beta = 1 is critical type-k with W = n^{-1+1/(2k)} S_n.
class CurieWeissModel {
  public:
    using config_type = std::vector<double>;

    CurieWeissModel(BaseMeasure rho, double beta, int n);

    int n() const { return n_; }
    double beta() const { return beta_; }
    bool critical() const { return critical_; }
    int type_k() const { return k_; }
    double c2() const { return c2_; }
    double scale() const { return scale_; }
    const BaseMeasure& rho() const { return rho_; }
    const MgfConditionReport& mgf_report() const { return mgf_report_; }

    config_type sample_config(RngStream& rng) const;
    double w_of(const config_type& x) const;
    CondStats cond_stats(const config_type& x) const;
    std::pair<double, double> sample_pair(RngStream& rng) const;

    double lambda() const { return lambda_; }
    const TargetLaw& target() const { return *target_; }

    /// Normalizer of the auxiliary marginal: E exp(beta S_n^2 / 2n) under
    /// the product measure (used by the small-n consistency checks).
    double auxiliary_normalizer() const;

  private:
    double tilt_of(double z) const;       // sqrt(beta/n) z

    BaseMeasure rho_;
    double beta_ = 0.0;
    int n_ = 0;
    bool critical_ = false;
    int k_ = 0;
    double c2_ = 0.0;
    double lambda_ = 0.0;
    double scale_ = 0.0;
    MgfConditionReport mgf_report_;
    std::shared_ptr<const TargetLaw> target_;
    std::shared_ptr<const TabulatedDensity> aux_;
};

/// Target law of the scaled magnetization: N(0, 1/(1-beta)) below the
/// critical temperature, c1 e^{-c2 y^{2k}} at it.
TargetLaw build_cw_target(const CurieWeissModel& model);

}  // namespace steinpair
