#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "steinpair/tabulated_density.hpp"

namespace steinpair {

/// Drift g of the linear-regression condition; the target density is
/// p(y) = c1 exp(-G(y)) with G the antiderivative of g from w0.
struct DriftSpec {
    enum class Kind { linear, monomial, tabulated };

    Kind kind = Kind::linear;
    double c = 1.0;  // coefficient: g(w) = c*w or c*w^(2k-1)
    int k = 1;       // monomial order, g(w) = c*w^(2k-1), k >= 1
    std::vector<double> xs, gs;  // tabulated drift, xs strictly increasing

    static DriftSpec linear(double c) { return {Kind::linear, c, 1, {}, {}}; }
    static DriftSpec monomial(double c, int k) { return {Kind::monomial, c, k, {}, {}}; }
    static DriftSpec tabulated(std::vector<double> xs, std::vector<double> gs);
};

struct Interval {
    double a = -std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();
};

/// Target law p(y) = c1 e^{-G(y)} on (a, b), tabulated on an adaptive grid.
/// Infinite endpoints are represented by truncation points where G exceeds
/// its minimum by tail_cut nats; F is clamped to [0, 1].
class TargetLaw {
  public:
    double drift(double w) const;        // g(w)
    double drift_prime(double w) const;  // g'(w)
    double drift_second(double w) const; // g''(w)
    double big_g(double y) const;        // G(y), exact for parametric kinds

    double pdf(double y) const;   // c1 e^{-G(y)}, analytic (0 outside support)
    double cdf(double y) const;   // clamped to [0,1]
    double survival(double y) const;  // 1 - F with full tail precision
    double quantile(double u) const;

    double c1() const { return c1_; }
    double w0() const { return w0_; }
    double lower() const { return dens_->lower(); }   // truncated support
    double upper() const { return dens_->upper(); }
    const Interval& requested_domain() const { return requested_; }
    const DriftSpec& drift_spec() const { return drift_; }
    bool standard_normal() const;

    /// Scale on the E|R| term of the Berry-Esseen right side: 1 for the
    /// standard normal target, 1/c1 otherwise.
    double residual_scale() const { return standard_normal() ? 1.0 : 1.0 / c1_; }

    struct TableRow {
        double y, g_value, p, f;
    };
    std::vector<TableRow> table() const;

    const TabulatedDensity& density() const { return *dens_; }

  private:
    friend TargetLaw build_target(const DriftSpec&, Interval, double, double);
    DriftSpec drift_;
    Interval requested_;
    double w0_ = 0.0;
    double c1_ = 0.0;
    std::shared_ptr<const TabulatedDensity> dens_;
};

/// Builds the target law from a drift. Throws std::invalid_argument for w0
/// outside the domain and std::runtime_error when e^{-G} is not integrable.
TargetLaw build_target(const DriftSpec& drift, Interval domain, double w0,
                       double tail_cut = 46.0);

struct ConditionReport {
    bool a1 = false, a2 = false, a3 = false;
    double a1_margin = 0.0;   // min of (w-w0) g(w) and of g increments
    double a2_margin = 0.0;   // min of 2 g'^2 - g g''
    double a3_left = 0.0, a3_right = 0.0;  // |g p| at the truncation points
    double a3_threshold = 1e-8;            // our convention, see notes
    bool all() const { return a1 && a2 && a3; }
    std::string summary() const;
};

/// Checks (A1)-(A3) on the law's grid plus tail probes. (A3) uses the numeric
/// threshold 1e-8 at the truncation points.
ConditionReport check_conditions(const TargetLaw& law);

/// Stein-equation solution f_z for a target law; f' comes from the ODE
/// rearranged, never from differencing f.
class SteinSolution {
  public:
    SteinSolution(const TargetLaw& law, double z);

    double z() const { return z_; }
    const TargetLaw& target() const { return *law_; }

    struct Eval {
        double f, fprime;
    };
    Eval eval(double w) const;

  private:
    const TargetLaw* law_;
    double z_;
    double f_z_;  // F(z)
};

inline SteinSolution::Eval stein_eval(const SteinSolution& s, double w) { return s.eval(w); }

struct PropertyViolation {
    std::string property;
    double w = 0.0, z = 0.0, value = 0.0;
};

struct PropertyReport {
    bool ok = true;
    std::vector<PropertyViolation> violations;  // capped at 32 entries
};

/// Lemma checks on a grid: 0 <= f <= 1/c1 + tol, |f'| <= 1 + tol,
/// |g f| <= 1 + tol, and g f non-decreasing within mono_tol per step.
PropertyReport verify_lemma41(const SteinSolution& s, const std::vector<double>& grid,
                              double tol = 1e-6, double mono_tol = 1e-8);

}  // namespace steinpair
