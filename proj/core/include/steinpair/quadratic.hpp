#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "steinpair/pair_model.hpp"

namespace steinpair {

/// Distribution of the i.i.d. factors X: mean 0, variance 1, finite fourth
/// moment. The conditional moments of X - X' needed by the kernel are exact
/// closed forms for all three kinds.
class XLaw {
  public:
    enum class Kind { rademacher, uniform, shifted_exponential };

    explicit XLaw(Kind kind) : kind_(kind) {}
    static XLaw parse(const std::string& name);

    Kind kind() const { return kind_; }
    const char* name() const;
    double fourth_moment() const;
    double third_moment() const;

    double sample(RngStream& rng) const;
    /// B(x) = E[(x - X')|x - X'|]
    double signed_square_moment(double x) const;
    /// C(x) = E[(x - X')^3] = x^3 + 3x - E X'^3
    double signed_cube_moment(double x) const { return x * x * x + 3.0 * x - third_moment(); }

  private:
    Kind kind_;
};

/// Real symmetric matrix with zero diagonal in compressed sparse rows (both
/// triangles stored so row scans give full rows).
struct SymmetricMatrix {
    int n = 0;
    std::vector<std::int64_t> row_ptr;  // size n+1
    std::vector<std::int32_t> col;
    std::vector<double> val;
    double sum_sq = 0.0;  // sum over all (i,j) of a_ij^2

    static SymmetricMatrix from_dense(const std::vector<std::vector<double>>& a);
    static SymmetricMatrix tridiagonal(int n, double off = 1.0);
    static SymmetricMatrix erdos_renyi(int n, double p, std::uint64_t seed);
    static SymmetricMatrix rank_one(int n, std::uint64_t seed);
    static SymmetricMatrix from_csv(const std::string& path);

    void validate() const;  // symmetry, zero diagonal
};

/// W_n = (1/sigma_n) sum_{i != j} a_ij X_i X_j with sigma_n^2 = 2 sum a_ij^2.
class QuadraticModel {
  public:
    using config_type = std::vector<double>;

    QuadraticModel(SymmetricMatrix a, XLaw x_law);

    int n() const { return a_->n; }
    double sigma() const { return sigma_; }
    const XLaw& x_law() const { return xlaw_; }
    const SymmetricMatrix& matrix() const { return *a_; }

    config_type sample_config(RngStream& rng) const;
    double w_of(const config_type& x) const;
    CondStats cond_stats(const config_type& x) const;
    std::pair<double, double> sample_pair(RngStream& rng) const;

    double lambda() const { return 2.0 / static_cast<double>(a_->n); }
    const TargetLaw& target() const { return standard_normal_target(); }

    /// Theorem bound bracket with the absolute constant set to 1:
    /// (E X^4 / sigma^2) (sqrt(sum_i (sum_j a_ij^2)^2) + sqrt(Tr A^4)).
    double theoretical_bound_factor() const;

  private:
    std::vector<double> row_products(const config_type& x) const;  // y = A x

    std::shared_ptr<const SymmetricMatrix> a_;
    XLaw xlaw_;
    double sigma_ = 0.0;
};

}  // namespace steinpair
