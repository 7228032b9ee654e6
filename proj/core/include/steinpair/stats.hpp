#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "steinpair/rng.hpp"

namespace steinpair {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // sample sd / sqrt(M)
};

/// Two-pass mean and standard error with pairwise summation.
MeanSe mean_se(std::span<const double> xs);

double normal_cdf(double x);       // Phi
double normal_quantile(double u);  // Phi^{-1}, |err| ~ 1e-15

/// Empirical CDF over a sample; values sorted at construction.
class Ecdf {
  public:
    explicit Ecdf(std::vector<double> values);
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator()(double x) const;  // right-continuous step function

  private:
    std::vector<double> values_;
};

/// Exact Kolmogorov distance sup_z |F_M(z) - F(z)| against a continuous CDF:
/// max_i max(i/M - F(x_(i)), F(x_(i)) - (i-1)/M).
double ks_distance(const Ecdf& ecdf, const std::function<double(double)>& cdf);

/// B bootstrap replicates of the KS distance, resampling the M observations
/// (multinomial counts over the already-sorted atoms; no re-sorting needed).
std::vector<double> bootstrap_ks(const Ecdf& ecdf, const std::function<double(double)>& cdf,
                                 int B, RngStream& rng);

struct RatePoint {
    double n = 0.0;
    double distance = 0.0;
};

struct RateFit {
    std::vector<RatePoint> points;
    double slope = 0.0;
    double intercept = 0.0;           // log d = intercept + slope log n
    double ci_lo = 0.0, ci_hi = 0.0;  // bootstrap 95% interval for slope
    bool has_ci = false;
};

/// OLS of log(distance) on log(n). Throws std::invalid_argument for fewer
/// than 3 points or non-positive distances.
RateFit fit_rate(const std::vector<RatePoint>& points);

/// Same fit plus a percentile bootstrap CI: boot_distances[i][b] is the b-th
/// bootstrap replicate of point i's distance (per-n replication blocks are
/// resampled as wholes upstream).
RateFit fit_rate_with_ci(const std::vector<RatePoint>& points,
                         const std::vector<std::vector<double>>& boot_distances);

}  // namespace steinpair
