#include "steinpair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steinpair/quadrature.hpp"

namespace steinpair {

MeanSe mean_se(std::span<const double> xs) {
    const std::size_t m = xs.size();
    if (m == 0) return {};
    const double mean = pairwise_sum(xs) / static_cast<double>(m);
    if (m == 1) return {mean, 0.0};
    std::vector<double> sq(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double d = xs[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(m - 1);
    return {mean, std::sqrt(var / static_cast<double>(m))};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("normal_quantile: u must lie in (0,1)");
    // Acklam's rational approximation, then one Halley step on erfc
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (u < plow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        const double q = u - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(x) - u;
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        const double du = e / pdf;
        x -= du / (1.0 + 0.5 * x * du);
    }
    return x;
}

Ecdf::Ecdf(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Ecdf: empty sample");
    std::sort(values_.begin(), values_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double ks_distance(const Ecdf& ecdf, const std::function<double(double)>& cdf) {
    const auto& xs = ecdf.values();
    const double m = static_cast<double>(xs.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        sup = std::max(sup, (static_cast<double>(i) + 1.0) / m - F);
        sup = std::max(sup, F - static_cast<double>(i) / m);
    }
    return sup;
}

std::vector<double> bootstrap_ks(const Ecdf& ecdf, const std::function<double(double)>& cdf,
                                 int B, RngStream& rng) {
    const auto& xs = ecdf.values();
    const std::size_t m = xs.size();
    std::vector<double> F(m);
    for (std::size_t i = 0; i < m; ++i) F[i] = cdf(xs[i]);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(B));
    std::vector<std::uint32_t> counts(m);
    for (int b = 0; b < B; ++b) {
        std::fill(counts.begin(), counts.end(), 0u);
        for (std::size_t i = 0; i < m; ++i) ++counts[rng.below(m)];
        double sup = 0.0;
        std::uint64_t cum = 0;
        const double inv = 1.0 / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double before = static_cast<double>(cum) * inv;
            cum += counts[i];
            const double after = static_cast<double>(cum) * inv;
            sup = std::max(sup, after - F[i]);
            sup = std::max(sup, F[i] - before);
        }
        out.push_back(sup);
    }
    return out;
}

namespace {

std::pair<double, double> ols_loglog(const std::vector<RatePoint>& pts) {
    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        const double x = std::log(p.n), y = std::log(p.distance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    return {slope, (sy - slope * sx) / n};
}

}  // namespace

RateFit fit_rate(const std::vector<RatePoint>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    for (const auto& p : points)
        if (!(p.distance > 0.0) || !(p.n > 0.0))
            throw std::invalid_argument("fit_rate: non-positive distance or n");
    RateFit fit;
    fit.points = points;
    std::tie(fit.slope, fit.intercept) = ols_loglog(points);
    return fit;
}

RateFit fit_rate_with_ci(const std::vector<RatePoint>& points,
                         const std::vector<std::vector<double>>& boot_distances) {
    RateFit fit = fit_rate(points);
    if (boot_distances.size() != points.size())
        throw std::invalid_argument("fit_rate_with_ci: block count mismatch");
    const std::size_t B = boot_distances.front().size();
    for (const auto& col : boot_distances)
        if (col.size() != B) throw std::invalid_argument("fit_rate_with_ci: ragged bootstrap");
    std::vector<double> slopes;
    slopes.reserve(B);
    std::vector<RatePoint> pts = points;
    for (std::size_t b = 0; b < B; ++b) {
        bool positive = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            pts[i].distance = boot_distances[i][b];
            positive = positive && pts[i].distance > 0.0;
        }
        if (!positive) continue;
        slopes.push_back(ols_loglog(pts).first);
    }
    if (slopes.size() >= 8) {
        std::sort(slopes.begin(), slopes.end());
        auto pick = [&slopes](double q) {
            const double pos = q * (static_cast<double>(slopes.size()) - 1.0);
            const std::size_t i = static_cast<std::size_t>(pos);
            const double t = pos - static_cast<double>(i);
            return i + 1 < slopes.size() ? (1.0 - t) * slopes[i] + t * slopes[i + 1]
                                         : slopes.back();
        };
        fit.ci_lo = pick(0.025);
        fit.ci_hi = pick(0.975);
        fit.has_ci = true;
    }
    return fit;
}

}  // namespace steinpair
