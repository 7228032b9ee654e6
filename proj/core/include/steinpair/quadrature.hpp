#pragma once

#include <functional>
#include <span>
#include <vector>

namespace steinpair {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

/// Nodes/weights of the n-point Gauss-Legendre rule (Newton on the Legendre
/// recurrence). Cached per n, thread-safe.
const GaussLegendreRule& gauss_legendre(int n);

/// Fixed-order Gauss-Legendre on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 15);

template <class F>
double integrate_gl_fn(F&& f, double a, double b, int n = 15) {
    const auto& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

/// Adaptive composite Gauss-Legendre: panels bisected until the embedded
/// error estimate |GL15(panel) - GL15(left)+GL15(right)| meets the target.
/// Throws std::runtime_error if the recursion cannot converge.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 0.0,
                          int max_depth = 48);

/// Deterministic pairwise (tree) summation; O(eps log N) error, independent
/// of worker count as long as the array contents are fixed.
double pairwise_sum(std::span<const double> xs);

}  // namespace steinpair
