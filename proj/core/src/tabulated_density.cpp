#include "steinpair/tabulated_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "steinpair/quadrature.hpp"

namespace steinpair {

namespace {

struct Panel {
    double lo, hi, mass;
};

}  // namespace

double TabulatedDensity::unnorm(double x) const {
    const double l = logf_(x) - shift_;
    return l > -745.0 ? std::exp(l) : 0.0;
}

TabulatedDensity TabulatedDensity::build(std::function<double(double)> log_density,
                                         double a, double b, double panel_rel_tol) {
    if (!(a < b)) throw std::invalid_argument("TabulatedDensity: empty support");
    TabulatedDensity d;
    d.logf_ = std::move(log_density);

    // locate the log-density maximum on a coarse scan
    constexpr int kScan = 257;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
        const double x = a + (b - a) * i / (kScan - 1);
        best = std::max(best, d.logf_(x));
    }
    if (!std::isfinite(best))
        throw std::runtime_error("TabulatedDensity: log-density has no finite maximum");
    d.shift_ = best;

    auto q = [&d](double x) { return d.unnorm(x); };

    // coarse total to scale the panel tolerance
    double coarse = 0.0;
    for (int i = 0; i + 1 < kScan; ++i) {
        const double lo = a + (b - a) * i / (kScan - 1);
        const double hi = a + (b - a) * (i + 1) / (kScan - 1);
        coarse += integrate_gl_fn(q, lo, hi);
    }
    if (!(coarse > 0.0))
        throw std::runtime_error("TabulatedDensity: density integrates to zero");

    const double tol = panel_rel_tol * coarse;
    std::vector<Panel> panels;
    // iterative bisection stack, panels emitted in ascending order
    struct Item {
        double lo, hi, whole;
        int depth;
    };
    // seed the stack at the scan resolution so narrow spikes are seen
    std::vector<Item> stack;
    for (int i = kScan - 2; i >= 0; --i) {
        const double lo = a + (b - a) * i / (kScan - 1);
        const double hi = a + (b - a) * (i + 1) / (kScan - 1);
        stack.push_back({lo, hi, integrate_gl_fn(q, lo, hi), 0});
    }
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (it.lo + it.hi);
        const double left = integrate_gl_fn(q, it.lo, mid);
        const double right = integrate_gl_fn(q, mid, it.hi);
        const double local_tol = std::max(tol * (it.hi - it.lo) / (b - a), 1e-320);
        if (std::abs(left + right - it.whole) <= local_tol || it.depth >= 46) {
            panels.push_back({it.lo, mid, left});
            panels.push_back({mid, it.hi, right});
        } else {
            // push right first so the left half is processed first (ordering)
            stack.push_back({mid, it.hi, right, it.depth + 1});
            stack.push_back({it.lo, mid, left, it.depth + 1});
        }
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& p, const Panel& r) { return p.lo < r.lo; });

    d.xs_.reserve(panels.size() + 1);
    d.cum_.reserve(panels.size() + 1);
    d.xs_.push_back(panels.front().lo);
    d.cum_.push_back(0.0);
    double acc = 0.0;
    for (const Panel& p : panels) {
        acc += p.mass;
        d.xs_.push_back(p.hi);
        d.cum_.push_back(acc);
    }
    d.total_ = acc;
    d.suffix_.assign(d.xs_.size(), 0.0);
    double tail = 0.0;
    for (std::size_t i = panels.size(); i-- > 0;) {
        tail += panels[i].mass;
        d.suffix_[i] = tail;
    }
    if (!(d.total_ > 0.0))
        throw std::runtime_error("TabulatedDensity: normalizer vanished after refinement");
    d.build_inverse_table();
    return d;
}

double TabulatedDensity::partial_mass(std::size_t i, double x) const {
    return integrate_gl_fn([this](double t) { return unnorm(t); }, xs_[i], x);
}

double TabulatedDensity::pdf(double x) const {
    if (x < xs_.front() || x > xs_.back()) return 0.0;
    return unnorm(x) / total_;
}

double TabulatedDensity::cdf(double x) const {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double c = (cum_[i] + partial_mass(i, x)) / total_;
    return std::clamp(c, 0.0, 1.0);
}

double TabulatedDensity::survival(double x) const {
    if (x <= xs_.front()) return 1.0;
    if (x >= xs_.back()) return 0.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double mass_to_next =
        integrate_gl_fn([this](double t) { return unnorm(t); }, x, xs_[i + 1]);
    const double s = (suffix_[i + 1] + mass_to_next) / total_;
    return std::clamp(s, 0.0, 1.0);
}

double TabulatedDensity::solve_in_panel(std::size_t i, double target) const {
    // solve cum(x) = target within panel i by safeguarded Newton
    double lo = xs_[i], hi = xs_[i + 1];
    double x = 0.5 * (lo + hi);
    const double local = target - cum_[i];
    for (int iter = 0; iter < 100; ++iter) {
        const double fx = partial_mass(i, x) - local;
        if (fx > 0.0)
            hi = x;
        else
            lo = x;
        const double deriv = unnorm(x);
        double step = deriv > 0.0 ? x - fx / deriv : 0.5 * (lo + hi);
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        if (std::abs(step - x) <= 1e-15 * (std::abs(x) + 1e-15)) return step;
        x = step;
    }
    return x;
}

double TabulatedDensity::quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::invalid_argument("TabulatedDensity::quantile: u outside [0,1]");
    if (u == 0.0) return xs_.front();
    if (u == 1.0) return xs_.back();
    const double target = u * total_;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    i = (i == 0) ? 0 : i - 1;
    i = std::min(i, xs_.size() - 2);
    return solve_in_panel(i, target);
}

void TabulatedDensity::build_inverse_table() {
    inv_x_.resize(kInvCells + 1);
    inv_slope_.resize(kInvCells + 1);
    for (int j = 0; j <= kInvCells; ++j) {
        const double u = static_cast<double>(j) / kInvCells;
        const double x = quantile(u);
        inv_x_[j] = x;
        const double q = unnorm(x);
        inv_slope_[j] = q > 0.0 ? total_ / q : 0.0;  // dx/du
    }
}

double TabulatedDensity::sample(RngStream& rng) const {
    const double u = rng.uniform01();
    const double pos = u * kInvCells;
    const int j = std::min(static_cast<int>(pos), kInvCells - 1);
    // extreme tail cells: exact inversion (the Hermite slopes blow up there)
    if (j == 0 || j == kInvCells - 1 || inv_slope_[j] <= 0.0 || inv_slope_[j + 1] <= 0.0)
        return quantile(u);
    const double t = pos - j;
    const double h = 1.0 / kInvCells;
    const double x0 = inv_x_[j], x1 = inv_x_[j + 1];
    const double m0 = inv_slope_[j] * h, m1 = inv_slope_[j + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * x0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * x1 + (t3 - t2) * m1;
}

}  // namespace steinpair
