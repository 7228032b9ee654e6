#include "steinpair/targets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "steinpair/quadrature.hpp"

namespace steinpair {

DriftSpec DriftSpec::tabulated(std::vector<double> xs, std::vector<double> gs) {
    if (xs.size() < 2 || xs.size() != gs.size())
        throw std::invalid_argument("DriftSpec::tabulated: need matching xs/gs, size >= 2");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("DriftSpec::tabulated: xs must be strictly increasing");
    DriftSpec d;
    d.kind = Kind::tabulated;
    d.xs = std::move(xs);
    d.gs = std::move(gs);
    return d;
}

namespace {

double interp_tab(const DriftSpec& d, double w) {
    if (w <= d.xs.front()) return d.gs.front();
    if (w >= d.xs.back()) return d.gs.back();
    const auto it = std::upper_bound(d.xs.begin(), d.xs.end(), w);
    const std::size_t i = static_cast<std::size_t>(it - d.xs.begin()) - 1;
    const double t = (w - d.xs[i]) / (d.xs[i + 1] - d.xs[i]);
    return d.gs[i] + t * (d.gs[i + 1] - d.gs[i]);
}

// integral of the piecewise-linear tabulated drift from x0 to y; trapezoid is
// exact on each linear piece, constant extrapolation outside the table
double integral_tab(const DriftSpec& d, double x0, double y) {
    if (y == x0) return 0.0;
    if (y < x0) return -integral_tab(d, y, x0);
    auto seg = [&](double lo, double hi) {
        return 0.5 * (interp_tab(d, lo) + interp_tab(d, hi)) * (hi - lo);
    };
    double acc = 0.0;
    double cur = x0;
    for (double xk : d.xs) {
        if (xk <= cur) continue;
        if (xk >= y) break;
        acc += seg(cur, xk);
        cur = xk;
    }
    acc += seg(cur, y);
    return acc;
}

}  // namespace

double TargetLaw::drift(double w) const {
    switch (drift_.kind) {
        case DriftSpec::Kind::linear: return drift_.c * w;
        case DriftSpec::Kind::monomial: {
            const int p = 2 * drift_.k - 1;
            return drift_.c * std::pow(w, p);
        }
        case DriftSpec::Kind::tabulated: return interp_tab(drift_, w);
    }
    return 0.0;
}

double TargetLaw::drift_prime(double w) const {
    switch (drift_.kind) {
        case DriftSpec::Kind::linear: return drift_.c;
        case DriftSpec::Kind::monomial: {
            const int p = 2 * drift_.k - 1;
            return p == 0 ? 0.0 : drift_.c * p * std::pow(w, p - 1);
        }
        case DriftSpec::Kind::tabulated: {
            // 5-point stencil on the interpolant, one-sided near the ends
            const double h =
                std::max((drift_.xs.back() - drift_.xs.front()) /
                             (4.0 * static_cast<double>(drift_.xs.size() - 1)),
                         1e-6);
            const double lo = drift_.xs.front(), hi = drift_.xs.back();
            double x = std::clamp(w, lo + 2 * h, hi - 2 * h);
            auto g = [this](double t) { return interp_tab(drift_, t); };
            return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h);
        }
    }
    return 0.0;
}

double TargetLaw::drift_second(double w) const {
    switch (drift_.kind) {
        case DriftSpec::Kind::linear: return 0.0;
        case DriftSpec::Kind::monomial: {
            const int p = 2 * drift_.k - 1;
            return p <= 1 ? 0.0 : drift_.c * p * (p - 1) * std::pow(w, p - 2);
        }
        case DriftSpec::Kind::tabulated: {
            const double h =
                std::max((drift_.xs.back() - drift_.xs.front()) /
                             (4.0 * static_cast<double>(drift_.xs.size() - 1)),
                         1e-6);
            const double lo = drift_.xs.front(), hi = drift_.xs.back();
            double x = std::clamp(w, lo + 2 * h, hi - 2 * h);
            auto g = [this](double t) { return interp_tab(drift_, t); };
            return (-g(x - 2 * h) + 16 * g(x - h) - 30 * g(x) + 16 * g(x + h) -
                    g(x + 2 * h)) /
                   (12 * h * h);
        }
    }
    return 0.0;
}

namespace {

// G(y) = int_{w0}^{y} g(t) dt as a free function so density closures can own
// their state by value (the law object may be moved after construction)
double eval_big_g(const DriftSpec& drift, double w0, double y) {
    switch (drift.kind) {
        case DriftSpec::Kind::linear:
            return 0.5 * drift.c * (y * y - w0 * w0);
        case DriftSpec::Kind::monomial: {
            const int p2 = 2 * drift.k;
            return drift.c * (std::pow(y, p2) - std::pow(w0, p2)) / p2;
        }
        case DriftSpec::Kind::tabulated:
            return integral_tab(drift, w0, y);
    }
    return 0.0;
}

}  // namespace

double TargetLaw::big_g(double y) const { return eval_big_g(drift_, w0_, y); }

double TargetLaw::pdf(double y) const {
    if (y < lower() || y > upper()) return 0.0;
    const double e = -big_g(y);
    return e > -745.0 ? c1_ * std::exp(e) : 0.0;
}

double TargetLaw::cdf(double y) const { return dens_->cdf(y); }

double TargetLaw::survival(double y) const { return dens_->survival(y); }

double TargetLaw::quantile(double u) const { return dens_->quantile(u); }

bool TargetLaw::standard_normal() const {
    return drift_.kind == DriftSpec::Kind::linear && std::abs(drift_.c - 1.0) < 1e-12 &&
           std::abs(w0_) < 1e-12;
}

std::vector<TargetLaw::TableRow> TargetLaw::table() const {
    const auto& xs = dens_->breakpoints();
    std::vector<TableRow> rows;
    rows.reserve(xs.size());
    for (double y : xs) rows.push_back({y, big_g(y), pdf(y), cdf(y)});
    return rows;
}

TargetLaw build_target(const DriftSpec& drift, Interval domain, double w0,
                       double tail_cut) {
    if (drift.k < 1) throw std::invalid_argument("build_target: monomial order k must be >= 1");
    if (!(domain.a < domain.b)) throw std::invalid_argument("build_target: empty domain");
    if (!(w0 > domain.a && w0 < domain.b))
        throw std::invalid_argument("build_target: w0 outside domain");

    TargetLaw law;
    law.drift_ = drift;
    law.requested_ = domain;
    law.w0_ = w0;

    auto G = [drift, w0](double y) { return eval_big_g(drift, w0, y); };

    // truncation: walk outward from w0 tracking the running minimum of G and
    // stop where G exceeds it by the cut. If G never rises the tail of e^{-G}
    // does not decay and the density is not integrable.
    const double safety_cut = 600.0;  // keeps p representable in double
    auto truncate = [&](int dir) {
        const double user = dir > 0 ? domain.b : domain.a;
        const double cut = std::isfinite(user) ? safety_cut : tail_cut;
        double run_min = G(w0);
        double prev = w0;
        double step = 1.0;
        for (int iter = 0; iter < 4096; ++iter) {
            double cand = w0 + dir * step;
            bool clipped = false;
            if ((dir > 0 && cand >= user) || (dir < 0 && cand <= user)) {
                cand = user;
                clipped = true;
            }
            const double gc = G(cand);
            if (gc - run_min >= cut) {
                double inner = prev, outer = cand;
                for (int b = 0; b < 128; ++b) {
                    const double mid = 0.5 * (inner + outer);
                    (G(mid) - run_min >= cut ? outer : inner) = mid;
                }
                return outer;
            }
            if (clipped) return user;
            run_min = std::min(run_min, gc);
            prev = cand;
            step *= 2.0;
            if (!std::isfinite(cand) || std::abs(cand) > 1e150)
                throw std::runtime_error(
                    "build_target: e^{-G} tail does not fall below the truncation level; "
                    "density not integrable");
        }
        throw std::runtime_error("build_target: truncation search failed");
    };
    const double ta = truncate(-1);
    const double tb = truncate(+1);
    if (!(ta < tb)) throw std::runtime_error("build_target: degenerate truncated support");

    law.dens_ = std::make_shared<const TabulatedDensity>(TabulatedDensity::build(
        [drift, w0](double y) { return -eval_big_g(drift, w0, y); }, ta, tb));
    // total_mass is in units of exp(-G - shift) with shift = -G_min
    law.c1_ = std::exp(-law.dens_->log_shift()) / law.dens_->total_mass();
    if (!std::isfinite(law.c1_) || !(law.c1_ > 0.0))
        throw std::runtime_error("build_target: normalizing constant not finite");
    return law;
}

std::string ConditionReport::summary() const {
    std::ostringstream os;
    os << "(A1) " << (a1 ? "pass" : "FAIL") << " margin=" << a1_margin << "; (A2) "
       << (a2 ? "pass" : "FAIL") << " margin=" << a2_margin << "; (A3) "
       << (a3 ? "pass" : "FAIL") << " |gp|=(" << a3_left << ", " << a3_right
       << ") threshold=" << a3_threshold;
    return os.str();
}

ConditionReport check_conditions(const TargetLaw& law) {
    ConditionReport rep;
    const auto& xs = law.density().breakpoints();
    double a1_margin = std::numeric_limits<double>::infinity();
    double a2_margin = std::numeric_limits<double>::infinity();
    double a2_scale = 1.0;
    double prev_g = law.drift(xs.front());
    const double w0 = law.w0();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = xs[i];
        const double g = law.drift(w);
        if (i > 0) a1_margin = std::min(a1_margin, g - prev_g);
        prev_g = g;
        a1_margin = std::min(a1_margin, (w - w0) * g);
        const double gp = law.drift_prime(w);
        const double gpp = law.drift_second(w);
        const double v = 2.0 * gp * gp - g * gpp;
        a2_margin = std::min(a2_margin, v);
        a2_scale = std::max(a2_scale, std::abs(v));
    }
    rep.a1_margin = a1_margin;
    rep.a2_margin = a2_margin;
    rep.a1 = a1_margin >= -1e-9 * a2_scale - 1e-12;
    rep.a2 = a2_margin >= -1e-8 * a2_scale;
    rep.a3_left = std::abs(law.drift(law.lower()) * law.pdf(law.lower()));
    rep.a3_right = std::abs(law.drift(law.upper()) * law.pdf(law.upper()));
    rep.a3 = rep.a3_left < rep.a3_threshold && rep.a3_right < rep.a3_threshold;
    return rep;
}

SteinSolution::SteinSolution(const TargetLaw& law, double z)
    : law_(&law), z_(z), f_z_(law.cdf(z)) {}

SteinSolution::Eval SteinSolution::eval(double w) const {
    const double ind = w <= z_ ? 1.0 : 0.0;
    const double p = law_->pdf(w);
    if (p <= 0.0) return {0.0, ind - f_z_};  // guarded far-tail limit
    // both branches are 0/0 ratios in the tails; F comes from prefix sums and
    // 1-F from suffix sums so each factor keeps full relative precision
    const double f = (w <= z_) ? law_->cdf(w) * law_->survival(z_) / p
                               : f_z_ * law_->survival(w) / p;
    return {f, law_->drift(w) * f + ind - f_z_};
}

PropertyReport verify_lemma41(const SteinSolution& s, const std::vector<double>& grid,
                              double tol, double mono_tol) {
    PropertyReport rep;
    const TargetLaw& law = s.target();
    const double cap = 1.0 / law.c1() + tol;
    auto record = [&rep](const char* prop, double w, double z, double value) {
        rep.ok = false;
        if (rep.violations.size() < 32) rep.violations.push_back({prop, w, z, value});
    };
    bool have_prev = false;
    double prev_gf = 0.0;
    for (double w : grid) {
        if (w < law.lower() || w > law.upper()) continue;
        const auto [f, fp] = s.eval(w);
        if (f < -tol || f > cap) record("0 <= f <= 1/c1", w, s.z(), f);
        if (std::abs(fp) > 1.0 + tol) record("|f'| <= 1", w, s.z(), fp);
        const double gf = law.drift(w) * f;
        if (std::abs(gf) > 1.0 + tol) record("|g f| <= 1", w, s.z(), gf);
        if (have_prev && gf < prev_gf - mono_tol) record("g f non-decreasing", w, s.z(), gf - prev_gf);
        prev_gf = gf;
        have_prev = true;
    }
    return rep;
}

}  // namespace steinpair
