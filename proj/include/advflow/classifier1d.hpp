#ifndef ADVFLOW_CLASSIFIER1D_HPP
#define ADVFLOW_CLASSIFIER1D_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "density.hpp"
#include "errors.hpp"
#include "interval_union.hpp"
#include "quadrature.hpp"

namespace advflow {

struct Window {
    double lo;
    double hi;

    double width() const noexcept { return hi - lo; }
};

// Extreme component means widened by ten of the largest standard deviation.
inline Window default_window(const ClassificationModel& model) {
    const auto [lo, hi] = model.mean_range();
    const double pad = 10.0 * model.max_sd();
    return {lo - pad, hi + pad};
}

struct BayesOptions {
    double scan_resolution = 0.0;  // 0 means window width * 1e-3
    std::size_t max_crossings = 64;
};

namespace detail {

inline void require_1d(const ClassificationModel& model, const char* what) {
    if (model.dimension() != 1)
        throw DimensionError(std::string(what) + ": model must be one-dimensional");
}

// Bisection on the predicate log_ratio > 0, run until the bracket cannot shrink.
inline double refine_crossing(const ClassificationModel& model, double lo, double hi) {
    const bool lo_pos = model.log_ratio(lo) > 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((model.log_ratio(mid) > 0.0) == lo_pos) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Sign changes of class_gap inside the window, in increasing order.
inline std::vector<double> bayes_crossings(const ClassificationModel& model, Window window,
                                           const BayesOptions& opts = {}) {
    detail::require_1d(model, "bayes_crossings");
    if (!(window.hi > window.lo)) throw ConfigError("bayes: empty search window");
    const double res = opts.scan_resolution > 0.0 ? opts.scan_resolution : window.width() * 1e-3;
    const auto n = static_cast<std::size_t>(std::ceil(window.width() / res));

    std::vector<double> crossings;
    bool all_flat = true;
    double prev_x = window.lo;
    double prev = model.log_ratio(prev_x);
    if (std::abs(prev) > 1e-12) all_flat = false;
    for (std::size_t i = 1; i <= n; ++i) {
        const double x = i == n ? window.hi : window.lo + static_cast<double>(i) * res;
        const double cur = model.log_ratio(x);
        if (std::abs(cur) > 1e-12) all_flat = false;
        if ((prev > 0.0) != (cur > 0.0)) {
            crossings.push_back(detail::refine_crossing(model, prev_x, x));
            if (crossings.size() > opts.max_crossings)
                throw DegenerateModelError("bayes: more than " + std::to_string(opts.max_crossings) +
                                           " crossings in the search window");
        }
        prev_x = x;
        prev = cur;
    }
    if (all_flat) throw DegenerateModelError("bayes: class gap vanishes identically");
    return crossings;
}

// {x : w1 rho1(x) > w0 rho0(x)}.
inline IntervalUnion bayes_set(const ClassificationModel& model, Window window,
                               const BayesOptions& opts = {}) {
    const auto crossings = bayes_crossings(model, window, opts);
    std::vector<Interval> out;
    bool inside = model.log_ratio(window.lo) > 0.0;
    double start = inside ? -inf : 0.0;
    for (double c : crossings) {
        if (inside) out.push_back({start, c});
        else start = c;
        inside = !inside;
    }
    if (inside) out.push_back({start, inf});
    return IntervalUnion(std::move(out));
}

inline IntervalUnion bayes_set(const ClassificationModel& model, const BayesOptions& opts = {}) {
    return bayes_set(model, default_window(model), opts);
}

// Integral of f over a union, with infinite ends cut where the densities are
// below roughly 1e-18 (nine standard deviations past the extreme means).
template <class F>
double integrate_over(const ClassificationModel& model, const IntervalUnion& set, F&& f,
                      double abs_tol = default_quadrature_tol) {
    const auto [mlo, mhi] = model.mean_range();
    const double cut = 9.0 * model.max_sd();
    const double tlo = mlo - cut;
    const double thi = mhi + cut;
    double total = 0.0;
    for (const auto& p : set.intervals()) {
        const double lo = std::max(p.lo, tlo);
        const double hi = std::min(p.hi, thi);
        if (hi > lo) total += integrate(f, lo, hi, abs_tol);
    }
    return total;
}

// R_eps(A) = int_{A^eps} w0 rho0 + w1 - int_{A^-eps} w1 rho1.
inline double robust_risk(const ClassificationModel& model, const IntervalUnion& a, double eps) {
    detail::require_1d(model, "robust_risk");
    if (!(eps >= 0.0)) throw ConfigError("robust_risk: eps must be nonnegative");
    const double in0 = integrate_over(model, erode_dilate(a, eps),
                                      [&](double x) { return model.weighted0(x); });
    const double in1 = integrate_over(model, erode_dilate(a, -eps),
                                      [&](double x) { return model.weighted1(x); });
    return std::clamp(in0 + model.w1() - in1, 0.0, 1.0);
}

struct AssumptionReport {
    std::vector<double> crossings;
    std::vector<double> derivative_gaps;  // w0 rho0' - w1 rho1' at each crossing
    double min_abs_gap = inf;
    bool finite_count_ok = true;
    bool nondegenerate_ok = true;
};

// Transversality at each crossing, plus a scan for stretches where the class
// gap vanishes identically (which would mean infinitely many crossings).
inline AssumptionReport check_assumptions(const ClassificationModel& model,
                                          const std::vector<double>& crossings,
                                          double threshold = 1e-8,
                                          std::size_t max_crossings = 64) {
    detail::require_1d(model, "check_assumptions");
    AssumptionReport rep;
    rep.crossings = crossings;
    for (double t : crossings) {
        const double g = model.dweighted0(t) - model.dweighted1(t);
        rep.derivative_gaps.push_back(g);
        rep.min_abs_gap = std::min(rep.min_abs_gap, std::abs(g));
    }
    rep.nondegenerate_ok = rep.min_abs_gap > threshold;

    const Window w = default_window(model);
    const int n = 1000;
    bool prev_flat = false;
    for (int i = 0; i <= n; ++i) {
        const double x = w.lo + w.width() * i / n;
        const bool flat = std::abs(model.log_ratio(x)) <= 1e-12;
        if (flat && prev_flat) rep.finite_count_ok = false;
        prev_flat = flat;
    }
    if (crossings.size() > max_crossings) rep.finite_count_ok = false;
    return rep;
}

}  // namespace advflow

#endif  // ADVFLOW_CLASSIFIER1D_HPP
