#ifndef ADVFLOW_EVOLUTION1D_HPP
#define ADVFLOW_EVOLUTION1D_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "classifier1d.hpp"
#include "density.hpp"
#include "errors.hpp"
#include "interval_union.hpp"
#include "rk4.hpp"

namespace advflow {

enum class Side { left, right };

inline const char* to_string(Side s) noexcept { return s == Side::left ? "left" : "right"; }

enum class EventKind { denominator_small, interval_collision, residual_blowup };

inline const char* to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::denominator_small: return "denominator_small";
        case EventKind::interval_collision: return "interval_collision";
        case EventKind::residual_blowup: return "residual_blowup";
    }
    return "unknown";
}

struct EvolutionEvent {
    double eps = 0.0;
    EventKind kind = EventKind::denominator_small;
    std::string detail;
    std::size_t endpoint_index = 0;  // interval index
    Side side = Side::right;
    double position = 0.0;
};

// Boundary of the evolving set at one eps. Residual vectors are aligned with
// lefts/rights and hold 0 for infinite endpoints.
struct BoundarySnapshot {
    double eps = 0.0;
    std::vector<double> lefts;
    std::vector<double> rights;
    std::vector<double> left_residuals;
    std::vector<double> right_residuals;

    std::size_t size() const noexcept { return lefts.size(); }

    IntervalUnion as_set() const {
        std::vector<Interval> v;
        for (std::size_t i = 0; i < lefts.size(); ++i) v.push_back({lefts[i], rights[i]});
        return IntervalUnion(std::move(v));
    }

    double max_abs_residual() const noexcept {
        double m = 0.0;
        for (double r : left_residuals) m = std::max(m, std::abs(r));
        for (double r : right_residuals) m = std::max(m, std::abs(r));
        return m;
    }
};

struct BoundaryTrajectory {
    std::vector<BoundarySnapshot> snapshots;
    std::vector<EvolutionEvent> events;

    bool halted() const noexcept { return !events.empty(); }
    const BoundarySnapshot& back() const { return snapshots.back(); }
};

struct EvolutionThresholds {
    double degeneracy = 1e-8;  // relative to the derivative scale
    double residual = 1e-6;
};

namespace detail {

// Peak |rho'| over all weighted components; the reference scale for the
// degeneracy guard where the local derivatives are themselves tiny.
inline double derivative_scale(const ClassificationModel& model) {
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi * std::numbers::e);
    double s = 0.0;
    for (const auto& g : model.rho0().components())
        s = std::max(s, model.w0() * g.weight() * c / g.s11());
    for (const auto& g : model.rho1().components())
        s = std::max(s, model.w1() * g.weight() * c / g.s11());
    return s;
}

struct Quotient {
    double numerator;
    double denominator;
    double scale;
};

inline Quotient right_terms(const ClassificationModel& m, double b, double eps) {
    const double d0 = m.dweighted0(b + eps);
    const double d1 = m.dweighted1(b - eps);
    return {-(d0 + d1), d0 - d1, std::max({std::abs(d0), std::abs(d1), derivative_scale(m)})};
}

inline Quotient left_terms(const ClassificationModel& m, double a, double eps) {
    const double d1 = m.dweighted1(a + eps);
    const double d0 = m.dweighted0(a - eps);
    return {-(d1 + d0), d1 - d0, std::max({std::abs(d0), std::abs(d1), derivative_scale(m)})};
}

inline double checked_quotient(const Quotient& q, double rel_threshold, const char* who) {
    if (!(std::abs(q.denominator) > rel_threshold * q.scale))
        throw DegeneracyError(std::string(who) + ": denominator " + std::to_string(q.denominator) +
                                  " below degeneracy threshold",
                              q.denominator);
    return q.numerator / q.denominator;
}

}  // namespace detail

// db/deps = -(w0 rho0'(b+eps) + w1 rho1'(b-eps)) / (w0 rho0'(b+eps) - w1 rho1'(b-eps))
inline double velocity_right(const ClassificationModel& model, double b, double eps,
                             double rel_threshold = 1e-8) {
    detail::require_1d(model, "velocity_right");
    return detail::checked_quotient(detail::right_terms(model, b, eps), rel_threshold,
                                    "velocity_right");
}

// da/deps = -(w1 rho1'(a+eps) + w0 rho0'(a-eps)) / (w1 rho1'(a+eps) - w0 rho0'(a-eps))
inline double velocity_left(const ClassificationModel& model, double a, double eps,
                            double rel_threshold = 1e-8) {
    detail::require_1d(model, "velocity_left");
    return detail::checked_quotient(detail::left_terms(model, a, eps), rel_threshold,
                                    "velocity_left");
}

inline double velocity(const ClassificationModel& model, double x, Side side, double eps,
                       double rel_threshold = 1e-8) {
    return side == Side::right ? velocity_right(model, x, eps, rel_threshold)
                               : velocity_left(model, x, eps, rel_threshold);
}

// Defect of the balance condition: w1 rho1(b-eps) - w0 rho0(b+eps) at a right
// endpoint, w1 rho1(a+eps) - w0 rho0(a-eps) at a left one.
inline double necessary_residual(const ClassificationModel& model, double x, Side side,
                                 double eps) {
    if (side == Side::right) return model.weighted1(x - eps) - model.weighted0(x + eps);
    return model.weighted1(x + eps) - model.weighted0(x - eps);
}

// d/dx of necessary_residual.
inline double necessary_residual_slope(const ClassificationModel& model, double x, Side side,
                                       double eps) {
    if (side == Side::right) return model.dweighted1(x - eps) - model.dweighted0(x + eps);
    return model.dweighted1(x + eps) - model.dweighted0(x - eps);
}

inline BoundarySnapshot make_snapshot(const ClassificationModel& model, const IntervalUnion& set,
                                      double eps) {
    BoundarySnapshot s;
    s.eps = eps;
    for (const auto& p : set.intervals()) {
        s.lefts.push_back(p.lo);
        s.rights.push_back(p.hi);
        s.left_residuals.push_back(std::isfinite(p.lo) ? necessary_residual(model, p.lo, Side::left, eps) : 0.0);
        s.right_residuals.push_back(std::isfinite(p.hi) ? necessary_residual(model, p.hi, Side::right, eps) : 0.0);
    }
    return s;
}

inline std::vector<EvolutionEvent> detect_events(const ClassificationModel& model,
                                                 const BoundarySnapshot& snap,
                                                 const EvolutionThresholds& th = {}) {
    std::vector<EvolutionEvent> out;
    const double eps = snap.eps;
    auto check_endpoint = [&](std::size_t i, Side side, double x, double residual) {
        if (!std::isfinite(x)) return;
        const auto q = side == Side::right ? detail::right_terms(model, x, eps)
                                           : detail::left_terms(model, x, eps);
        if (!(std::abs(q.denominator) > th.degeneracy * q.scale))
            out.push_back({eps, EventKind::denominator_small,
                           std::string(to_string(side)) + " endpoint " + std::to_string(i) +
                               ": denominator " + std::to_string(q.denominator),
                           i, side, x});
        if (!(std::abs(residual) <= th.residual))
            out.push_back({eps, EventKind::residual_blowup,
                           std::string(to_string(side)) + " endpoint " + std::to_string(i) +
                               ": residual " + std::to_string(residual),
                           i, side, x});
    };
    for (std::size_t i = 0; i < snap.size(); ++i) {
        check_endpoint(i, Side::left, snap.lefts[i], snap.left_residuals[i]);
        check_endpoint(i, Side::right, snap.rights[i], snap.right_residuals[i]);
        if (snap.rights[i] - snap.lefts[i] <= 2.0 * eps)
            out.push_back({eps, EventKind::interval_collision,
                           "interval " + std::to_string(i) + " vanishes under erosion", i,
                           Side::right, snap.rights[i]});
        if (i + 1 < snap.size() && snap.rights[i] + eps >= snap.lefts[i + 1] - eps)
            out.push_back({eps, EventKind::interval_collision,
                           "intervals " + std::to_string(i) + " and " + std::to_string(i + 1) +
                               " merge under dilation",
                           i, Side::right, snap.rights[i]});
    }
    return out;
}

struct EvolveOptions {
    double step = 1e-3;
    bool project = true;
    int newton_iterations = 1;
    int max_halvings = 6;
    EvolutionThresholds thresholds{};
};

namespace detail {

// Advances one endpoint from eps0 to eps0 + h. Throws DegeneracyError.
inline double advance_endpoint(const ClassificationModel& model, double x, Side side,
                               double eps0, double h, const EvolveOptions& opt) {
    const double thr = opt.thresholds.degeneracy;
    auto f = [&](double e, double y) { return velocity(model, y, side, e, thr); };
    double y = rk4_step(f, eps0, x, h);
    if (opt.project) {
        const double e1 = eps0 + h;
        for (int k = 0; k < opt.newton_iterations; ++k) {
            const double slope = necessary_residual_slope(model, y, side, e1);
            if (slope == 0.0) break;
            y -= necessary_residual(model, y, side, e1) / slope;
        }
    }
    return y;
}

}  // namespace detail

// Integrates every finite endpoint independently with RK4 from the initial
// set, projecting back onto the balance condition after each step. Stops at
// the first event.
inline BoundaryTrajectory evolve(const ClassificationModel& model, const IntervalUnion& initial,
                                 double eps_max, const EvolveOptions& opt = {}) {
    detail::require_1d(model, "evolve");
    if (!(eps_max > 0.0)) throw ConfigError("evolve: eps_max must be positive");
    if (!(opt.step > 0.0)) throw ConfigError("evolve: step must be positive");

    BoundaryTrajectory traj;
    traj.snapshots.push_back(make_snapshot(model, initial, 0.0));
    if (auto ev = detect_events(model, traj.snapshots.front(), opt.thresholds); !ev.empty())
        throw EvolutionError("evolve: event before the first step: " + ev.front().detail);

    const auto nsteps = static_cast<std::size_t>(std::ceil(eps_max / opt.step - 1e-12));
    const double h = eps_max / static_cast<double>(nsteps);

    for (std::size_t k = 0; k < nsteps; ++k) {
        const BoundarySnapshot& prev = traj.snapshots.back();
        const double e0 = static_cast<double>(k) * h;
        const double e1 = k + 1 == nsteps ? eps_max : static_cast<double>(k + 1) * h;

        BoundarySnapshot next;
        next.eps = e1;
        std::optional<EvolutionEvent> failure;

        auto move = [&](std::size_t i, Side side, double x) -> double {
            if (!std::isfinite(x) || failure) return x;
            // Retry with successively halved substeps until the projected
            // endpoint satisfies the balance condition.
            for (int halving = 0; halving <= opt.max_halvings; ++halving) {
                const int sub = 1 << halving;
                const double hs = (e1 - e0) / sub;
                double y = x;
                try {
                    for (int j = 0; j < sub; ++j) y = detail::advance_endpoint(model, y, side, e0 + j * hs, hs, opt);
                } catch (const DegeneracyError& err) {
                    failure = EvolutionEvent{e1, EventKind::denominator_small, err.what(), i, side, x};
                    return x;
                }
                if (!opt.project || std::abs(necessary_residual(model, y, side, e1)) <= opt.thresholds.residual)
                    return y;
            }
            failure = EvolutionEvent{e1, EventKind::residual_blowup,
                                     std::string(to_string(side)) + " endpoint " + std::to_string(i) +
                                         ": projection failed after step halving",
                                     i, side, x};
            return x;
        };

        for (std::size_t i = 0; i < prev.size(); ++i) {
            next.lefts.push_back(move(i, Side::left, prev.lefts[i]));
            next.rights.push_back(move(i, Side::right, prev.rights[i]));
        }
        if (failure) {
            traj.events.push_back(*failure);
            break;
        }
        for (std::size_t i = 0; i < next.size(); ++i) {
            next.left_residuals.push_back(std::isfinite(next.lefts[i]) ? necessary_residual(model, next.lefts[i], Side::left, e1) : 0.0);
            next.right_residuals.push_back(std::isfinite(next.rights[i]) ? necessary_residual(model, next.rights[i], Side::right, e1) : 0.0);
        }
        EvolutionThresholds th = opt.thresholds;
        if (!opt.project) th.residual = inf;  // unprojected runs are diagnostics only
        if (auto ev = detect_events(model, next, th); !ev.empty()) {
            traj.events.push_back(ev.front());
            break;
        }
        traj.snapshots.push_back(std::move(next));
    }
    return traj;
}

inline BoundaryTrajectory evolve(const ClassificationModel& model, const IntervalUnion& initial,
                                 double eps_max, double step) {
    EvolveOptions opt;
    opt.step = step;
    return evolve(model, initial, eps_max, opt);
}

}  // namespace advflow

#endif  // ADVFLOW_EVOLUTION1D_HPP
