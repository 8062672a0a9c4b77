#ifndef ADVFLOW_FLOW2D_HPP
#define ADVFLOW_FLOW2D_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "contour.hpp"
#include "curve2d.hpp"
#include "errors.hpp"
#include "field2d.hpp"
#include "vec2.hpp"

namespace advflow {

namespace detail {
inline std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}
}  // namespace detail

// Approximate normal speed: v = -(grad rho . nu + rho kappa) / ((w0 grad rho0 - w1 grad rho1) . nu).
// The denominator is oriented so that a class-1 disk under a uniform total
// density shrinks (v < 0). Where every density term underflows v is 0.
template <ClassField2D F>
double normal_speed(const F& f, Vec2 x, Vec2 nu, double kappa, double rel_threshold = 1e-8) {
    const Vec2 g0 = f.grad_weighted0(x);
    const Vec2 g1 = f.grad_weighted1(x);
    const double rho = f.weighted0(x) + f.weighted1(x);
    const double n0 = dot(g0, nu);
    const double n1 = dot(g1, nu);
    const double den = n0 - n1;
    const double num = n0 + n1 + rho * kappa;
    if (rho == 0.0 && n0 == 0.0 && n1 == 0.0) return 0.0;
    if (!(std::abs(den) > rel_threshold * (std::abs(n0) + std::abs(n1))) || den == 0.0)
        throw DegeneracyError("normal_speed: transversality fails (denominator " + std::to_string(den) + ")", den);
    return -num / den;
}

// w1 rho1(x - eps nu)|1 - kappa eps| - w0 rho0(x + eps nu)|1 + kappa eps| per vertex.
template <ClassField2D F>
std::vector<double> necessary_residual_2d(const F& f, const Curve2D& c, double eps) {
    const auto geo = normals_and_curvature(c);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2 nu = geo[i].normal;
        const double k = geo[i].kappa;
        out[i] = f.weighted1(c[i] - eps * nu) * std::abs(1.0 - k * eps) -
                 f.weighted0(c[i] + eps * nu) * std::abs(1.0 + k * eps);
    }
    return out;
}

// First-order condition of the perimeter-regularised risk:
// w0 rho0 - w1 rho1 + eps (grad rho . nu + rho kappa).
template <ClassField2D F>
std::vector<double> perimeter_regularization_residual(const F& f, const Curve2D& c, double eps) {
    const auto geo = normals_and_curvature(c);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2 x = c[i];
        const double rho = field_rho(f, x);
        out[i] = f.weighted0(x) - f.weighted1(x) +
                 eps * (dot(field_grad_rho(f, x), geo[i].normal) + rho * geo[i].kappa);
    }
    return out;
}

// Solves a x_{i-1} + b x_i + c x_{i+1} = d. With `cyclic`, row 0 couples to
// x_{n-1} through a[0] and row n-1 to x_0 through c[n-1] (Sherman-Morrison).
inline std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b,
                                             std::vector<double> c, std::vector<double> d,
                                             bool cyclic) {
    const std::size_t n = b.size();
    if (n == 0) return {};
    auto thomas = [&](const std::vector<double>& bb, std::vector<double> rhs) {
        std::vector<double> cp(n), x(n);
        double den = bb[0];
        if (den == 0.0) throw GeometryError("tridiagonal solve: zero pivot");
        cp[0] = c[0] / den;
        rhs[0] /= den;
        for (std::size_t i = 1; i < n; ++i) {
            den = bb[i] - a[i] * cp[i - 1];
            if (den == 0.0) throw GeometryError("tridiagonal solve: zero pivot");
            cp[i] = c[i] / den;
            rhs[i] = (rhs[i] - a[i] * rhs[i - 1]) / den;
        }
        x[n - 1] = rhs[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = rhs[i] - cp[i] * x[i + 1];
        return x;
    };
    if (!cyclic || n < 3) {
        if (cyclic && n < 3) throw GeometryError("tridiagonal solve: cyclic system needs n >= 3");
        return thomas(b, std::move(d));
    }
    const double beta = a[0];       // row 0, column n-1
    const double alpha = c[n - 1];  // row n-1, column 0
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;
    std::vector<double> x = thomas(bb, d);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const std::vector<double> z = thomas(bb, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    return x;
}

struct ProjectionResult {
    int iterations = 0;
    double max_residual = 0.0;
    bool converged = false;
};

// Moves each sliding end of an open curve to where the line through its two
// inner neighbours meets the line along its slide direction. A zero direction,
// or a neighbour line nearly parallel to it, leaves the end where it is.
inline void reattach_ends(Curve2D& c, std::pair<Vec2, Vec2> slide) {
    const std::size_t n = c.size();
    if (c.closed() || n < 3) return;
    auto place = [&](std::size_t end, std::size_t nb, std::size_t nb2, Vec2 dir) {
        if (dir == Vec2{}) return;
        const Vec2 d = c[nb] - c[nb2];
        const double den = cross(d, dir);
        if (!(std::abs(den) > 0.2 * norm(d) * norm(dir))) return;
        const double t = cross(c[end] - c[nb], dir) / den;
        c[end] = c[nb] + t * d;
    };
    place(0, 1, 2, slide.first);
    place(n - 1, n - 2, n - 3, slide.second);
}

// Newton iteration moving every vertex along its normal until the curvature-
// weighted balance condition holds. The Jacobian couples each vertex to its
// neighbours through the discrete curvature, which keeps the solve stable at
// spacings where a vertex-by-vertex correction would blow up. Ends of open
// curves are not projected; they follow their neighbours along the given
// slide directions (see reattach_ends).
template <ClassField2D F>
ProjectionResult project_front(const F& f, Curve2D& c, double eps, int max_iterations = 12,
                               double tol = 1e-10, std::pair<Vec2, Vec2> slide = {}) {
    ProjectionResult res;
    const std::size_t n = c.size();
    for (int it = 0; it <= max_iterations; ++it) {
        const auto geo = normals_and_curvature(c);
        std::vector<double> p(n), sub(n, 0.0), diag(n, 1.0), sup(n, 0.0);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool end = !c.closed() && (i == 0 || i + 1 == n);
            const Vec2 nu = geo[i].normal;
            const double k = geo[i].kappa;
            const Vec2 xin = c[i] - eps * nu;
            const Vec2 xout = c[i] + eps * nu;
            const double s1 = 1.0 - k * eps >= 0.0 ? 1.0 : -1.0;
            const double s0 = 1.0 + k * eps >= 0.0 ? 1.0 : -1.0;
            const double f1 = f.weighted1(xin);
            const double f0 = f.weighted0(xout);
            const double value = f1 * s1 * (1.0 - k * eps) - f0 * s0 * (1.0 + k * eps);
            if (end) {
                p[i] = 0.0;
                continue;
            }
            p[i] = value;
            worst = std::max(worst, std::abs(value));
            const double dp_dd = dot(f.grad_weighted1(xin), nu) * s1 * (1.0 - k * eps) -
                                 dot(f.grad_weighted0(xout), nu) * s0 * (1.0 + k * eps);
            const double dp_dk = -eps * (f1 * s1 + f0 * s0);
            const std::size_t im = i == 0 ? n - 1 : i - 1;
            const std::size_t ip = i + 1 == n ? 0 : i + 1;
            const double hm = norm(c[i] - c[im]);
            const double hp = norm(c[ip] - c[i]);
            // Moving the neighbours also turns the normal at i by
            // -(d_{i+1} - d_{i-1}) / (hm + hp) along the tangent.
            const Vec2 dp_dnu = -eps * (s1 * (1.0 - k * eps) * f.grad_weighted1(xin) +
                                        s0 * (1.0 + k * eps) * f.grad_weighted0(xout));
            const double turn = -dot(dp_dnu, left_perp(nu)) / (hm + hp);
            diag[i] = dp_dd + dp_dk * (2.0 / (hm * hp) - k * k);
            sub[i] = dp_dk * (-2.0 / (hm * (hm + hp))) - turn;
            sup[i] = dp_dk * (-2.0 / (hp * (hm + hp))) + turn;
        }
        res.iterations = it;
        res.max_residual = worst;
        if (worst <= tol) {
            res.converged = true;
            return res;
        }
        if (it == max_iterations) break;
        if (!c.closed()) {
            sup[0] = 0.0;
            sub[n - 1] = 0.0;
            // A reattached end moves by about 2 d_1 - d_2 along the normal.
            if (n >= 4 && slide.first != Vec2{}) {
                diag[1] += 2.0 * sub[1];
                sup[1] -= sub[1];
                sub[1] = 0.0;
            }
            if (n >= 4 && slide.second != Vec2{}) {
                diag[n - 2] += 2.0 * sup[n - 2];
                sub[n - 2] -= sup[n - 2];
                sup[n - 2] = 0.0;
            }
        }
        for (auto& v : p) v = -v;
        const auto delta = solve_tridiagonal(sub, diag, sup, p, c.closed());
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            c[i] += delta[i] * geo[i].normal;
            moved = std::max(moved, std::abs(delta[i]));
        }
        reattach_ends(c, slide);
        // Round-off floor: the update no longer moves anything measurable.
        if (moved <= 1e-14 && worst <= 1e3 * tol) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

enum class CurveEventKind { self_intersection, transversality, projection_failure };

inline const char* to_string(CurveEventKind k) noexcept {
    switch (k) {
        case CurveEventKind::self_intersection: return "self_intersection";
        case CurveEventKind::transversality: return "transversality";
        case CurveEventKind::projection_failure: return "projection_failure";
    }
    return "unknown";
}

struct CurveEvent {
    double eps = 0.0;
    CurveEventKind kind = CurveEventKind::transversality;
    std::string detail;
};

struct CurveSnapshot {
    double eps = 0.0;
    Curve2D curve;
    std::vector<VertexGeometry> geometry;
    std::vector<double> residual;  // curvature-weighted balance defect per vertex
};

struct CurveTrajectory {
    std::vector<CurveSnapshot> snapshots;
    std::vector<CurveEvent> events;
    std::size_t steps = 0;

    bool halted() const noexcept { return !events.empty(); }
};

struct FlowOptions {
    double spacing = 0.0;          // 0 means the curve's own target spacing
    std::vector<double> snapshots;  // empty means every multiple of the step
    bool project = true;
    int newton_iterations = 12;
    double projection_tol = 1e-10;
    double transversality = 1e-6;  // relative size of the speed denominator
    double cfl = 0.25;
    std::size_t max_steps = 2000000;
    // Open curves: ends lying on a side of this window slide along it. Without
    // a window, or off its sides, the ends stay fixed.
    std::optional<Window2D> window;
};

template <ClassField2D F>
CurveSnapshot make_curve_snapshot(const F& f, const Curve2D& c, double eps) {
    return {eps, c, normals_and_curvature(c), necessary_residual_2d(f, c, eps)};
}

// Front tracking: forward-Euler steps with the approximate normal speed,
// arclength resampling, then Newton projection onto the balance condition at
// the new eps. Steps obey a parabolic stability cap and land exactly on the
// requested snapshot values.
template <ClassField2D F>
CurveTrajectory evolve_curve(const F& f, const Curve2D& initial, double eps_max, double step,
                             FlowOptions opt = {}) {
    if (!(eps_max >= 0.0)) throw ConfigError("evolve_curve: eps_max must be nonnegative");
    if (!(step > 0.0)) throw ConfigError("evolve_curve: step must be positive");
    double spacing = opt.spacing > 0.0 ? opt.spacing : initial.spacing();
    if (!(spacing > 0.0)) spacing = initial.length() / static_cast<double>(initial.edge_count());

    std::vector<double> marks = opt.snapshots;
    if (marks.empty()) {
        const auto n = static_cast<std::size_t>(std::ceil(eps_max / step - 1e-9));
        for (std::size_t k = 0; k <= n; ++k) marks.push_back(std::min(eps_max, static_cast<double>(k) * step));
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    std::erase_if(marks, [&](double e) { return e < 0.0 || e > eps_max; });

    CurveTrajectory traj;
    Curve2D c = initial;
    c.set_spacing(spacing);
    double eps = 0.0;
    std::size_t next_mark = 0;

    // Direction an open end may slide in, or zero when it is pinned.
    auto slide_dir = [&](std::size_t i, Vec2 normal) -> Vec2 {
        if (c.closed() || !opt.window) return {};
        const Vec2 s = detail::window_side(*opt.window, c[i]);
        return std::abs(dot(s, normal)) >= 0.2 ? s : Vec2{};
    };
    auto end_slides = [&]() -> std::pair<Vec2, Vec2> {
        if (c.closed() || !opt.window) return {};
        const auto geo = normals_and_curvature(c);
        const std::size_t n = c.size();
        return {slide_dir(0, geo[0].normal), slide_dir(n - 1, geo[n - 1].normal)};
    };
    auto project = [&](double e) -> bool {
        if (!opt.project) return true;
        ProjectionResult pr;
        try {
            pr = project_front(f, c, e, opt.newton_iterations, opt.projection_tol, end_slides());
        } catch (const GeometryError& err) {
            traj.events.push_back({e, CurveEventKind::projection_failure, err.what()});
            return false;
        }
        if (!pr.converged) {
            traj.events.push_back({e, CurveEventKind::projection_failure,
                                   "projection stalled at residual " + detail::fmt_sci(pr.max_residual)});
            return false;
        }
        return true;
    };
    auto record = [&]() {
        while (next_mark < marks.size() && marks[next_mark] <= eps + 1e-15) {
            if (std::abs(marks[next_mark] - eps) <= 1e-12) traj.snapshots.push_back(make_curve_snapshot(f, c, eps));
            ++next_mark;
        }
    };

    if (!project(0.0)) return traj;
    record();

    while (eps < eps_max - 1e-15 && next_mark < marks.size()) {
        if (++traj.steps > opt.max_steps) throw EvolutionError("evolve_curve: step budget exhausted");
        const auto geo = normals_and_curvature(c);
        const auto slides = end_slides();
        std::vector<double> v(c.size(), 0.0);
        double stiff = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c.closed() && (i == 0 || i + 1 == c.size())) continue;
            const Vec2 x = c[i];
            const Vec2 nu = geo[i].normal;
            const double n0 = dot(f.grad_weighted0(x), nu);
            const double n1 = dot(f.grad_weighted1(x), nu);
            const double den = n0 - n1;
            const double rho = field_rho(f, x);
            if (rho == 0.0 && n0 == 0.0 && n1 == 0.0) continue;
            if (!(std::abs(den) > opt.transversality * (std::abs(n0) + std::abs(n1)))) {
                traj.events.push_back({eps, CurveEventKind::transversality,
                                       "vertex " + std::to_string(i) + ": speed denominator " + std::to_string(den)});
                return traj;
            }
            v[i] = normal_speed(f, x, nu, geo[i].kappa, 0.0);
            stiff = std::max(stiff, rho / std::abs(den));
        }
        const auto [hmin, hmax] = c.spacing_range();
        double dt = std::min(step, marks[next_mark] - eps);
        if (stiff > 0.0) dt = std::min(dt, opt.cfl * hmin * hmin / stiff);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += dt * v[i] * geo[i].normal;
        reattach_ends(c, slides);
        eps = marks[next_mark] - eps <= dt ? marks[next_mark] : eps + dt;

        c = resample(c, spacing);
        if (!project(eps)) return traj;
        if (self_intersects(c)) {
            traj.events.push_back({eps, CurveEventKind::self_intersection, "front crosses itself"});
            return traj;
        }
        record();
    }
    return traj;
}

}  // namespace advflow

#endif  // ADVFLOW_FLOW2D_HPP
