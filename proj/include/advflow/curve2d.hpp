#ifndef ADVFLOW_CURVE2D_HPP
#define ADVFLOW_CURVE2D_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "vec2.hpp"

namespace advflow {

// Oriented polyline. The class-1 side is on the left of the traversal, so a
// closed curve around a class-1 region runs counterclockwise and the outward
// normal points to the right. Open curves end on the boundary of a window.
class Curve2D {
public:
    Curve2D() = default;
    Curve2D(std::vector<Vec2> vertices, bool closed, double spacing = 0.0)
        : vertices_(std::move(vertices)), closed_(closed), spacing_(spacing) {}

    static Curve2D circle(Vec2 centre, double radius, std::size_t n) {
        std::vector<Vec2> v;
        v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
            v.push_back(centre + radius * Vec2{std::cos(th), std::sin(th)});
        }
        return {std::move(v), true, 2.0 * std::numbers::pi * radius / static_cast<double>(n)};
    }

    const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
    std::vector<Vec2>& vertices() noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const Vec2& operator[](std::size_t i) const { return vertices_[i]; }
    Vec2& operator[](std::size_t i) { return vertices_[i]; }
    bool closed() const noexcept { return closed_; }
    double spacing() const noexcept { return spacing_; }
    void set_spacing(double h) noexcept { spacing_ = h; }

    std::size_t edge_count() const noexcept {
        if (vertices_.size() < 2) return 0;
        return closed_ ? vertices_.size() : vertices_.size() - 1;
    }
    Vec2 edge(std::size_t k) const { return vertices_[(k + 1) % vertices_.size()] - vertices_[k]; }

    double length() const {
        double s = 0.0;
        for (std::size_t k = 0; k < edge_count(); ++k) s += norm(edge(k));
        return s;
    }

    // Shoelace area; positive for counterclockwise closed curves.
    double signed_area() const {
        double a = 0.0;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) a += cross(vertices_[i], vertices_[(i + 1) % n]);
        return 0.5 * a;
    }

    std::pair<double, double> spacing_range() const {
        double lo = inf_(), hi = 0.0;
        for (std::size_t k = 0; k < edge_count(); ++k) {
            const double h = norm(edge(k));
            lo = std::min(lo, h);
            hi = std::max(hi, h);
        }
        return {lo, hi};
    }

    void reverse() { std::reverse(vertices_.begin(), vertices_.end()); }

private:
    static constexpr double inf_() { return std::numeric_limits<double>::infinity(); }

    std::vector<Vec2> vertices_;
    bool closed_ = true;
    double spacing_ = 0.0;
};

struct VertexGeometry {
    Vec2 normal;   // outward unit normal (right of traversal)
    double kappa;  // positive where the curve bends toward its left side
};

// Menger curvature of a vertex triple: 1/(circumradius), signed by turning
// direction. Collinear or coincident triples give 0.
inline double menger_curvature(Vec2 p0, Vec2 p1, Vec2 p2) noexcept {
    const Vec2 a = p1 - p0;
    const Vec2 b = p2 - p1;
    const double den = norm(a) * norm(b) * norm(p2 - p0);
    if (!(den > 0.0)) return 0.0;
    return 2.0 * cross(a, b) / den;
}

// Bisector normals and Menger curvatures. On open curves the end vertices
// take the normal of their single edge and the curvature of their neighbour.
inline std::vector<VertexGeometry> normals_and_curvature(const Curve2D& c) {
    const std::size_t n = c.size();
    if (n < 3) throw GeometryError("curve: need at least three vertices");
    std::vector<VertexGeometry> out(n);
    auto at = [&](std::size_t i) -> const Vec2& { return c[i]; };
    for (std::size_t i = 0; i < n; ++i) {
        const bool first = i == 0;
        const bool last = i + 1 == n;
        if (!c.closed() && (first || last)) continue;
        const Vec2& p0 = at(first ? n - 1 : i - 1);
        const Vec2& p1 = at(i);
        const Vec2& p2 = at(last ? 0 : i + 1);
        Vec2 t = normalized(p1 - p0) + normalized(p2 - p1);
        if (norm(t) == 0.0) t = p2 - p1;
        out[i] = {right_perp(normalized(t)), menger_curvature(p0, p1, p2)};
    }
    if (!c.closed()) {
        out[0] = {right_perp(normalized(c[1] - c[0])), out[1].kappa};
        out[n - 1] = {right_perp(normalized(c[n - 1] - c[n - 2])), out[n - 2].kappa};
    }
    return out;
}

namespace detail {

inline Vec2 catmull_rom(Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3, double u) noexcept {
    const double u2 = u * u;
    const double u3 = u2 * u;
    return 0.5 * ((2.0 * p1) + (p2 - p0) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                  (3.0 * p1 - p0 - 3.0 * p2 + p3) * u3);
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) noexcept {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace detail

// Resamples to (nearly) uniform arclength spacing with a Catmull-Rom spline
// through the current vertices. Open curves keep both end points.
inline Curve2D resample(const Curve2D& c, double spacing) {
    if (!(spacing > 0.0)) throw GeometryError("resample: spacing must be positive");
    const std::size_t n = c.size();
    if (n < 2) throw GeometryError("resample: need at least two vertices");
    const std::size_t m = c.edge_count();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) cum[k + 1] = cum[k] + norm(c.edge(k));
    const double total = cum[m];
    if (!(total > 0.0)) throw GeometryError("resample: curve has zero length");

    auto vertex = [&](long i) -> Vec2 {
        const long ln = static_cast<long>(n);
        if (c.closed()) return c[static_cast<std::size_t>(((i % ln) + ln) % ln)];
        if (i < 0) return 2.0 * c[0] - c[1];
        if (i >= ln) return 2.0 * c[n - 1] - c[n - 2];
        return c[static_cast<std::size_t>(i)];
    };

    const std::size_t segs = std::max<std::size_t>(c.closed() ? 8 : 2,
                                                   static_cast<std::size_t>(std::lround(total / spacing)));
    std::vector<Vec2> out;
    out.reserve(segs + 1);
    std::size_t k = 0;
    const std::size_t count = c.closed() ? segs : segs + 1;
    for (std::size_t j = 0; j < count; ++j) {
        const double s = total * static_cast<double>(j) / static_cast<double>(segs);
        while (k + 1 < m && cum[k + 1] <= s) ++k;
        const double len = cum[k + 1] - cum[k];
        const double u = len > 0.0 ? std::clamp((s - cum[k]) / len, 0.0, 1.0) : 0.0;
        const long i = static_cast<long>(k);
        out.push_back(detail::catmull_rom(vertex(i - 1), vertex(i), vertex(i + 1), vertex(i + 2), u));
    }
    if (!c.closed()) {
        out.front() = c[0];
        out.back() = c[n - 1];
    }
    return {std::move(out), c.closed(), spacing};
}

// True when two non-adjacent edges cross.
inline bool self_intersects(const Curve2D& c) {
    const std::size_t m = c.edge_count();
    struct Box { double x0, x1, y0, y1; };
    std::vector<Box> boxes(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Vec2 a = c[k];
        const Vec2 b = c[(k + 1) % c.size()];
        boxes[k] = {std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 2; j < m; ++j) {
            if (c.closed() && i == 0 && j + 1 == m) continue;
            const Box& p = boxes[i];
            const Box& q = boxes[j];
            if (p.x1 < q.x0 || q.x1 < p.x0 || p.y1 < q.y0 || q.y1 < p.y0) continue;
            if (detail::segments_cross(c[i], c[(i + 1) % c.size()], c[j], c[(j + 1) % c.size()]))
                return true;
        }
    }
    return false;
}

// Hausdorff distance between a closed polyline and a circle. The distance
// from a point to the circle is ||p - centre| - r|, and along an edge |p - centre|
// peaks at a vertex and bottoms out at the foot of the perpendicular, so the
// curve-to-circle half is exact. When the curve winds once around the centre
// with monotone polar angle, radial projection shows the circle-to-curve half
// is no larger; otherwise it is estimated on a dense sample of the circle.
inline double hausdorff_to_circle(const Curve2D& c, Vec2 centre, double radius) {
    const std::size_t n = c.size();
    double d = 0.0;
    for (std::size_t k = 0; k < c.edge_count(); ++k) {
        const Vec2 a = c[k];
        const Vec2 b = c[(k + 1) % n];
        d = std::max(d, std::abs(norm(a - centre) - radius));
        const Vec2 e = b - a;
        const double ee = dot(e, e);
        const double u = ee > 0.0 ? std::clamp(dot(centre - a, e) / ee, 0.0, 1.0) : 0.0;
        d = std::max(d, std::abs(norm(a + u * e - centre) - radius));
    }
    bool star = c.closed();
    double turn = 0.0;
    for (std::size_t k = 0; star && k < n; ++k) {
        const double step = std::atan2(cross(c[k] - centre, c[(k + 1) % n] - centre),
                                       dot(c[k] - centre, c[(k + 1) % n] - centre));
        if (step <= 0.0) star = false;
        turn += step;
    }
    if (star && std::abs(turn - 2.0 * std::numbers::pi) < 1e-9) return d;

    const std::size_t samples = 1 << 16;
    for (std::size_t j = 0; j < samples; ++j) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(samples);
        const Vec2 q = centre + radius * Vec2{std::cos(th), std::sin(th)};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < c.edge_count(); ++k) {
            const Vec2 a = c[k];
            const Vec2 e = c[(k + 1) % n] - a;
            const double ee = dot(e, e);
            const double u = ee > 0.0 ? std::clamp(dot(q - a, e) / ee, 0.0, 1.0) : 0.0;
            best = std::min(best, norm(a + u * e - q));
        }
        d = std::max(d, best);
    }
    return d;
}

// Mean distance from the vertices to the centre.
inline double mean_radius(const Curve2D& c, Vec2 centre = {}) {
    double s = 0.0;
    for (const auto& p : c.vertices()) s += norm(p - centre);
    return s / static_cast<double>(c.size());
}

}  // namespace advflow

#endif  // ADVFLOW_CURVE2D_HPP
