#ifndef ADVFLOW_CONTOUR_HPP
#define ADVFLOW_CONTOUR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "curve2d.hpp"
#include "errors.hpp"
#include "field2d.hpp"
#include "vec2.hpp"

namespace advflow {

struct Window2D {
    double x0, x1, y0, y1;

    bool contains(Vec2 p, double slack = 0.0) const noexcept {
        return p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack && p.y <= y1 + slack;
    }
};

struct ContourOptions {
    std::size_t nx = 241;
    std::size_t ny = 361;
    double spacing = 0.05;   // target vertex spacing after resampling
    int newton_iterations = 30;
};

namespace detail {

// Newton steps toward field_gap = 0. Interior points move along the gradient;
// points flagged as lying on a window side move along that side only.
template <ClassField2D F>
Vec2 snap_to_zero(const F& f, Vec2 p, Vec2 along, int iterations) {
    for (int it = 0; it < iterations; ++it) {
        const double g = field_gap(f, p);
        if (g == 0.0) break;
        const Vec2 grad = f.grad_weighted1(p) - f.grad_weighted0(p);
        Vec2 dir = along == Vec2{} ? grad : along;
        const double slope = dot(grad, dir);
        if (slope == 0.0) break;
        const Vec2 step = (g / slope) * dir;
        p -= step;
        if (norm(step) < 1e-15 * (1.0 + norm(p))) break;
    }
    return p;
}

inline Vec2 window_side(const Window2D& w, Vec2 p) {
    const double tol = 1e-9 * (1.0 + std::abs(w.x1 - w.x0) + std::abs(w.y1 - w.y0));
    if (std::abs(p.x - w.x0) <= tol || std::abs(p.x - w.x1) <= tol) return {0.0, 1.0};
    if (std::abs(p.y - w.y0) <= tol || std::abs(p.y - w.y1) <= tol) return {1.0, 0.0};
    return {};
}

}  // namespace detail

// Zero level set of w1 rho1 - w0 rho0 by marching squares, each piece oriented
// with the class-1 side on its left, snapped onto the level set and resampled.
// Open pieces end on the window boundary.
template <ClassField2D F>
std::vector<Curve2D> zero_contours(const F& f, const Window2D& w, const ContourOptions& opt = {}) {
    if (opt.nx < 2 || opt.ny < 2) throw GeometryError("contour: grid needs at least 2 x 2 nodes");
    if (!(w.x1 > w.x0 && w.y1 > w.y0)) throw GeometryError("contour: empty window");
    const std::size_t nx = opt.nx, ny = opt.ny;
    const double hx = (w.x1 - w.x0) / static_cast<double>(nx - 1);
    const double hy = (w.y1 - w.y0) / static_cast<double>(ny - 1);
    auto node = [&](std::size_t i, std::size_t j) {
        return Vec2{w.x0 + static_cast<double>(i) * hx, w.y0 + static_cast<double>(j) * hy};
    };
    std::vector<double> val(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) val[j * nx + i] = field_gap(f, node(i, j));
    auto v = [&](std::size_t i, std::size_t j) { return val[j * nx + i]; };
    auto pos = [](double x) { return x > 0.0; };

    // Edge keys: horizontal edge (i,j)-(i+1,j) -> 2*(j*nx+i); vertical edge
    // (i,j)-(i,j+1) -> 2*(j*nx+i)+1.
    auto hkey = [&](std::size_t i, std::size_t j) { return std::uint64_t{2} * (j * nx + i); };
    auto vkey = [&](std::size_t i, std::size_t j) { return std::uint64_t{2} * (j * nx + i) + 1; };
    auto edge_point = [&](std::uint64_t key) {
        const std::size_t idx = key / 2;
        const std::size_t i = idx % nx, j = idx / nx;
        const std::size_t i2 = key % 2 ? i : i + 1;
        const std::size_t j2 = key % 2 ? j + 1 : j;
        const double a = v(i, j), b = v(i2, j2);
        const double u = a == b ? 0.5 : std::clamp(a / (a - b), 0.0, 1.0);
        return node(i, j) + u * (node(i2, j2) - node(i, j));
    };

    std::map<std::uint64_t, std::uint64_t> next;  // segment start edge -> end edge
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            // Corners counterclockwise from bottom-left; edge k joins corner k to k+1.
            const double c[4] = {v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)};
            const std::uint64_t e[4] = {hkey(i, j), vkey(i + 1, j), hkey(i, j + 1), vkey(i, j)};
            int down[2], up[2], nd = 0, nu = 0;
            for (int k = 0; k < 4; ++k) {
                const bool a = pos(c[k]), b = pos(c[(k + 1) % 4]);
                if (a && !b) down[nd++] = k;
                if (!a && b) up[nu++] = k;
            }
            if (nd == 0) continue;
            if (nd == 1) {
                next[e[down[0]]] = e[up[0]];
                continue;
            }
            // Saddle: the centre value decides whether the positive corners connect.
            const double centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
            for (int s = 0; s < 2; ++s) {
                const int k = down[s];
                int best = -1;
                for (int step = 1; step < 4; ++step) {
                    const int q = centre > 0.0 ? (k + step) % 4 : (k + 4 - step) % 4;
                    if (q == up[0] || q == up[1]) {
                        best = q;
                        break;
                    }
                }
                next[e[k]] = e[best];
            }
        }
    }
    if (next.empty()) throw GeometryError("contour: no zero contour of the class gap in the window");

    std::map<std::uint64_t, int> indegree;
    for (const auto& [a, b] : next) indegree[b] += 1;

    std::vector<Curve2D> out;
    auto finish = [&](std::vector<std::uint64_t> keys, bool closed) {
        std::vector<Vec2> pts;
        for (auto k : keys) pts.push_back(edge_point(k));
        if (pts.size() < (closed ? 3u : 2u)) return;
        Curve2D raw(std::move(pts), closed);
        if (raw.length() < 2.0 * opt.spacing) return;
        auto snap_all = [&](Curve2D& c) {
            for (std::size_t k = 0; k < c.size(); ++k) {
                const bool end = !c.closed() && (k == 0 || k + 1 == c.size());
                const Vec2 along = end ? detail::window_side(w, c[k]) : Vec2{};
                c[k] = detail::snap_to_zero(f, c[k], along, opt.newton_iterations);
            }
        };
        snap_all(raw);
        Curve2D c = resample(raw, opt.spacing);
        snap_all(c);
        c = resample(c, opt.spacing);
        snap_all(c);
        out.push_back(std::move(c));
    };

    // Open chains start at edges nothing flows into.
    std::vector<std::uint64_t> starts;
    for (const auto& kv : next)
        if (!indegree.count(kv.first)) starts.push_back(kv.first);
    for (const std::uint64_t start : starts) {
        std::vector<std::uint64_t> keys{start};
        std::uint64_t cur = start;
        while (true) {
            auto it = next.find(cur);
            if (it == next.end()) break;
            cur = it->second;
            keys.push_back(cur);
            next.erase(it);
        }
        finish(std::move(keys), false);
    }
    while (!next.empty()) {
        const std::uint64_t start = next.begin()->first;
        std::vector<std::uint64_t> keys{start};
        std::uint64_t cur = start;
        while (true) {
            auto it = next.find(cur);
            if (it == next.end()) break;
            cur = it->second;
            next.erase(it);
            if (cur == start) break;
            keys.push_back(cur);
        }
        finish(std::move(keys), true);
    }
    if (out.empty()) throw GeometryError("contour: no zero contour of the class gap in the window");
    std::sort(out.begin(), out.end(),
              [](const Curve2D& a, const Curve2D& b) { return a.length() > b.length(); });
    return out;
}

// The longest piece of the Bayes boundary in the window.
template <ClassField2D F>
Curve2D bayes_contour(const F& f, const Window2D& w, const ContourOptions& opt = {}) {
    return zero_contours(f, w, opt).front();
}

}  // namespace advflow

#endif  // ADVFLOW_CONTOUR_HPP
