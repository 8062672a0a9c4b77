#ifndef ADVFLOW_TRANSPORT_HPP
#define ADVFLOW_TRANSPORT_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "classifier1d.hpp"
#include "density.hpp"
#include "errors.hpp"

namespace advflow {

// Atoms on the line, sorted by position. Zero-mass atoms are dropped.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    DiscreteMeasure(std::vector<double> points, std::vector<double> masses) {
        if (points.size() != masses.size())
            throw ConfigError("discrete measure: points and masses differ in length");
        std::vector<std::size_t> order(points.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return points[i] < points[j]; });
        for (std::size_t i : order) {
            if (!std::isfinite(points[i]) || !std::isfinite(masses[i]) || masses[i] < 0.0)
                throw ConfigError("discrete measure: atoms need finite positions and nonnegative mass");
            if (masses[i] == 0.0) continue;
            points_.push_back(points[i]);
            masses_.push_back(masses[i]);
        }
    }

    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& masses() const noexcept { return masses_; }
    std::size_t size() const noexcept { return points_.size(); }

    double total() const noexcept {
        double s = 0.0;
        for (double m : masses_) s += m;
        return s;
    }

private:
    std::vector<double> points_;
    std::vector<double> masses_;
};

struct DiscretizedModel {
    DiscreteMeasure mu0;  // w0 rho0
    DiscreteMeasure mu1;  // w1 rho1
    double cell = 0.0;
    Window window{};
};

// Midpoint-rule cell masses of w0 rho0 and w1 rho1 on n uniform cells.
inline DiscretizedModel discretize(const ClassificationModel& model, std::size_t n, Window window) {
    detail::require_1d(model, "discretize");
    if (n < 2) throw ConfigError("discretize: need at least two cells");
    if (!(window.hi > window.lo)) throw ConfigError("discretize: empty window");
    const double lost0 = model.w0() * (1.0 - model.rho0().mass(window.lo, window.hi));
    const double lost1 = model.w1() * (1.0 - model.rho1().mass(window.lo, window.hi));
    if (lost0 > 1e-6 || lost1 > 1e-6)
        throw ConfigError("discretize: window truncates more than 1e-6 of the mass");

    const double h = window.width() / static_cast<double>(n);
    std::vector<double> x(n), m0(n), m1(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = window.lo + (static_cast<double>(i) + 0.5) * h;
        m0[i] = h * model.weighted0(x[i]);
        m1[i] = h * model.weighted1(x[i]);
    }
    return {DiscreteMeasure(x, std::move(m0)), DiscreteMeasure(x, std::move(m1)), h, window};
}

// Largest mass of mu0 that can be paired with mu1 so that paired atoms are at
// most `radius` apart. Demands (mu1) are served left to right, each from the
// leftmost supply still in reach; with equal-length reach windows on the line
// this greedy is optimal.
inline double matched_mass(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double radius) {
    const auto& xs = mu0.points();
    std::vector<double> left = mu0.masses();
    const auto& ys = mu1.points();
    const auto& need = mu1.masses();
    double matched = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double y = ys[i];
        while (j < xs.size() && (xs[j] < y - radius || left[j] <= 0.0)) ++j;
        double want = need[i];
        std::size_t k = j;
        while (want > 0.0 && k < xs.size() && xs[k] <= y + radius) {
            const double take = std::min(want, left[k]);
            left[k] -= take;
            want -= take;
            matched += take;
            if (left[k] <= 0.0) ++k;
        }
    }
    return matched;
}

enum class DualMode {
    labeled,   // full cost between the labeled law and its label swap
    balanced,  // plain threshold transport between two equal-mass measures
};

// Minimal 0-1 threshold transport cost at adversarial budget eps (pairs
// farther than 2 eps cost 1). In labeled mode this is m0 + m1 - 2M, i.e.
// twice the unmatched class-0 mass plus the (m1 - m0) correction; balanced
// mode returns m0 - M and requires m0 == m1.
inline double dual_value(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double eps,
                         DualMode mode = DualMode::labeled, double balance_tol = 1e-12) {
    if (!(eps >= 0.0)) throw ConfigError("dual_value: eps must be nonnegative");
    const double m0 = mu0.total();
    const double m1 = mu1.total();
    const double matched = matched_mass(mu0, mu1, 2.0 * eps);
    if (mode == DualMode::balanced) {
        if (std::abs(m0 - m1) > balance_tol * std::max(1.0, std::max(m0, m1)))
            throw ConfigError("dual_value: balanced solve requested for measures of mass " +
                              std::to_string(m0) + " and " + std::to_string(m1));
        return std::max(0.0, m0 - matched);
    }
    return std::max(0.0, m0 + m1 - 2.0 * matched);
}

}  // namespace advflow

#endif  // ADVFLOW_TRANSPORT_HPP
