#ifndef ADVFLOW_TESTS_COMMON_HPP
#define ADVFLOW_TESTS_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <advflow/density.hpp>

namespace testing_models {

using advflow::ClassificationModel;
using advflow::GaussianComponent;
using advflow::MixtureDensity;

// rho1 = N(0, 1), rho0 = N(2, 4), equal weights.
inline ClassificationModel two_gaussians() {
    return {MixtureDensity::gaussian(2.0, 2.0), MixtureDensity::gaussian(0.0, 1.0), 0.5, 0.5};
}

// Closed-form Bayes crossings of two_gaussians().
inline double a0() { return -(2.0 / 3.0) * (1.0 + std::sqrt(2.0 * (2.0 + 3.0 * std::log(2.0)))); }
inline double b0() { return (2.0 / 3.0) * (std::sqrt(2.0 * (2.0 + 3.0 * std::log(2.0))) - 1.0); }

inline ClassificationModel symmetric() {
    return {MixtureDensity::gaussian(1.0, 1.0), MixtureDensity::gaussian(-1.0, 1.0), 0.5, 0.5};
}

// Class 0 is two narrow bumps, class 1 a wide Gaussian; the middle class-1
// interval pinches off as eps grows.
inline ClassificationModel two_bumps() {
    return {MixtureDensity({GaussianComponent::univariate(-1.5, 0.25, 0.5), GaussianComponent::univariate(1.5, 0.25, 0.5)}),
            MixtureDensity::gaussian(0.0, 3.0), 0.5, 0.5};
}

// Four Gaussians with covariance 0.2 I, two per class.
inline ClassificationModel four_gaussians_2d() {
    auto g = [](double x, double y) { return GaussianComponent::bivariate({x, y}, 0.2, 0.0, 0.2, 0.5); };
    return {MixtureDensity({g(0.5, -0.5), g(0.5, 2.0)}), MixtureDensity({g(-0.5, -2.0), g(-0.5, 0.5)}), 0.5, 0.5};
}

// Exact radius of the radial example: r(0) = 1/2, dr/deps from the balance law.
inline double radial_exact(double eps) { return (1.0 + std::sqrt(1.0 - 8.0 * eps - 16.0 * eps * eps)) / 4.0; }

// Plain bisection for a sign change of f on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Composite Simpson rule, used as an independent check on adaptive quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Maximum number of unit atoms of xs that can be paired with unit atoms of ys
// at distance <= radius, by exhaustive search over subsets of ys.
inline int brute_force_matching(const std::vector<double>& xs, const std::vector<double>& ys, double radius) {
    const std::size_t m = ys.size();
    std::vector<int> best(std::size_t{1} << m, -1);
    best[0] = 0;
    for (double x : xs) {
        auto next = best;
        for (std::size_t mask = 0; mask < best.size(); ++mask) {
            if (best[mask] < 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (mask & (std::size_t{1} << j)) continue;
                if (std::abs(x - ys[j]) > radius) continue;
                auto& slot = next[mask | (std::size_t{1} << j)];
                slot = std::max(slot, best[mask] + 1);
            }
        }
        best = std::move(next);
    }
    return *std::max_element(best.begin(), best.end());
}

// Atoms on a dyadic grid with integer masses, at most 12 units in total.
struct Instance {
    std::vector<double> points, masses, units;
};

inline Instance random_side(std::mt19937& rng) {
    std::uniform_int_distribution<int> pos(-40, 40), mass(1, 3), atoms(1, 6);
    Instance s;
    const int n = atoms(rng);
    for (int k = 0; k < n && s.units.size() < 12; ++k) {
        const double x = pos(rng) / 8.0;
        const int w = std::min<int>(mass(rng), 12 - static_cast<int>(s.units.size()));
        s.points.push_back(x);
        s.masses.push_back(w);
        for (int u = 0; u < w; ++u) s.units.push_back(x);
    }
    return s;
}

}  // namespace testing_models

#endif
