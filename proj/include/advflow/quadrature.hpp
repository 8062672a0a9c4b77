#ifndef ADVFLOW_QUADRATURE_HPP
#define ADVFLOW_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace advflow {

inline constexpr double default_quadrature_tol = 1e-9;

// Adaptive 15/31-point Gauss-Kronrod integration. The estimated error must
// come in below abs_tol or a QuadratureError is thrown; results that merely
// "look converged" are never passed on silently.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = default_quadrature_tol,
                 unsigned max_depth = 20) {
    if (a == b) return 0.0;
    if (std::isnan(a) || std::isnan(b)) throw QuadratureError("integrate: NaN limit");
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    double err = 0.0;
    double l1 = 0.0;
    const double rel = std::min(1e-12, abs_tol);
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, max_depth, rel, &err, &l1);
    if (!std::isfinite(value) || err > abs_tol) {
        throw QuadratureError("integrate: no convergence on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "], error estimate " + std::to_string(err));
    }
    return sign * value;
}

}  // namespace advflow

#endif  // ADVFLOW_QUADRATURE_HPP
