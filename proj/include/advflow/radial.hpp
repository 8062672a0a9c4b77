#ifndef ADVFLOW_RADIAL_HPP
#define ADVFLOW_RADIAL_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rk4.hpp"

namespace advflow {

namespace detail {

struct RadialTerms {
    double outer;  // d (r + eps)^(d-1)
    double inner;  // (d-1)(r - eps)^(d-2) - d (r - eps)^(d-1)
};

inline RadialTerms radial_terms(int d, double r, double eps) {
    const double dd = static_cast<double>(d);
    const double rp = r + eps;
    const double rm = r - eps;
    return {dd * std::pow(rp, d - 1), (dd - 1.0) * std::pow(rm, d - 2) - dd * std::pow(rm, d - 1)};
}

}  // namespace detail

// dr/deps for the ball of radius r in the uniform-density radial model in R^d.
inline double radial_velocity(int d, double r, double eps) {
    const auto t = detail::radial_terms(d, r, eps);
    const double den = t.outer - t.inner;
    if (den == 0.0) throw DegeneracyError("radial_velocity: zero denominator", den);
    return -(t.outer + t.inner) / den;
}

// RK4 solution of the radial ODE, evaluated between grid points by cubic
// Hermite interpolation with the exact slopes.
class RadialSolution {
public:
    RadialSolution(int d, std::vector<double> eps, std::vector<double> r)
        : d_(d), eps_(std::move(eps)), r_(std::move(r)) {
        for (std::size_t k = 0; k < eps_.size(); ++k) slope_.push_back(radial_velocity(d_, r_[k], eps_[k]));
    }

    int dimension() const noexcept { return d_; }
    const std::vector<double>& eps() const noexcept { return eps_; }
    const std::vector<double>& radius() const noexcept { return r_; }
    double eps_max() const noexcept { return eps_.back(); }

    double operator()(double e) const {
        if (e < eps_.front() || e > eps_.back())
            throw ConfigError("radial solution: eps outside the integrated range");
        const auto it = std::upper_bound(eps_.begin(), eps_.end(), e);
        std::size_t k = it == eps_.begin() ? 0 : static_cast<std::size_t>(it - eps_.begin()) - 1;
        if (k + 1 >= eps_.size()) return r_.back();
        const double h = eps_[k + 1] - eps_[k];
        const double s = (e - eps_[k]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * r_[k] + h10 * h * slope_[k] + h01 * r_[k + 1] + h11 * h * slope_[k + 1];
    }

private:
    int d_;
    std::vector<double> eps_;
    std::vector<double> r_;
    std::vector<double> slope_;
};

inline RadialSolution radial_oracle(int d, double r0, double eps_max, double step) {
    if (d < 2) throw ConfigError("radial_oracle: dimension must be at least 2");
    if (!(r0 > 0.0)) throw ConfigError("radial_oracle: r0 must be positive");
    if (!(eps_max >= 0.0) || !(r0 > eps_max)) throw ConfigError("radial_oracle: need r0 > eps_max >= 0");
    if (!(step > 0.0)) throw ConfigError("radial_oracle: step must be positive");
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(eps_max / step - 1e-12)));
    const double h = eps_max / static_cast<double>(n);

    auto den_sign = [&](double r, double e) {
        const auto t = detail::radial_terms(d, r, e);
        return t.outer - t.inner > 0.0;
    };
    const bool sign0 = den_sign(r0, 0.0);
    auto f = [&](double e, double r) {
        if (den_sign(r, e) != sign0 || r <= e)
            throw DegeneracyError("radial_oracle: denominator changes sign at eps " + std::to_string(e), 0.0);
        return radial_velocity(d, r, e);
    };
    std::vector<double> es{0.0}, rs{r0};
    for (std::size_t k = 0; k < n && eps_max > 0.0; ++k) {
        const double e0 = static_cast<double>(k) * h;
        rs.push_back(rk4_step(f, e0, rs.back(), h));
        es.push_back(k + 1 == n ? eps_max : static_cast<double>(k + 1) * h);
        if (den_sign(rs.back(), es.back()) != sign0)
            throw DegeneracyError("radial_oracle: denominator changes sign at eps " + std::to_string(es.back()), 0.0);
    }
    return RadialSolution(d, std::move(es), std::move(rs));
}

}  // namespace advflow

#endif  // ADVFLOW_RADIAL_HPP
