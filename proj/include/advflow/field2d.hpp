#ifndef ADVFLOW_FIELD2D_HPP
#define ADVFLOW_FIELD2D_HPP

#include <cmath>
#include <concepts>
#include <numbers>

#include "density.hpp"
#include "errors.hpp"
#include "vec2.hpp"

namespace advflow {

// Anything that supplies the two weighted class densities on the plane and
// their gradients. A two-dimensional ClassificationModel qualifies directly.
template <class F>
concept ClassField2D = requires(const F& f, Vec2 p) {
    { f.weighted0(p) } -> std::convertible_to<double>;
    { f.weighted1(p) } -> std::convertible_to<double>;
    { f.grad_weighted0(p) } -> std::convertible_to<Vec2>;
    { f.grad_weighted1(p) } -> std::convertible_to<Vec2>;
};

template <ClassField2D F>
double field_rho(const F& f, Vec2 p) {
    return f.weighted0(p) + f.weighted1(p);
}

template <ClassField2D F>
Vec2 field_grad_rho(const F& f, Vec2 p) {
    return f.grad_weighted0(p) + f.grad_weighted1(p);
}

template <ClassField2D F>
double field_gap(const F& f, Vec2 p) {
    return f.weighted1(p) - f.weighted0(p);
}

// Uniform density on the unit disk split as w0 rho0 = |x|/pi and
// w1 rho1 = (1 - |x|)/pi. The Bayes set is the disk of radius 1/2.
struct RadialField {
    double weighted0(Vec2 p) const noexcept {
        const double r = norm(p);
        return r <= 1.0 ? r / std::numbers::pi : 0.0;
    }
    double weighted1(Vec2 p) const noexcept {
        const double r = norm(p);
        return r <= 1.0 ? (1.0 - r) / std::numbers::pi : 0.0;
    }
    Vec2 grad_weighted0(Vec2 p) const noexcept {
        const double r = norm(p);
        if (r == 0.0 || r > 1.0) return {};
        return p / (r * std::numbers::pi);
    }
    Vec2 grad_weighted1(Vec2 p) const noexcept { return -grad_weighted0(p); }
};

// A one-dimensional model extended to the plane, constant along x2.
class PlanarField {
public:
    explicit PlanarField(ClassificationModel model) : model_(std::move(model)) {
        if (model_.dimension() != 1) throw DimensionError("planar field: needs a one-dimensional model");
    }

    double weighted0(Vec2 p) const { return model_.weighted0(p.x); }
    double weighted1(Vec2 p) const { return model_.weighted1(p.x); }
    Vec2 grad_weighted0(Vec2 p) const { return {model_.dweighted0(p.x), 0.0}; }
    Vec2 grad_weighted1(Vec2 p) const { return {model_.dweighted1(p.x), 0.0}; }

    const ClassificationModel& model() const noexcept { return model_; }

private:
    ClassificationModel model_;
};

}  // namespace advflow

#endif  // ADVFLOW_FIELD2D_HPP
