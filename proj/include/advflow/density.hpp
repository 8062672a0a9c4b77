#ifndef ADVFLOW_DENSITY_HPP
#define ADVFLOW_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "vec2.hpp"

namespace advflow {

// One weighted Gaussian in R^1 or R^2. For d = 1 only mean.x and s11 are used.
class GaussianComponent {
public:
    static GaussianComponent univariate(double mean, double variance, double weight = 1.0) {
        GaussianComponent g;
        g.dim_ = 1;
        g.mean_ = {mean, 0.0};
        g.s11_ = variance;
        g.weight_ = weight;
        g.finish();
        return g;
    }

    static GaussianComponent bivariate(Vec2 mean, double s11, double s12, double s22,
                                       double weight = 1.0) {
        GaussianComponent g;
        g.dim_ = 2;
        g.mean_ = mean;
        g.s11_ = s11;
        g.s12_ = s12;
        g.s22_ = s22;
        g.weight_ = weight;
        g.finish();
        return g;
    }

    int dimension() const noexcept { return dim_; }
    Vec2 mean() const noexcept { return mean_; }
    double mean1() const noexcept { return mean_.x; }
    double weight() const noexcept { return weight_; }
    double s11() const noexcept { return s11_; }
    double s12() const noexcept { return s12_; }
    double s22() const noexcept { return s22_; }

    // Largest standard deviation along any direction.
    double max_sd() const noexcept {
        if (dim_ == 1) return std::sqrt(s11_);
        const double tr = 0.5 * (s11_ + s22_);
        const double disc = std::sqrt(0.25 * (s11_ - s22_) * (s11_ - s22_) + s12_ * s12_);
        return std::sqrt(tr + disc);
    }

    // Unweighted density and its log.
    double log_density(double x) const noexcept {
        const double z = x - mean_.x;
        return log_norm_ - 0.5 * z * z * inv11_;
    }
    double log_density(Vec2 p) const noexcept {
        const Vec2 z = p - mean_;
        const double q = z.x * z.x * inv11_ + 2.0 * z.x * z.y * inv12_ + z.y * z.y * inv22_;
        return log_norm_ - 0.5 * q;
    }
    double density(double x) const noexcept { return std::exp(log_density(x)); }
    double density(Vec2 p) const noexcept { return std::exp(log_density(p)); }

    double derivative(double x) const noexcept { return -(x - mean_.x) * inv11_ * density(x); }
    Vec2 gradient(Vec2 p) const noexcept {
        const Vec2 z = p - mean_;
        const double g = density(p);
        return {-(inv11_ * z.x + inv12_ * z.y) * g, -(inv12_ * z.x + inv22_ * z.y) * g};
    }

    // P(X <= x), d = 1 only.
    double cdf(double x) const noexcept {
        return 0.5 * std::erfc(-(x - mean_.x) / (std::sqrt(2.0 * s11_)));
    }
    // P(X > x) without cancellation in the right tail.
    double ccdf(double x) const noexcept {
        return 0.5 * std::erfc((x - mean_.x) / (std::sqrt(2.0 * s11_)));
    }

private:
    GaussianComponent() = default;

    void finish() {
        if (!(weight_ >= 0.0) || !std::isfinite(weight_))
            throw ConfigError("gaussian component: weight must be finite and nonnegative");
        if (!std::isfinite(mean_.x) || !std::isfinite(mean_.y))
            throw ConfigError("gaussian component: mean must be finite");
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if (dim_ == 1) {
            if (!(s11_ > 0.0) || !std::isfinite(s11_))
                throw ConfigError("gaussian component: variance must be positive");
            inv11_ = 1.0 / s11_;
            log_norm_ = -0.5 * std::log(two_pi * s11_);
            return;
        }
        const double det = s11_ * s22_ - s12_ * s12_;
        if (!(s11_ > 0.0) || !(det > 0.0) || !std::isfinite(det))
            throw ConfigError("gaussian component: covariance must be symmetric positive-definite");
        inv11_ = s22_ / det;
        inv12_ = -s12_ / det;
        inv22_ = s11_ / det;
        log_norm_ = -std::log(two_pi) - 0.5 * std::log(det);
    }

    int dim_ = 1;
    Vec2 mean_{};
    double s11_ = 1.0, s12_ = 0.0, s22_ = 1.0;
    double weight_ = 1.0;
    double inv11_ = 1.0, inv12_ = 0.0, inv22_ = 1.0;
    double log_norm_ = 0.0;
};

class MixtureDensity {
public:
    explicit MixtureDensity(std::vector<GaussianComponent> components)
        : components_(std::move(components)) {
        if (components_.empty()) throw ConfigError("mixture: needs at least one component");
        dim_ = components_.front().dimension();
        double total = 0.0;
        for (const auto& c : components_) {
            if (c.dimension() != dim_) throw ConfigError("mixture: components differ in dimension");
            total += c.weight();
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ConfigError("mixture: component weights sum to " + std::to_string(total) +
                              ", expected 1");
    }

    static MixtureDensity gaussian(double mean, double sd) {
        return MixtureDensity({GaussianComponent::univariate(mean, sd * sd, 1.0)});
    }

    int dimension() const noexcept { return dim_; }
    const std::vector<GaussianComponent>& components() const noexcept { return components_; }

    double pdf(double x) const {
        require(1);
        double s = 0.0;
        for (const auto& c : components_) s += c.weight() * c.density(x);
        return s;
    }
    double pdf(Vec2 p) const {
        require(2);
        double s = 0.0;
        for (const auto& c : components_) s += c.weight() * c.density(p);
        return s;
    }
    double pdf(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != dim_) throw dimension_error(x.size());
        return dim_ == 1 ? pdf(x[0]) : pdf(Vec2{x[0], x[1]});
    }

    double derivative(double x) const {
        require(1);
        double s = 0.0;
        for (const auto& c : components_) s += c.weight() * c.derivative(x);
        return s;
    }
    Vec2 gradient(Vec2 p) const {
        require(2);
        Vec2 g{};
        for (const auto& c : components_) g += c.weight() * c.gradient(p);
        return g;
    }
    std::vector<double> gradient(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != dim_) throw dimension_error(x.size());
        if (dim_ == 1) return {derivative(x[0])};
        const Vec2 g = gradient(Vec2{x[0], x[1]});
        return {g.x, g.y};
    }

    // log pdf, finite far into the tails where pdf itself underflows.
    double log_pdf(double x) const {
        require(1);
        return log_sum([&](const GaussianComponent& c) { return c.log_density(x); });
    }
    double log_pdf(Vec2 p) const {
        require(2);
        return log_sum([&](const GaussianComponent& c) { return c.log_density(p); });
    }

    double cdf(double x) const {
        require(1);
        double s = 0.0;
        for (const auto& c : components_) s += c.weight() * c.cdf(x);
        return s;
    }

    // Probability of [lo, hi], accurate in either tail.
    double mass(double lo, double hi) const {
        require(1);
        if (!(hi > lo)) return 0.0;
        double s = 0.0;
        for (const auto& c : components_) {
            const double m = c.mean1();
            double part;
            if (lo >= m) part = c.ccdf(lo) - c.ccdf(hi);
            else if (hi <= m) part = c.cdf(hi) - c.cdf(lo);
            else part = 1.0 - c.cdf(lo) - c.ccdf(hi);
            s += c.weight() * part;
        }
        return s;
    }

    double max_sd() const noexcept {
        double s = 0.0;
        for (const auto& c : components_) s = std::max(s, c.max_sd());
        return s;
    }
    // Smallest and largest first coordinate among component means.
    std::pair<double, double> mean_range() const noexcept {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& c : components_) {
            lo = std::min(lo, c.mean1());
            hi = std::max(hi, c.mean1());
        }
        return {lo, hi};
    }

private:
    void require(int d) const {
        if (d != dim_) throw dimension_error(static_cast<std::size_t>(d));
    }
    DimensionError dimension_error(std::size_t got) const {
        return DimensionError("mixture of dimension " + std::to_string(dim_) +
                              " evaluated at a point of dimension " + std::to_string(got));
    }
    template <class F>
    double log_sum(F&& logd) const {
        double top = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(components_.size());
        for (const auto& c : components_) {
            const double t = c.weight() > 0.0 ? std::log(c.weight()) + logd(c)
                                              : -std::numeric_limits<double>::infinity();
            terms.push_back(t);
            top = std::max(top, t);
        }
        if (!std::isfinite(top)) return top;
        double s = 0.0;
        for (double t : terms) s += std::exp(t - top);
        return top + std::log(s);
    }

    std::vector<GaussianComponent> components_;
    int dim_ = 1;
};

// The pair of class-conditional densities with their priors.
class ClassificationModel {
public:
    ClassificationModel(MixtureDensity rho0, MixtureDensity rho1, double w0, double w1)
        : rho0_(std::move(rho0)), rho1_(std::move(rho1)), w0_(w0), w1_(w1) {
        if (!(w0 > 0.0 && w0 < 1.0) || !(w1 > 0.0 && w1 < 1.0))
            throw ConfigError("model: class weights must lie in (0, 1)");
        if (std::abs(w0 + w1 - 1.0) > 1e-9) throw ConfigError("model: w0 + w1 must equal 1");
        if (rho0_.dimension() != rho1_.dimension())
            throw ConfigError("model: rho0 and rho1 differ in dimension");
    }

    int dimension() const noexcept { return rho0_.dimension(); }
    const MixtureDensity& rho0() const noexcept { return rho0_; }
    const MixtureDensity& rho1() const noexcept { return rho1_; }
    double w0() const noexcept { return w0_; }
    double w1() const noexcept { return w1_; }

    double weighted0(double x) const { return w0_ * rho0_.pdf(x); }
    double weighted1(double x) const { return w1_ * rho1_.pdf(x); }
    double weighted0(Vec2 p) const { return w0_ * rho0_.pdf(p); }
    double weighted1(Vec2 p) const { return w1_ * rho1_.pdf(p); }
    double dweighted0(double x) const { return w0_ * rho0_.derivative(x); }
    double dweighted1(double x) const { return w1_ * rho1_.derivative(x); }
    Vec2 grad_weighted0(Vec2 p) const { return w0_ * rho0_.gradient(p); }
    Vec2 grad_weighted1(Vec2 p) const { return w1_ * rho1_.gradient(p); }

    double rho(double x) const { return weighted0(x) + weighted1(x); }
    double rho(Vec2 p) const { return weighted0(p) + weighted1(p); }
    double rho_derivative(double x) const { return dweighted0(x) + dweighted1(x); }
    Vec2 rho_gradient(Vec2 p) const { return grad_weighted0(p) + grad_weighted1(p); }

    // w1 rho1 - w0 rho0; positive on the Bayes set.
    double class_gap(double x) const { return weighted1(x) - weighted0(x); }
    double class_gap(Vec2 p) const { return weighted1(p) - weighted0(p); }
    double class_gap(const std::vector<double>& x) const {
        return w1_ * rho1_.pdf(x) - w0_ * rho0_.pdf(x);
    }

    // log(w1 rho1) - log(w0 rho0). Same sign as class_gap, but keeps its sign
    // in tails where both densities underflow.
    double log_ratio(double x) const {
        return std::log(w1_) + rho1_.log_pdf(x) - std::log(w0_) - rho0_.log_pdf(x);
    }
    double log_ratio(Vec2 p) const {
        return std::log(w1_) + rho1_.log_pdf(p) - std::log(w0_) - rho0_.log_pdf(p);
    }

    // P(Y = 1 | X = x).
    double conditional_mean(double x) const {
        const double r = rho(x);
        return r > 0.0 ? weighted1(x) / r : w1_;
    }
    double conditional_mean(Vec2 p) const {
        const double r = rho(p);
        return r > 0.0 ? weighted1(p) / r : w1_;
    }

    // Labels exchanged: class_gap changes sign.
    ClassificationModel swapped() const { return {rho1_, rho0_, w1_, w0_}; }

    // The image under x -> -x (1D) or p -> -p (2D).
    ClassificationModel reflected() const { return {reflect(rho0_), reflect(rho1_), w0_, w1_}; }

    double max_sd() const noexcept { return std::max(rho0_.max_sd(), rho1_.max_sd()); }
    std::pair<double, double> mean_range() const noexcept {
        const auto a = rho0_.mean_range();
        const auto b = rho1_.mean_range();
        return {std::min(a.first, b.first), std::max(a.second, b.second)};
    }

private:
    static MixtureDensity reflect(const MixtureDensity& m) {
        std::vector<GaussianComponent> out;
        for (const auto& c : m.components()) {
            if (c.dimension() == 1)
                out.push_back(GaussianComponent::univariate(-c.mean1(), c.s11(), c.weight()));
            else
                out.push_back(
                    GaussianComponent::bivariate(-c.mean(), c.s11(), c.s12(), c.s22(), c.weight()));
        }
        return MixtureDensity(std::move(out));
    }

    MixtureDensity rho0_;
    MixtureDensity rho1_;
    double w0_;
    double w1_;
};

inline double pdf(const MixtureDensity& m, double x) { return m.pdf(x); }
inline double pdf(const MixtureDensity& m, Vec2 p) { return m.pdf(p); }
inline double pdf(const MixtureDensity& m, const std::vector<double>& x) { return m.pdf(x); }
inline double pdf_derivative(const MixtureDensity& m, double x) { return m.derivative(x); }
inline Vec2 pdf_derivative(const MixtureDensity& m, Vec2 p) { return m.gradient(p); }
inline std::vector<double> pdf_derivative(const MixtureDensity& m, const std::vector<double>& x) {
    return m.gradient(x);
}
inline double class_gap(const ClassificationModel& model, double x) { return model.class_gap(x); }
inline double class_gap(const ClassificationModel& model, Vec2 p) { return model.class_gap(p); }

}  // namespace advflow

#endif  // ADVFLOW_DENSITY_HPP
