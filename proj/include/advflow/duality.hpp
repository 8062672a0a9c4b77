#ifndef ADVFLOW_DUALITY_HPP
#define ADVFLOW_DUALITY_HPP

#include <algorithm>
#include <cmath>

#include "classifier1d.hpp"
#include "density.hpp"
#include "interval_union.hpp"
#include "transport.hpp"

namespace advflow {

struct DualReport {
    double eps = 0.0;
    double dual_cost = 0.0;     // inf over couplings of the threshold cost
    double primal_risk = 0.0;   // R_eps(A)
    double gap = 0.0;           // primal_risk - implied_risk
    double implied_risk = 0.0;  // 1/2 - dual_cost/2, the smallest achievable risk
    std::size_t cells = 0;
    double tolerance = 0.0;
    bool certified = false;
};

// Compares R_eps(A) with the transport lower bound computed on an n-cell grid.
// The cell width is shrunk so that 2 eps is a whole number of cells; pair
// distances are then exact multiples of the cell width, and the matching
// radius is taken half a cell beyond 2 eps so float rounding cannot split ties.
inline DualReport duality_report(const ClassificationModel& model, const IntervalUnion& a,
                                 double eps, std::size_t n, Window window) {
    detail::require_1d(model, "duality_report");
    if (!(eps >= 0.0)) throw ConfigError("duality_report: eps must be nonnegative");
    if (n < 2) throw ConfigError("duality_report: need at least two cells");
    double h = window.width() / static_cast<double>(n);
    if (eps > 0.0) {
        const double k = std::max(1.0, std::ceil(2.0 * eps / h));
        h = 2.0 * eps / k;
    }
    const double centre = 0.5 * (window.lo + window.hi);
    const Window aligned{centre - 0.5 * static_cast<double>(n) * h,
                         centre + 0.5 * static_cast<double>(n) * h};
    const auto disc = discretize(model, n, aligned);

    DualReport r;
    r.eps = eps;
    r.cells = n;
    r.dual_cost = dual_value(disc.mu0, disc.mu1, eps + 0.25 * disc.cell);
    r.implied_risk = 0.5 - 0.5 * r.dual_cost;
    r.primal_risk = robust_risk(model, a, eps);
    r.gap = r.primal_risk - r.implied_risk;

    double peak = 0.0;
    for (std::size_t i = 0; i < disc.mu0.size(); ++i)
        peak = std::max(peak, model.rho(disc.mu0.points()[i]));
    r.tolerance = disc.cell * peak;
    r.certified = std::abs(r.gap) <= r.tolerance;
    return r;
}

inline DualReport duality_report(const ClassificationModel& model, const IntervalUnion& a,
                                 double eps, std::size_t n) {
    return duality_report(model, a, eps, n, default_window(model));
}

}  // namespace advflow

#endif  // ADVFLOW_DUALITY_HPP
