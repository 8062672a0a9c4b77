#ifndef ADVFLOW_CERTIFICATE_HPP
#define ADVFLOW_CERTIFICATE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "classifier1d.hpp"
#include "density.hpp"
#include "errors.hpp"
#include "evolution1d.hpp"
#include "interval_union.hpp"
#include "quadrature.hpp"

namespace advflow {

// Monotone map sampled at increasing t.
struct MapTable {
    std::vector<double> t;
    std::vector<double> phi;

    double max_displacement() const noexcept {
        double m = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) m = std::max(m, std::abs(t[k] - phi[k]));
        return m;
    }

    // Piecewise-linear interpolation, clamped to the table.
    double operator()(double x) const {
        if (t.empty()) return x;
        if (x <= t.front()) return phi.front();
        if (x >= t.back()) return phi.back();
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - t.begin());
        const double s = (x - t[k - 1]) / (t[k] - t[k - 1]);
        return phi[k - 1] + s * (phi[k] - phi[k - 1]);
    }
};

// Transport data near one boundary point.
//   right endpoint b: r = r_plus in [b - delta/2, b(0)], r_tilde = r_tilde_plus in
//     [b(0), b + delta/2]; phi maps [r, b - eps] onto [r, b + eps] and phi_tilde
//     maps [b - eps, r_tilde] onto [b + eps, r_tilde].
//   left endpoint a: r = r_minus in [a(0), a + delta/2], r_tilde = r_tilde_minus
//     in [a - delta/2, a(0)]; phi maps [a + eps, r] onto [a - eps, r] and
//     phi_tilde maps [r_tilde, a + eps] onto [r_tilde, a - eps].
// Infinite endpoints carry r = r_tilde = the endpoint and empty tables.
struct EndpointCertificate {
    std::size_t index = 0;
    Side side = Side::right;
    double endpoint = 0.0;
    double initial = 0.0;
    double r = 0.0;
    double r_tilde = 0.0;
    MapTable phi;
    MapTable phi_tilde;
    double balance_residual = 0.0;
    double balance_residual_tilde = 0.0;
    double slope_margin = inf;

    bool finite() const noexcept { return std::isfinite(endpoint); }
};

struct ConstructiveCertificate {
    double eps = 0.0;
    double delta = 0.0;
    std::vector<EndpointCertificate> lefts;
    std::vector<EndpointCertificate> rights;
    double max_displacement = 0.0;

    double r_plus(std::size_t i) const { return rights.at(i).r; }
    double r_tilde_plus(std::size_t i) const { return rights.at(i).r_tilde; }
    double r_minus(std::size_t i) const { return lefts.at(i).r; }
    double r_tilde_minus(std::size_t i) const { return lefts.at(i).r_tilde; }
};

struct CertificateOptions {
    std::size_t map_points = 64;
    std::size_t bracket_scan = 4000;
    double snapshot_tolerance = 1e-6;
};

// Half the smallest distance between consecutive finite boundary points of the
// initial set; twice the widest component spread when there is only one.
inline double default_delta(const ClassificationModel& model, const IntervalUnion& initial) {
    std::vector<double> pts;
    for (const auto& p : initial.intervals()) {
        if (std::isfinite(p.lo)) pts.push_back(p.lo);
        if (std::isfinite(p.hi)) pts.push_back(p.hi);
    }
    if (pts.size() < 2) return 2.0 * model.max_sd();
    double g = inf;
    for (std::size_t i = 1; i < pts.size(); ++i) g = std::min(g, pts[i] - pts[i - 1]);
    return 0.5 * g;
}

namespace detail {

inline double mass0(const ClassificationModel& m, double lo, double hi) {
    return lo <= hi ? m.w0() * m.rho0().mass(lo, hi) : -m.w0() * m.rho0().mass(hi, lo);
}
inline double mass1(const ClassificationModel& m, double lo, double hi) {
    return lo <= hi ? m.w1() * m.rho1().mass(lo, hi) : -m.w1() * m.rho1().mass(hi, lo);
}

// Signed integral of w_k rho_k over [lo, hi] by quadrature, tails truncated.
inline double quad_mass(const ClassificationModel& m, int cls, double lo, double hi,
                        double tol = 1e-11) {
    if (lo == hi) return 0.0;
    const double sign = lo < hi ? 1.0 : -1.0;
    const IntervalUnion piece({{std::min(lo, hi), std::max(lo, hi)}});
    const double v = cls == 0 ? integrate_over(m, piece, [&](double x) { return m.weighted0(x); }, tol)
                              : integrate_over(m, piece, [&](double x) { return m.weighted1(x); }, tol);
    return sign * v;
}

// Root of a continuous f on [lo, hi] by bisection, given f(lo), f(hi) of
// opposite sign (zero counts as the sign of `hi`).
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    const bool lo_pos = f(lo) > 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= std::min(lo, hi) || mid >= std::max(lo, hi)) break;
        if ((f(mid) > 0.0) == lo_pos) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// First sign change of f walking from `from` toward `to`.
inline double first_root(const std::function<double(double)>& f, double from, double to,
                         std::size_t steps, const std::string& what) {
    const bool start_pos = f(from) > 0.0;
    double prev = from;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double x = from + (to - from) * static_cast<double>(k) / static_cast<double>(steps);
        if ((f(x) > 0.0) != start_pos) return bisect(f, prev, x);
        prev = x;
    }
    throw CertificateError("certificate: bracket for " + what + " not found within delta/2");
}

// Steps 1 and 2 of the construction at a finite right endpoint b.
inline EndpointCertificate build_right(const ClassificationModel& m, double b, double b0,
                                       double eps, double delta, const CertificateOptions& opt) {
    EndpointCertificate rec;
    rec.side = Side::right;
    rec.endpoint = b;
    rec.initial = b0;
    const std::size_t np = std::max<std::size_t>(opt.map_points, 2);
    if (eps == 0.0) {
        rec.r = rec.r_tilde = b;
        rec.phi.t.assign(np, b);
        rec.phi.phi.assign(np, b);
        rec.phi_tilde = rec.phi;
        return rec;
    }
    if (b - eps <= b - 0.5 * delta || b + eps >= b + 0.5 * delta)
        throw CertificateError("certificate: eps exceeds delta/2 at right endpoint " + std::to_string(b));

    const double lo = b - eps;
    const double hi = b + eps;
    auto g = [&](double r) { return mass1(m, r, lo) - mass0(m, r, hi); };
    rec.r = first_root(g, lo, b - 0.5 * delta, opt.bracket_scan, "r_plus");
    auto gt = [&](double r) { return mass1(m, lo, r) - mass0(m, hi, r); };
    rec.r_tilde = first_root(gt, hi, b + 0.5 * delta, opt.bracket_scan, "r_tilde_plus");

    // Slope condition on the part of the neighbourhood the maps actually use.
    double margin = inf;
    const double span = lo - rec.r;
    const double span_t = rec.r_tilde - hi;
    for (std::size_t k = 0; k < np; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(np - 1);
        const double s = u * span;
        margin = std::min(margin, m.dweighted0(hi - s) - m.dweighted1(lo - s));
        const double st = u * span_t;
        margin = std::min(margin, m.dweighted0(hi + st) - m.dweighted1(lo + st));
    }
    rec.slope_margin = margin;
    if (!(margin > 0.0))
        throw CertificateError("certificate: slope condition fails near right endpoint " +
                               std::to_string(b) + " (margin " + std::to_string(margin) + ")");

    for (std::size_t k = 0; k < np; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(np - 1);
        const double t = rec.r + u * (lo - rec.r);
        const double need = mass1(m, t, lo);
        double p = k == 0 ? rec.r : k + 1 == np ? hi
                 : bisect([&](double x) { return mass0(m, x, hi) - need; }, rec.r, hi);
        rec.phi.t.push_back(t);
        rec.phi.phi.push_back(p);

        const double tt = lo + u * (rec.r_tilde - lo);
        const double need_t = mass1(m, lo, tt);
        double pt = k == 0 ? hi : k + 1 == np ? rec.r_tilde
                  : bisect([&](double x) { return mass0(m, hi, x) - need_t; }, hi, rec.r_tilde);
        rec.phi_tilde.t.push_back(tt);
        rec.phi_tilde.phi.push_back(pt);
    }
    return rec;
}

inline EndpointCertificate infinite_record(std::size_t i, Side side, double endpoint) {
    EndpointCertificate rec;
    rec.index = i;
    rec.side = side;
    rec.endpoint = rec.initial = rec.r = rec.r_tilde = endpoint;
    return rec;
}

// Mirror of a right-endpoint record of the reflected model.
inline EndpointCertificate mirror(const EndpointCertificate& rr) {
    EndpointCertificate rec = rr;
    rec.side = Side::left;
    rec.endpoint = -rr.endpoint;
    rec.initial = -rr.initial;
    rec.r = -rr.r;
    rec.r_tilde = -rr.r_tilde;
    auto flip = [](const MapTable& in) {
        MapTable out;
        for (std::size_t k = in.t.size(); k-- > 0;) {
            out.t.push_back(-in.t[k]);
            out.phi.push_back(-in.phi[k]);
        }
        return out;
    };
    rec.phi = flip(rr.phi);
    rec.phi_tilde = flip(rr.phi_tilde);
    return rec;
}

// Quadrature defects of the two balancing equations of a record.
inline std::pair<double, double> balance_defects(const ClassificationModel& m,
                                                 const EndpointCertificate& rec, double eps) {
    if (!rec.finite()) return {0.0, 0.0};
    if (rec.side == Side::right) {
        const double b = rec.endpoint;
        return {quad_mass(m, 1, rec.r, b - eps) - quad_mass(m, 0, rec.r, b + eps),
                quad_mass(m, 1, b - eps, rec.r_tilde) - quad_mass(m, 0, b + eps, rec.r_tilde)};
    }
    const double a = rec.endpoint;
    return {quad_mass(m, 1, a + eps, rec.r) - quad_mass(m, 0, a - eps, rec.r),
            quad_mass(m, 1, rec.r_tilde, a + eps) - quad_mass(m, 0, rec.r_tilde, a - eps)};
}

}  // namespace detail

// Builds the explicit transport plan around every boundary point of the
// snapshot. `initial` is the eps = 0 set the snapshot evolved from.
inline ConstructiveCertificate build_certificate(const ClassificationModel& model,
                                                 const BoundarySnapshot& snapshot,
                                                 const IntervalUnion& initial, double delta,
                                                 const CertificateOptions& opt = {}) {
    detail::require_1d(model, "build_certificate");
    if (!(delta > 0.0)) throw ConfigError("build_certificate: delta must be positive");
    if (initial.size() != snapshot.size())
        throw CertificateError("certificate: snapshot and initial set differ in interval count");
    if (snapshot.max_abs_residual() > opt.snapshot_tolerance)
        throw CertificateError("certificate: snapshot residual above tolerance");

    const double eps = snapshot.eps;
    const ClassificationModel mirrored = model.reflected();
    ConstructiveCertificate cert;
    cert.eps = eps;
    cert.delta = delta;
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        const double a = snapshot.lefts[i];
        const double b = snapshot.rights[i];
        const double a0 = initial[i].lo;
        const double b0 = initial[i].hi;
        if (std::isfinite(a) != std::isfinite(a0) || std::isfinite(b) != std::isfinite(b0))
            throw CertificateError("certificate: snapshot and initial set disagree on infinite ends");

        if (std::isfinite(a)) {
            auto rec = detail::mirror(detail::build_right(mirrored, -a, -a0, eps, delta, opt));
            rec.index = i;
            cert.lefts.push_back(std::move(rec));
        } else {
            cert.lefts.push_back(detail::infinite_record(i, Side::left, a));
        }
        if (std::isfinite(b)) {
            auto rec = detail::build_right(model, b, b0, eps, delta, opt);
            rec.index = i;
            cert.rights.push_back(std::move(rec));
        } else {
            cert.rights.push_back(detail::infinite_record(i, Side::right, b));
        }
    }
    for (auto* side : {&cert.lefts, &cert.rights}) {
        for (auto& rec : *side) {
            const auto [d, dt] = detail::balance_defects(model, rec, eps);
            rec.balance_residual = d;
            rec.balance_residual_tilde = dt;
            cert.max_displacement = std::max({cert.max_displacement, rec.phi.max_displacement(),
                                              rec.phi_tilde.max_displacement()});
        }
    }
    return cert;
}

inline ConstructiveCertificate build_certificate(const ClassificationModel& model,
                                                 const BoundarySnapshot& snapshot, double delta,
                                                 const CertificateOptions& opt = {}) {
    return build_certificate(model, snapshot, bayes_set(model), delta, opt);
}

struct VerificationReport {
    bool pass = false;
    std::vector<std::string> failures;
    double identity_lhs = 0.0;  // sum over intervals of int_{r-}^{r+} (w1 rho1 - w0 rho0)
    double identity_rhs = 0.0;  // int_{A^-eps} w1 rho1 - int_{A^eps} w0 rho0
    double identity_defect = 0.0;
    double max_balance_residual = 0.0;
    double max_displacement = 0.0;
    double certified_cost = 0.0;  // 2 lhs + w0 - w1
    double implied_risk = 0.0;    // w1 - lhs
};

struct VerifyOptions {
    double identity_tol = 1e-6;
    double balance_tol = 1e-8;
};

// Rechecks every property of the certificate from scratch by quadrature.
inline VerificationReport verify_certificate(const ClassificationModel& model,
                                             const ConstructiveCertificate& cert,
                                             const BoundarySnapshot& snapshot,
                                             const VerifyOptions& opt = {}) {
    VerificationReport rep;
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };
    const double eps = cert.eps;
    const double slack = 1e-12 * (1.0 + std::abs(eps));

    if (cert.lefts.size() != snapshot.size() || cert.rights.size() != snapshot.size()) {
        fail("certificate does not match the snapshot's interval count");
        return rep;
    }
    if (std::abs(cert.eps - snapshot.eps) > 1e-15) fail("certificate eps differs from snapshot eps");

    auto note_balance = [&](double v, const std::string& what) {
        rep.max_balance_residual = std::max(rep.max_balance_residual, std::abs(v));
        if (!(std::abs(v) <= opt.balance_tol))
            fail(what + ": balance residual " + std::to_string(v));
    };
    auto in = [&](double x, double lo, double hi) { return x >= lo - slack && x <= hi + slack; };

    for (const auto* side : {&cert.lefts, &cert.rights}) {
        for (const auto& rec : *side) {
            const std::string tag = std::string(to_string(rec.side)) + " endpoint " + std::to_string(rec.index);
            const double x = rec.side == Side::left ? snapshot.lefts[rec.index] : snapshot.rights[rec.index];
            if (!(rec.endpoint == x) && !(std::abs(rec.endpoint - x) <= slack)) fail(tag + ": endpoint differs from snapshot");
            if (!rec.finite()) {
                if (rec.r != rec.endpoint || rec.r_tilde != rec.endpoint) fail(tag + ": infinite endpoint needs infinite r");
                continue;
            }
            const double half = 0.5 * cert.delta;
            const double e = rec.endpoint;
            const auto [d, dt] = detail::balance_defects(model, rec, eps);
            note_balance(d, tag + " r");
            note_balance(dt, tag + " r_tilde");

            // Bracket and ordering checks.
            if (rec.side == Side::right) {
                if (!in(rec.r, e - half, rec.initial)) fail(tag + ": r_plus outside [b - delta/2, b(0)]");
                if (!in(rec.r_tilde, rec.initial, e + half)) fail(tag + ": r_tilde_plus outside [b(0), b + delta/2]");
                if (!(rec.r <= e - eps + slack)) fail(tag + ": r_plus above b - eps");
                if (!(rec.r_tilde >= e + eps - slack)) fail(tag + ": r_tilde_plus below b + eps");
            } else {
                if (!in(rec.r, rec.initial, e + half)) fail(tag + ": r_minus outside [a(0), a + delta/2]");
                if (!in(rec.r_tilde, e - half, rec.initial)) fail(tag + ": r_tilde_minus outside [a - delta/2, a(0)]");
                if (!(rec.r >= e + eps - slack)) fail(tag + ": r_minus below a + eps");
                if (!(rec.r_tilde <= e - eps + slack)) fail(tag + ": r_tilde_minus above a - eps");
            }

            // Tabulated maps: mass balance, monotonicity, range, displacement.
            auto check_map = [&](const MapTable& map, const std::string& name, double t_lo, double t_hi,
                                 double p_lo, double p_hi, auto&& defect) {
                if (map.t.size() < 2 || map.t.size() != map.phi.size()) {
                    fail(tag + " " + name + ": malformed table");
                    return;
                }
                if (!in(map.t.front(), t_lo, t_lo) || !in(map.t.back(), t_hi, t_hi))
                    fail(tag + " " + name + ": table does not span its domain");
                for (std::size_t k = 0; k < map.t.size(); ++k) {
                    if (k > 0 && (map.t[k] < map.t[k - 1] || map.phi[k] < map.phi[k - 1]))
                        fail(tag + " " + name + ": map not monotone at sample " + std::to_string(k));
                    if (!in(map.phi[k], p_lo, p_hi)) fail(tag + " " + name + ": image outside range");
                    const double disp = std::abs(map.t[k] - map.phi[k]);
                    rep.max_displacement = std::max(rep.max_displacement, disp);
                    if (disp > 2.0 * eps + slack) fail(tag + " " + name + ": displacement exceeds 2 eps");
                    note_balance(defect(map.t[k], map.phi[k]), tag + " " + name + " sample " + std::to_string(k));
                }
            };
            if (rec.side == Side::right) {
                const double lo = e - eps, hi = e + eps;
                check_map(rec.phi, "phi", rec.r, lo, rec.r, hi, [&](double t, double p) {
                    return detail::quad_mass(model, 1, t, lo) - detail::quad_mass(model, 0, p, hi);
                });
                check_map(rec.phi_tilde, "phi_tilde", lo, rec.r_tilde, hi, rec.r_tilde, [&](double t, double p) {
                    return detail::quad_mass(model, 1, lo, t) - detail::quad_mass(model, 0, hi, p);
                });
            } else {
                const double lo = e - eps, hi = e + eps;
                check_map(rec.phi, "phi", hi, rec.r, lo, rec.r, [&](double t, double p) {
                    return detail::quad_mass(model, 1, hi, t) - detail::quad_mass(model, 0, lo, p);
                });
                check_map(rec.phi_tilde, "phi_tilde", rec.r_tilde, hi, rec.r_tilde, lo, [&](double t, double p) {
                    return detail::quad_mass(model, 1, t, hi) - detail::quad_mass(model, 0, p, lo);
                });
            }
        }
    }

    // Neighbourhoods of consecutive boundary points must not overlap.
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        if (cert.lefts[i].r > cert.rights[i].r)
            fail("interval " + std::to_string(i) + ": r_minus exceeds r_plus");
        if (i + 1 < snapshot.size() && cert.rights[i].r_tilde > cert.lefts[i + 1].r_tilde)
            fail("intervals " + std::to_string(i) + " and " + std::to_string(i + 1) +
                 ": r_tilde_plus exceeds the next r_tilde_minus");
    }

    // The cost identity.
    const IntervalUnion set = snapshot.as_set();
    std::vector<Interval> cores;
    for (std::size_t i = 0; i < snapshot.size(); ++i) cores.push_back({cert.lefts[i].r, cert.rights[i].r});
    double lhs = 0.0;
    for (const auto& c : cores) {
        if (!(c.hi > c.lo)) continue;
        const IntervalUnion piece({c});
        lhs += integrate_over(model, piece, [&](double x) { return model.weighted1(x); }, 1e-11) -
               integrate_over(model, piece, [&](double x) { return model.weighted0(x); }, 1e-11);
    }
    const double rhs =
        integrate_over(model, erode_dilate(set, -eps), [&](double x) { return model.weighted1(x); }, 1e-11) -
        integrate_over(model, erode_dilate(set, eps), [&](double x) { return model.weighted0(x); }, 1e-11);
    rep.identity_lhs = lhs;
    rep.identity_rhs = rhs;
    rep.identity_defect = std::abs(lhs - rhs);
    if (!(rep.identity_defect <= opt.identity_tol))
        fail("cost identity defect " + std::to_string(rep.identity_defect));
    rep.certified_cost = 2.0 * lhs + model.w0() - model.w1();
    rep.implied_risk = model.w1() - lhs;

    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace advflow

#endif  // ADVFLOW_CERTIFICATE_HPP
