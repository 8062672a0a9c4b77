#ifndef ADVFLOW_IO_HPP
#define ADVFLOW_IO_HPP

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "certificate.hpp"
#include "density.hpp"
#include "duality.hpp"
#include "errors.hpp"
#include "evolution1d.hpp"
#include "flow2d.hpp"
#include "interval_union.hpp"

namespace advflow {

using json = nlohmann::json;

// Shortest text that reads back to the same double.
inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_num(const std::string& s) {
    if (s == "inf" || s == "+inf") return inf;
    if (s == "-inf") return -inf;
    if (s == "nan") return std::nan("");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("trailing characters in number: '" + s + "'");
    return v;
}

// ---- models ----------------------------------------------------------------
//
// { "w0": 0.5, "w1": 0.5,
//   "rho0": {"components": [{"mean": [2], "cov": [[4]], "weight": 1}]},
//   "rho1": {"components": [...]} }
//
// "mean" has one or two entries and "cov" is the matching square matrix.
// "weight" defaults to 1 and the weights of a mixture must sum to 1.

namespace detail {

inline double number_at(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

inline GaussianComponent component_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("component must be an object");
    if (!j.contains("mean") || !j.at("mean").is_array()) throw ConfigError("component needs a 'mean' array");
    if (!j.contains("cov") || !j.at("cov").is_array()) throw ConfigError("component needs a 'cov' matrix");
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
    const double weight = j.contains("weight") ? number_at(j, "weight") : 1.0;
    if (mean.size() == 1) {
        if (cov.size() != 1 || cov[0].size() != 1) throw ConfigError("1D component needs a 1x1 'cov'");
        return GaussianComponent::univariate(mean[0], cov[0][0], weight);
    }
    if (mean.size() == 2) {
        if (cov.size() != 2 || cov[0].size() != 2 || cov[1].size() != 2)
            throw ConfigError("2D component needs a 2x2 'cov'");
        if (cov[0][1] != cov[1][0]) throw ConfigError("'cov' must be symmetric");
        return GaussianComponent::bivariate({mean[0], mean[1]}, cov[0][0], cov[0][1], cov[1][1], weight);
    }
    throw ConfigError("component mean must have 1 or 2 entries");
}

inline MixtureDensity mixture_from_json(const json& j) {
    if (!j.is_object() || !j.contains("components") || !j.at("components").is_array())
        throw ConfigError("density needs a 'components' array");
    std::vector<GaussianComponent> comps;
    for (const auto& c : j.at("components")) comps.push_back(component_from_json(c));
    return MixtureDensity(std::move(comps));
}

inline json mixture_to_json(const MixtureDensity& m) {
    json comps = json::array();
    for (const auto& c : m.components()) {
        json jc;
        if (c.dimension() == 1) {
            jc["mean"] = {c.mean1()};
            jc["cov"] = {{c.s11()}};
        } else {
            jc["mean"] = {c.mean().x, c.mean().y};
            jc["cov"] = {{c.s11(), c.s12()}, {c.s12(), c.s22()}};
        }
        jc["weight"] = c.weight();
        comps.push_back(jc);
    }
    return {{"components", comps}};
}

}  // namespace detail

inline ClassificationModel model_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ConfigError("model must be a JSON object");
        if (!j.contains("rho0") || !j.contains("rho1")) throw ConfigError("model needs 'rho0' and 'rho1'");
        return ClassificationModel(detail::mixture_from_json(j.at("rho0")), detail::mixture_from_json(j.at("rho1")),
                                   detail::number_at(j, "w0"), detail::number_at(j, "w1"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

inline json model_to_json(const ClassificationModel& m) {
    return {{"w0", m.w0()}, {"w1", m.w1()}, {"rho0", detail::mixture_to_json(m.rho0())},
            {"rho1", detail::mixture_to_json(m.rho1())}};
}

// ---- interval unions -------------------------------------------------------

namespace detail {

inline json bound_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double bound_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return inf;
        if (s == "-inf") return -inf;
    }
    throw ConfigError("interval bound must be a number, \"inf\" or \"-inf\"");
}

}  // namespace detail

inline json to_json(const IntervalUnion& a) {
    json out = json::array();
    for (const auto& p : a.intervals()) out.push_back({detail::bound_to_json(p.lo), detail::bound_to_json(p.hi)});
    return out;
}

inline IntervalUnion interval_union_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("interval union must be an array of [lo, hi] pairs");
    std::vector<Interval> v;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw ConfigError("interval must be a [lo, hi] pair");
        v.push_back({detail::bound_from_json(p[0]), detail::bound_from_json(p[1])});
    }
    return IntervalUnion(std::move(v));
}

// ---- trajectories ----------------------------------------------------------
//
// eps,endpoint_index,side,position,residual,event_flag
// One row per finite endpoint per snapshot with event_flag 0, then one row per
// halting event with event_flag 1 (residual evaluated at the event position).

struct TrajectoryRow {
    double eps = 0.0;
    std::size_t endpoint_index = 0;
    Side side = Side::right;
    double position = 0.0;
    double residual = 0.0;
    int event_flag = 0;

    bool operator==(const TrajectoryRow&) const = default;
};

inline const char* trajectory_header() { return "eps,endpoint_index,side,position,residual,event_flag"; }

inline std::vector<TrajectoryRow> trajectory_rows(const ClassificationModel& model, const BoundaryTrajectory& t) {
    std::vector<TrajectoryRow> rows;
    for (const auto& s : t.snapshots) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (std::isfinite(s.lefts[i])) rows.push_back({s.eps, i, Side::left, s.lefts[i], s.left_residuals[i], 0});
            if (std::isfinite(s.rights[i]))
                rows.push_back({s.eps, i, Side::right, s.rights[i], s.right_residuals[i], 0});
        }
    }
    for (const auto& e : t.events) {
        const double res = std::isfinite(e.position) ? necessary_residual(model, e.position, e.side, e.eps) : 0.0;
        rows.push_back({e.eps, e.endpoint_index, e.side, e.position, res, 1});
    }
    return rows;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
    os << trajectory_header() << '\n';
    for (const auto& r : rows)
        os << fmt_num(r.eps) << ',' << r.endpoint_index << ',' << to_string(r.side) << ',' << fmt_num(r.position)
           << ',' << fmt_num(r.residual) << ',' << r.event_flag << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::size_t parse_index(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("not an index: '" + s + "'");
    return static_cast<std::size_t>(std::stoull(s));
}

template <class Row, class F>
std::vector<Row> parse_csv(std::istream& is, const std::string& header, std::size_t cols, F&& row) {
    std::string line;
    if (!std::getline(is, line) || line != header) throw ConfigError("csv: expected header '" + header + "'");
    std::vector<Row> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != cols)
            throw ConfigError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns");
        out.push_back(row(cells));
    }
    return out;
}

}  // namespace detail

inline std::vector<TrajectoryRow> parse_trajectory_csv(std::istream& is) {
    return detail::parse_csv<TrajectoryRow>(is, trajectory_header(), 6, [](const std::vector<std::string>& c) {
        TrajectoryRow r;
        r.eps = parse_num(c[0]);
        r.endpoint_index = detail::parse_index(c[1]);
        if (c[2] == "left") r.side = Side::left;
        else if (c[2] == "right") r.side = Side::right;
        else throw ConfigError("side must be 'left' or 'right'");
        r.position = parse_num(c[3]);
        r.residual = parse_num(c[4]);
        if (c[5] != "0" && c[5] != "1") throw ConfigError("event_flag must be 0 or 1");
        r.event_flag = c[5] == "1";
        return r;
    });
}

inline json to_json(const EvolutionEvent& e) {
    return {{"eps", e.eps},
            {"kind", to_string(e.kind)},
            {"detail", e.detail},
            {"endpoint_index", e.endpoint_index},
            {"side", to_string(e.side)},
            {"position", detail::bound_to_json(e.position)}};
}

inline json to_json(const AssumptionReport& r) {
    return {{"crossings", r.crossings},
            {"derivative_gaps", r.derivative_gaps},
            {"min_abs_gap", detail::bound_to_json(r.min_abs_gap)},
            {"finite_count_ok", r.finite_count_ok},
            {"nondegenerate_ok", r.nondegenerate_ok}};
}

// ---- duality reports -------------------------------------------------------

inline const char* dual_header() {
    return "eps,dual_cost,primal_risk,gap,implied_risk,cells,tolerance,certified";
}

inline void write_dual_row(std::ostream& os, const DualReport& r) {
    os << fmt_num(r.eps) << ',' << fmt_num(r.dual_cost) << ',' << fmt_num(r.primal_risk) << ','
       << fmt_num(r.gap) << ',' << fmt_num(r.implied_risk) << ',' << r.cells << ',' << fmt_num(r.tolerance)
       << ',' << (r.certified ? 1 : 0) << '\n';
}

inline std::vector<DualReport> parse_dual_csv(std::istream& is) {
    return detail::parse_csv<DualReport>(is, dual_header(), 8, [](const std::vector<std::string>& c) {
        DualReport r;
        r.eps = parse_num(c[0]);
        r.dual_cost = parse_num(c[1]);
        r.primal_risk = parse_num(c[2]);
        r.gap = parse_num(c[3]);
        r.implied_risk = parse_num(c[4]);
        r.cells = detail::parse_index(c[5]);
        r.tolerance = parse_num(c[6]);
        if (c[7] != "0" && c[7] != "1") throw ConfigError("certified must be 0 or 1");
        r.certified = c[7] == "1";
        return r;
    });
}

inline json to_json(const DualReport& r) {
    return {{"eps", r.eps},           {"dual_cost", r.dual_cost}, {"primal_risk", r.primal_risk},
            {"gap", r.gap},           {"implied_risk", r.implied_risk}, {"cells", r.cells},
            {"tolerance", r.tolerance}, {"certified", r.certified}};
}

// ---- certificates ----------------------------------------------------------

inline json to_json(const MapTable& m) { return {{"t", m.t}, {"phi", m.phi}}; }

inline json to_json(const EndpointCertificate& e) {
    return {{"index", e.index},
            {"side", to_string(e.side)},
            {"endpoint", detail::bound_to_json(e.endpoint)},
            {"initial", detail::bound_to_json(e.initial)},
            {"r", detail::bound_to_json(e.r)},
            {"r_tilde", detail::bound_to_json(e.r_tilde)},
            {"phi", to_json(e.phi)},
            {"phi_tilde", to_json(e.phi_tilde)},
            {"balance_residual", e.balance_residual},
            {"balance_residual_tilde", e.balance_residual_tilde},
            {"slope_margin", detail::bound_to_json(e.slope_margin)}};
}

inline json to_json(const VerificationReport& v) {
    return {{"pass", v.pass},
            {"failures", v.failures},
            {"identity_lhs", v.identity_lhs},
            {"identity_rhs", v.identity_rhs},
            {"identity_defect", v.identity_defect},
            {"max_balance_residual", v.max_balance_residual},
            {"max_displacement", v.max_displacement},
            {"certified_cost", v.certified_cost},
            {"implied_risk", v.implied_risk}};
}

inline json to_json(const ConstructiveCertificate& c, const VerificationReport& v) {
    json lefts = json::array(), rights = json::array();
    for (const auto& e : c.lefts) lefts.push_back(to_json(e));
    for (const auto& e : c.rights) rights.push_back(to_json(e));
    return {{"eps", c.eps},
            {"delta", c.delta},
            {"max_displacement", c.max_displacement},
            {"lefts", lefts},
            {"rights", rights},
            {"verdict", v.pass ? "pass" : "fail"},
            {"verification", to_json(v)}};
}

// ---- curves ----------------------------------------------------------------
//
// eps,vertex_index,x,y,kappa,residual

struct CurveRow {
    double eps = 0.0;
    std::size_t vertex_index = 0;
    double x = 0.0;
    double y = 0.0;
    double kappa = 0.0;
    double residual = 0.0;

    bool operator==(const CurveRow&) const = default;
};

inline const char* curve_header() { return "eps,vertex_index,x,y,kappa,residual"; }

inline void write_curve_csv(std::ostream& os, const std::vector<CurveSnapshot>& snaps) {
    os << curve_header() << '\n';
    for (const auto& s : snaps)
        for (std::size_t i = 0; i < s.curve.size(); ++i)
            os << fmt_num(s.eps) << ',' << i << ',' << fmt_num(s.curve[i].x) << ',' << fmt_num(s.curve[i].y) << ','
               << fmt_num(s.geometry[i].kappa) << ',' << fmt_num(s.residual[i]) << '\n';
}

inline std::vector<CurveRow> parse_curve_csv(std::istream& is) {
    return detail::parse_csv<CurveRow>(is, curve_header(), 6, [](const std::vector<std::string>& c) {
        return CurveRow{parse_num(c[0]), detail::parse_index(c[1]), parse_num(c[2]),
                        parse_num(c[3]), parse_num(c[4]), parse_num(c[5])};
    });
}

inline json curves_to_json(const std::vector<CurveSnapshot>& snaps) {
    json out = json::array();
    for (const auto& s : snaps) {
        json pts = json::array();
        for (const auto& p : s.curve.vertices()) pts.push_back({p.x, p.y});
        out.push_back({{"eps", s.eps}, {"closed", s.curve.closed()}, {"length", s.curve.length()}, {"points", pts}});
    }
    return out;
}

}  // namespace advflow

#endif  // ADVFLOW_IO_HPP
