#ifndef ADVFLOW_EXPERIMENT_HPP
#define ADVFLOW_EXPERIMENT_HPP

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "classifier1d.hpp"
#include "contour.hpp"
#include "duality.hpp"
#include "evolution1d.hpp"
#include "field2d.hpp"
#include "flow2d.hpp"
#include "io.hpp"
#include "radial.hpp"

namespace advflow {

enum class Command { bayes, evolve1d, certify, evolve2d, radial };

inline const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::bayes: return "bayes";
        case Command::evolve1d: return "evolve1d";
        case Command::certify: return "certify";
        case Command::evolve2d: return "evolve2d";
        case Command::radial: return "radial";
    }
    return "unknown";
}

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int event = 3;
inline constexpr int certification = 4;
}  // namespace exit_code

// Everything an experiment needs. A config file holds a "model" (a Gaussian
// mixture model object, or the string "radial") plus the numeric knobs below;
// command-line flags override individual knobs.
struct ExperimentConfig {
    std::optional<ClassificationModel> model;
    bool radial_field = false;
    double eps_max = 0.5;
    double step = 1e-3;
    std::size_t grid = 4000;
    std::vector<double> window;      // [lo, hi] or [x0, x1, y0, y1]
    std::vector<double> eps;         // certification / duality values
    std::vector<double> snapshots;   // 2D snapshot values
    double spacing = 0.05;           // 2D vertex spacing
    std::size_t contour_nx = 241;
    std::size_t contour_ny = 361;
    double radius = 0.5;             // radial: initial circle
    EvolutionThresholds thresholds{};
    std::string output_dir = "out";
    bool certify = false;

    int dimension() const {
        if (radial_field) return 2;
        return model ? model->dimension() : 0;
    }
};

namespace detail {

inline std::vector<double> number_list(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline std::size_t count_at(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ConfigError(std::string("field '") + key + "' must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
        if (!j.contains("model")) throw ConfigError("config needs a 'model'");
        const auto& m = j.at("model");
        if (m.is_string()) {
            if (m.get<std::string>() != "radial") throw ConfigError("unknown built-in model '" + m.get<std::string>() + "'");
            c.radial_field = true;
        } else {
            c.model = model_from_json(m);
        }
        if (j.contains("eps_max")) c.eps_max = detail::number_at(j, "eps_max");
        if (j.contains("step")) c.step = detail::number_at(j, "step");
        if (j.contains("grid")) c.grid = detail::count_at(j, "grid");
        if (j.contains("window")) c.window = detail::number_list(j, "window");
        if (j.contains("eps")) c.eps = detail::number_list(j, "eps");
        if (j.contains("snapshots")) c.snapshots = detail::number_list(j, "snapshots");
        if (j.contains("spacing")) c.spacing = detail::number_at(j, "spacing");
        if (j.contains("radius")) c.radius = detail::number_at(j, "radius");
        if (j.contains("contour_grid")) {
            const auto g = detail::number_list(j, "contour_grid");
            if (g.size() != 2 || g[0] < 2 || g[1] < 2) throw ConfigError("'contour_grid' must be [nx, ny] with both >= 2");
            c.contour_nx = static_cast<std::size_t>(g[0]);
            c.contour_ny = static_cast<std::size_t>(g[1]);
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            if (t.contains("degeneracy")) c.thresholds.degeneracy = detail::number_at(t, "degeneracy");
            if (t.contains("residual")) c.thresholds.residual = detail::number_at(t, "residual");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

// Checks the fields a command relies on.
inline void validate(const ExperimentConfig& c, Command cmd) {
    if (!(c.eps_max > 0.0)) throw ConfigError("eps_max must be positive");
    if (!(c.step > 0.0)) throw ConfigError("step must be positive");
    if (!(c.spacing > 0.0)) throw ConfigError("spacing must be positive");
    for (double e : c.eps)
        if (!(e >= 0.0)) throw ConfigError("eps values must be nonnegative");
    for (double e : c.snapshots)
        if (!(e >= 0.0 && e <= c.eps_max)) throw ConfigError("snapshots must lie in [0, eps_max]");
    const int d = c.dimension();
    switch (cmd) {
        case Command::evolve1d:
        case Command::certify:
            if (d != 1) throw DimensionError(std::string(to_string(cmd)) + ": needs a one-dimensional model");
            if (!c.window.empty() && (c.window.size() != 2 || !(c.window[1] > c.window[0])))
                throw ConfigError("1D window must be [lo, hi] with lo < hi");
            break;
        case Command::bayes:
            if (d == 2 && !c.radial_field && c.window.size() != 4)
                throw ConfigError("bayes: a 2D model needs a window [x0, x1, y0, y1]");
            break;
        case Command::evolve2d:
            if (d != 2) throw DimensionError("evolve2d: needs a two-dimensional model");
            if (!c.radial_field && c.window.size() != 4)
                throw ConfigError("evolve2d: needs a window [x0, x1, y0, y1]");
            break;
        case Command::radial:
            if (!c.radial_field) throw ConfigError("radial: the model must be \"radial\"");
            if (!(c.radius > c.eps_max)) throw ConfigError("radial: radius must exceed eps_max");
            break;
    }
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text;
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

inline std::filesystem::path prepare_out(const ExperimentConfig& c) {
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.output_dir + ": " + ec.message());
    return c.output_dir;
}

inline Window window_1d(const ExperimentConfig& c) {
    return c.window.size() == 2 ? Window{c.window[0], c.window[1]} : default_window(*c.model);
}

inline Window2D window_2d(const ExperimentConfig& c) {
    if (c.window.size() == 4) return {c.window[0], c.window[1], c.window[2], c.window[3]};
    return {-1.0, 1.0, -1.0, 1.0};
}

inline std::string sci(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

inline std::string eps_tag(double e) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", e);
    return buf;
}

inline std::vector<double> default_snapshots(double eps_max) {
    std::vector<double> s;
    for (int k = 0; k <= 4; ++k) s.push_back(eps_max * k / 4.0);
    return s;
}

// Evolves the Bayes set to exactly e and returns the final snapshot, or the
// halting event.
inline std::pair<std::optional<BoundarySnapshot>, std::optional<EvolutionEvent>> evolve_to(
    const ExperimentConfig& c, const IntervalUnion& initial, double e) {
    if (e == 0.0) return {make_snapshot(*c.model, initial, 0.0), std::nullopt};
    EvolveOptions opt;
    opt.step = c.step;
    opt.thresholds = c.thresholds;
    const auto t = evolve(*c.model, initial, e, opt);
    if (t.halted()) return {std::nullopt, t.events.front()};
    return {t.back(), std::nullopt};
}

template <ClassField2D F>
int run_flow(const F& f, const Curve2D& initial, const ExperimentConfig& c, std::ostream& log,
             std::vector<CurveSnapshot>* snaps_out = nullptr) {
    const auto out = prepare_out(c);
    FlowOptions opt;
    opt.spacing = c.spacing;
    opt.snapshots = c.snapshots.empty() ? default_snapshots(c.eps_max) : c.snapshots;
    if (c.window.size() == 4) opt.window = window_2d(c);
    const auto t = evolve_curve(f, initial, c.eps_max, c.step, opt);

    std::ostringstream csv;
    write_curve_csv(csv, t.snapshots);
    write_file(out / "curves.csv", csv.str());
    write_json(out / "curves.json", curves_to_json(t.snapshots));

    std::ostringstream sum;
    sum << "eps,length,vertices,max_residual,max_perimeter_residual\n";
    for (const auto& s : t.snapshots) {
        double res = 0.0, per = 0.0;
        const auto pr = perimeter_regularization_residual(f, s.curve, s.eps);
        for (std::size_t i = 0; i < s.curve.size(); ++i) {
            if (!s.curve.closed() && (i == 0 || i + 1 == s.curve.size())) continue;
            res = std::max(res, std::abs(s.residual[i]));
            per = std::max(per, std::abs(pr[i]));
        }
        sum << fmt_num(s.eps) << ',' << fmt_num(s.curve.length()) << ',' << s.curve.size() << ','
            << fmt_num(res) << ',' << fmt_num(per) << '\n';
        log << "eps " << eps_tag(s.eps) << ": length " << s.curve.length() << ", " << s.curve.size()
            << " vertices, max residual " << sci(res) << "\n";
    }
    write_file(out / "summary.csv", sum.str());

    json events = json::array();
    for (const auto& e : t.events)
        events.push_back({{"eps", e.eps}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
    write_json(out / "events.json", events);
    if (snaps_out) *snaps_out = t.snapshots;
    if (t.halted()) {
        const auto& e = t.events.front();
        log << "evolution halted at eps " << eps_tag(e.eps) << ": " << to_string(e.kind) << " (" << e.detail << ")\n";
        return exit_code::event;
    }
    return exit_code::ok;
}

}  // namespace detail

// Bayes set (1D) or Bayes contour (2D) at eps = 0.
inline int run_bayes(const ExperimentConfig& c, std::ostream& log) {
    validate(c, Command::bayes);
    const auto out = detail::prepare_out(c);
    if (c.dimension() == 1) {
        const auto w = detail::window_1d(c);
        const auto xs = bayes_crossings(*c.model, w);
        const auto a = bayes_set(*c.model, w);
        const auto rep = check_assumptions(*c.model, xs, c.thresholds.degeneracy);
        const double risk = robust_risk(*c.model, a, 0.0);
        detail::write_json(out / "bayes.json", {{"crossings", xs},
                                                {"set", to_json(a)},
                                                {"risk", risk},
                                                {"assumptions", to_json(rep)}});
        log << "crossings:";
        for (double x : xs) log << ' ' << fmt_num(x);
        log << "\nrisk " << fmt_num(risk) << "\n";
        return exit_code::ok;
    }
    ContourOptions co;
    co.nx = c.contour_nx;
    co.ny = c.contour_ny;
    co.spacing = c.spacing;
    std::vector<CurveSnapshot> snaps;
    auto extract = [&](const auto& f) {
        for (const auto& k : zero_contours(f, detail::window_2d(c), co)) snaps.push_back(make_curve_snapshot(f, k, 0.0));
    };
    if (c.radial_field) extract(RadialField{});
    else extract(*c.model);
    std::ostringstream csv;
    write_curve_csv(csv, snaps);
    detail::write_file(out / "contour.csv", csv.str());
    detail::write_json(out / "contour.json", curves_to_json(snaps));
    log << snaps.size() << " contour piece(s); longest has length " << snaps.front().curve.length() << "\n";
    return exit_code::ok;
}

inline int run_evolve1d(const ExperimentConfig& c, std::ostream& log) {
    validate(c, Command::evolve1d);
    const auto out = detail::prepare_out(c);
    const auto& m = *c.model;
    const auto w = detail::window_1d(c);
    const auto xs = bayes_crossings(m, w);
    const auto initial = bayes_set(m, w);
    detail::write_json(out / "assumptions.json", to_json(check_assumptions(m, xs, c.thresholds.degeneracy)));

    EvolveOptions opt;
    opt.step = c.step;
    opt.thresholds = c.thresholds;
    const auto t = evolve(m, initial, c.eps_max, opt);
    std::ostringstream csv;
    write_trajectory_csv(csv, trajectory_rows(m, t));
    detail::write_file(out / "trajectory.csv", csv.str());
    json events = json::array();
    for (const auto& e : t.events) events.push_back(to_json(e));
    detail::write_json(out / "events.json", events);

    if (c.certify) {
        std::ostringstream dual;
        dual << dual_header() << '\n';
        const std::vector<double> grid_eps = c.eps.empty() ? std::vector<double>{0.05, 0.1, 0.2} : c.eps;
        for (double e : grid_eps) {
            if (e > t.back().eps + 1e-12) continue;
            const auto [snap, ev] = detail::evolve_to(c, initial, e);
            if (!snap) continue;
            const auto r = duality_report(m, snap->as_set(), e, c.grid, w);
            write_dual_row(dual, r);
            log << "eps " << detail::eps_tag(e) << ": duality gap " << detail::sci(r.gap)
                << (r.certified ? " (within tolerance)" : " (outside tolerance)") << "\n";
        }
        detail::write_file(out / "duality.csv", dual.str());
    }
    log << t.snapshots.size() << " snapshot(s) up to eps " << detail::eps_tag(t.back().eps) << "\n";
    if (t.halted()) {
        const auto& e = t.events.front();
        log << "evolution halted at eps " << detail::eps_tag(e.eps) << ": " << to_string(e.kind) << " (" << e.detail
            << ")\n";
        return exit_code::event;
    }
    return exit_code::ok;
}

inline int run_certify(const ExperimentConfig& c, std::ostream& log) {
    validate(c, Command::certify);
    const auto out = detail::prepare_out(c);
    const auto& m = *c.model;
    const auto w = detail::window_1d(c);
    const auto initial = bayes_set(m, w);
    const std::vector<double> values = c.eps.empty() ? std::vector<double>{0.0, 0.05, 0.1} : c.eps;

    std::ostringstream dual;
    dual << dual_header() << '\n';
    bool all_pass = true;
    for (double e : values) {
        const std::string tag = detail::eps_tag(e);
        const auto [snap, ev] = detail::evolve_to(c, initial, e);
        if (!snap) {
            all_pass = false;
            log << "eps " << tag << ": fail: evolution halted at eps " << detail::eps_tag(ev->eps) << " ("
                << ev->detail << ")\n";
            continue;
        }
        const auto r = duality_report(m, snap->as_set(), e, c.grid, w);
        write_dual_row(dual, r);
        try {
            const auto cert = build_certificate(m, *snap, initial, default_delta(m, initial));
            const auto v = verify_certificate(m, cert, *snap);
            json doc = to_json(cert, v);
            doc["duality"] = to_json(r);
            detail::write_json(out / ("certificate_eps" + tag + ".json"), doc);
            if (v.pass) {
                log << "eps " << tag << ": pass (identity defect " << detail::sci(v.identity_defect)
                    << ", max displacement " << v.max_displacement << ")\n";
            } else {
                all_pass = false;
                log << "eps " << tag << ": fail: " << (v.failures.empty() ? "unknown" : v.failures.front()) << "\n";
            }
        } catch (const CertificateError& err) {
            all_pass = false;
            detail::write_json(out / ("certificate_eps" + tag + ".json"),
                               {{"eps", e}, {"verdict", "fail"}, {"reason", err.what()}, {"duality", to_json(r)}});
            log << "eps " << tag << ": fail: " << err.what() << "\n";
        }
    }
    detail::write_file(out / "duality.csv", dual.str());
    return all_pass ? exit_code::ok : exit_code::certification;
}

inline int run_evolve2d(const ExperimentConfig& c, std::ostream& log) {
    validate(c, Command::evolve2d);
    ContourOptions co;
    co.nx = c.contour_nx;
    co.ny = c.contour_ny;
    co.spacing = c.spacing;
    if (c.radial_field) {
        const RadialField f;
        return detail::run_flow(f, bayes_contour(f, detail::window_2d(c), co), c, log);
    }
    return detail::run_flow(*c.model, bayes_contour(*c.model, detail::window_2d(c), co), c, log);
}

// Front tracking from a circle of the given radius, checked against the
// radial ODE integrated on a fine grid.
inline int run_radial(const ExperimentConfig& c, std::ostream& log) {
    validate(c, Command::radial);
    const auto out = detail::prepare_out(c);
    const auto n = static_cast<std::size_t>(std::lround(2.0 * std::numbers::pi * c.radius / c.spacing));
    const auto circle = Curve2D::circle({}, c.radius, std::max<std::size_t>(n, 8));
    std::vector<CurveSnapshot> snaps;
    const int code = detail::run_flow(RadialField{}, circle, c, log, &snaps);
    const auto sol = radial_oracle(2, c.radius, c.eps_max, std::min(c.step, 1e-4));
    std::ostringstream csv;
    csv << "eps,oracle_radius,mean_radius,hausdorff\n";
    for (const auto& s : snaps) {
        const double r = sol(s.eps);
        const double h = hausdorff_to_circle(s.curve, {}, r);
        csv << fmt_num(s.eps) << ',' << fmt_num(r) << ',' << fmt_num(mean_radius(s.curve)) << ',' << fmt_num(h)
            << '\n';
        log << "eps " << detail::eps_tag(s.eps) << ": oracle radius " << r << ", hausdorff " << detail::sci(h)
            << "\n";
    }
    detail::write_file(out / "oracle.csv", csv.str());
    return code;
}

inline int run(Command cmd, const ExperimentConfig& c, std::ostream& log) {
    switch (cmd) {
        case Command::bayes: return run_bayes(c, log);
        case Command::evolve1d: return run_evolve1d(c, log);
        case Command::certify: return run_certify(c, log);
        case Command::evolve2d: return run_evolve2d(c, log);
        case Command::radial: return run_radial(c, log);
    }
    return exit_code::failure;
}

// Maps library errors onto exit codes; config, dimension, degenerate-model and
// contour errors are all problems with the input.
inline int run_guarded(Command cmd, const ExperimentConfig& c, std::ostream& log, std::ostream& err) {
    try {
        return run(cmd, c, log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const DimensionError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const DegenerateModelError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const GeometryError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::failure;
    }
    return exit_code::config;
}

}  // namespace advflow

#endif  // ADVFLOW_EXPERIMENT_HPP
