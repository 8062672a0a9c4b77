// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <advflow/certificate.hpp>
#include <advflow/classifier1d.hpp>
#include <advflow/contour.hpp>
#include <advflow/duality.hpp>
#include <advflow/evolution1d.hpp>
#include <advflow/flow2d.hpp>
#include <advflow/radial.hpp>
#include <advflow/transport.hpp>

#include "common.hpp"

using namespace advflow;
using namespace testing_models;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double interior_max(const Curve2D& c, const std::vector<double>& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.closed() && (i == 0 || i + 1 == c.size())) continue;
        m = std::max(m, std::abs(v[i]));
    }
    return m;
}

Outcome bayes_boundary() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = two_gaussians();
    const auto xs = bayes_crossings(m, default_window(m));
    const double t = seconds_since(t0);
    o.require(xs.size() == 2, "expected two crossings");
    if (xs.size() != 2) return o;
    const double da = std::abs(xs[0] - a0()), db = std::abs(xs[1] - b0());
    o.require(da <= 1e-8 && db <= 1e-8, "crossing error " + sci(std::max(da, db)));
    o.require(t < 1.0, "runtime " + std::to_string(t) + " s");
    if (o.pass) o.detail = "a1(0) error " + sci(da) + ", b1(0) error " + sci(db) + ", " + std::to_string(t) + " s";
    return o;
}

BoundaryTrajectory reference_trajectory() {
    const auto m = two_gaussians();
    return evolve(m, bayes_set(m), 0.5, 1e-3);
}

Outcome residual_conservation() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto tr = reference_trajectory();
    const double t = seconds_since(t0);
    double worst = 0.0;
    for (const auto& s : tr.snapshots) worst = std::max(worst, s.max_abs_residual());
    o.require(!tr.halted(), "evolution halted");
    o.require(tr.snapshots.size() == 501 && std::abs(tr.back().eps - 0.5) < 1e-12, "did not reach eps 0.5");
    o.require(worst < 1e-6, "max residual " + sci(worst));
    o.require(t < 5.0, "runtime " + std::to_string(t) + " s");
    if (o.pass) o.detail = "max residual " + sci(worst) + " over 501 steps, " + std::to_string(t) + " s";
    return o;
}

Outcome endpoint_monotonicity() {
    Outcome o;
    const auto tr = reference_trajectory();
    for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
        o.require(tr.snapshots[k].lefts[0] < tr.snapshots[k - 1].lefts[0], "a not decreasing at step " + std::to_string(k));
        o.require(tr.snapshots[k].rights[0] > tr.snapshots[k - 1].rights[0], "b not increasing at step " + std::to_string(k));
        if (!o.pass) return o;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "a: %.4f -> %.4f, b: %.4f -> %.4f", tr.snapshots.front().lefts[0],
                  tr.back().lefts[0], tr.snapshots.front().rights[0], tr.back().rights[0]);
    o.detail = buf;
    return o;
}

Outcome duality_gap() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = two_gaussians();
    std::string d;
    for (double eps : {0.05, 0.1, 0.2}) {
        const auto a = evolve(m, bayes_set(m), eps, 1e-3).back().as_set();
        d += "eps " + std::to_string(eps).substr(0, 4) + ":";
        // The bound 2e-3 at n = 4000 must at least halve with each doubling.
        for (std::size_t n : {4000u, 8000u, 16000u}) {
            const double gap = duality_report(m, a, eps, n).gap;
            const double bound = 2e-3 * 4000.0 / static_cast<double>(n);
            o.require(std::abs(gap) <= bound, "gap " + sci(gap) + " at eps " + std::to_string(eps) + ", n " +
                                                  std::to_string(n) + " exceeds " + sci(bound));
            d += " " + sci(gap);
        }
        d += "; ";
    }
    const double t = seconds_since(t0);
    o.require(t < 30.0, "runtime " + std::to_string(t) + " s");
    if (o.pass) o.detail = d + std::to_string(t) + " s";
    return o;
}

Outcome certificate() {
    Outcome o;
    const auto m = two_gaussians();
    const auto bayes = bayes_set(m);
    const auto snap = evolve(m, bayes, 0.05, 1e-3).back();
    const auto cert = build_certificate(m, snap, bayes, default_delta(m, bayes));
    const auto v = verify_certificate(m, cert, snap);
    o.require(v.pass, "verification failed: " + (v.failures.empty() ? std::string("?") : v.failures.front()));
    o.require(v.identity_defect < 1e-6, "identity defect " + sci(v.identity_defect));
    o.require(cert.max_displacement <= 0.1 + 1e-12, "displacement " + sci(cert.max_displacement));
    auto bad = cert;
    bad.rights[0].r += 0.05;
    const auto vb = verify_certificate(m, bad, snap);
    o.require(!vb.pass, "perturbed certificate passed");
    if (o.pass)
        o.detail = "identity defect " + sci(v.identity_defect) + ", displacement " + sci(cert.max_displacement) +
                   ", perturbed copy rejected (" + std::to_string(vb.failures.size()) + " failures)";
    return o;
}

Outcome brute_force_transport() {
    Outcome o;
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> e(0, 16);
    int agree = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_side(rng);
        const auto b = random_side(rng);
        const double eps = e(rng) / 16.0;
        const double expect = static_cast<double>(a.units.size() + b.units.size()) -
                              2.0 * brute_force_matching(a.units, b.units, 2.0 * eps);
        const double got = dual_value(DiscreteMeasure(a.points, a.masses), DiscreteMeasure(b.points, b.masses), eps);
        if (got == expect) ++agree;
        else o.require(false, "instance " + std::to_string(trial) + ": " + std::to_string(got) + " vs " + std::to_string(expect));
    }
    if (o.pass) o.detail = std::to_string(agree) + "/100 instances exact";
    return o;
}

Outcome radial_example() {
    Outcome o;
    const auto sol = radial_oracle(2, 0.5, 0.05, 1e-4);
    FlowOptions opt;
    opt.snapshots = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    const auto tr = evolve_curve(RadialField{}, Curve2D::circle({}, 0.5, 157), 0.05, 1e-3, opt);
    o.require(!tr.halted(), "front tracking halted");
    o.require(tr.snapshots.size() == 6, "missing snapshots");
    double worst = 0.0;
    for (const auto& s : tr.snapshots) worst = std::max(worst, hausdorff_to_circle(s.curve, {}, sol(s.eps)));
    o.require(worst < 1e-3, "Hausdorff " + sci(worst));
    const double v_ode = radial_velocity(2, 0.5, 0.0);
    const double v_flow = normal_speed(RadialField{}, {0.5, 0.0}, {1.0, 0.0}, 2.0);
    o.require(std::abs(v_ode + 1.0) < 1e-6 && std::abs(v_flow + 1.0) < 1e-6,
              "dr/deps = " + std::to_string(v_ode) + ", flow speed " + std::to_string(v_flow));
    if (o.pass) o.detail = "max Hausdorff " + sci(worst) + ", dr/deps(0) = " + std::to_string(v_ode);
    return o;
}

Outcome necessary_condition_2d() {
    Outcome o;
    const auto sol = radial_oracle(2, 0.5, 0.05, 1e-4);
    double radial = 0.0;
    for (double eps : {0.0, 0.01, 0.02, 0.03, 0.04, 0.05}) {
        const auto c = Curve2D::circle({}, sol(eps), 400);
        radial = std::max(radial, interior_max(c, necessary_residual_2d(RadialField{}, c, eps)));
    }
    o.require(radial < 1e-6, "radial residual " + sci(radial));

    const auto m = four_gaussians_2d();
    const Window2D w{-3, 3, -4.5, 4.5};
    FlowOptions opt;
    opt.window = w;
    opt.snapshots = {0.005, 0.01, 0.02};
    const auto tr = evolve_curve(m, bayes_contour(m, w), 0.02, 1e-3, opt);
    o.require(tr.snapshots.size() == 3, "mixture flow halted");
    if (tr.snapshots.size() != 3) return o;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::string vals;
    for (const auto& s : tr.snapshots) {
        const double r = interior_max(s.curve, perimeter_regularization_residual(m, s.curve, s.eps));
        const double x = std::log(s.eps), y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        vals += " " + sci(r);
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    o.require(std::abs(slope - 2.0) <= 0.3, "log-log slope " + std::to_string(slope));
    if (o.pass) o.detail = "radial residual " + sci(radial) + "; perimeter residuals" + vals + ", slope " + std::to_string(slope);
    return o;
}

Outcome property_suites() {
    Outcome o;
    // Morphology duality on random dyadic unions.
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> pt(-64, 64), cnt(1, 5), rad(0, 16);
    double defect = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Interval> v;
        for (int k = cnt(rng); k > 0; --k) {
            double lo = pt(rng) / 8.0, hi = pt(rng) / 8.0;
            if (lo > hi) std::swap(lo, hi);
            v.push_back({lo, hi});
        }
        const IntervalUnion a(v);
        const double s = rad(rng) / 16.0;
        defect = std::max(defect, symmetric_difference_measure(erode_dilate(a, s).complement(),
                                                               erode_dilate(a.complement(), -s)));
    }
    o.require(defect == 0.0, "morphology defect " + sci(defect));

    // Robust risk of a fixed set is nondecreasing in eps.
    const auto m = two_gaussians();
    double prev = -1.0;
    for (int k = 0; k <= 10; ++k) {
        const double r = robust_risk(m, bayes_set(m), 0.05 * k);
        o.require(r >= prev, "risk decreased at eps " + std::to_string(0.05 * k));
        prev = r;
    }

    // Density gradients against central differences.
    double grad_err = 0.0;
    const double h = 1e-5;
    const auto m2 = four_gaussians_2d();
    for (double x : {-3.0, -1.0, 0.2, 1.5, 4.0}) {
        grad_err = std::max(grad_err, std::abs(m.dweighted0(x) - (m.weighted0(x + h) - m.weighted0(x - h)) / (2 * h)));
        grad_err = std::max(grad_err, std::abs(m.dweighted1(x) - (m.weighted1(x + h) - m.weighted1(x - h)) / (2 * h)));
        const Vec2 p{0.3 * x, -0.5 * x};
        const Vec2 g = m2.grad_weighted0(p);
        grad_err = std::max(grad_err, std::abs(g.x - (m2.weighted0(p + Vec2{h, 0}) - m2.weighted0(p - Vec2{h, 0})) / (2 * h)));
        grad_err = std::max(grad_err, std::abs(g.y - (m2.weighted0(p + Vec2{0, h}) - m2.weighted0(p - Vec2{0, h})) / (2 * h)));
    }
    o.require(grad_err < 1e-7, "gradient error " + sci(grad_err));

    // Discrete curvature of circles.
    double kappa_err = 0.0;
    for (double r : {0.25, 1.0, 3.0}) {
        const auto c = Curve2D::circle({0.3, -0.2}, r, 256);
        for (const auto& g : normals_and_curvature(c)) kappa_err = std::max(kappa_err, std::abs(g.kappa * r - 1.0));
    }
    o.require(kappa_err < 1e-3, "relative curvature error " + sci(kappa_err));

    // RK4 order: unprojected 1D system and the radial ODE.
    const auto bayes = bayes_set(m);
    const double b_exact = bisect([&](double b) { return necessary_residual(m, b, Side::right, 0.5); }, b0(), b0() + 1.0);
    EvolveOptions eo;
    eo.project = false;
    double e1[2], e2[2];
    for (int k = 0; k < 2; ++k) {
        eo.step = 0.05 / (1 << k);
        e1[k] = std::abs(evolve(m, bayes, 0.5, eo).back().rights[0] - b_exact);
        e2[k] = std::abs(radial_oracle(2, 0.5, 0.05, 0.0125 / (1 << k)).radius().back() - radial_exact(0.05));
    }
    const double p1 = std::log2(e1[0] / e1[1]), p2 = std::log2(e2[0] / e2[1]);
    o.require(p1 > 3.5 && p1 < 4.5, "1D RK4 order " + std::to_string(p1));
    o.require(p2 > 3.5 && p2 < 4.5, "radial RK4 order " + std::to_string(p2));
    if (o.pass)
        o.detail = "morphology defect 0, gradient error " + sci(grad_err) + ", curvature error " + sci(kappa_err) +
                   ", RK4 orders " + std::to_string(p1).substr(0, 4) + " / " + std::to_string(p2).substr(0, 4);
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"Bayes boundary reproduction", bayes_boundary},
        {"ODE residual conservation", residual_conservation},
        {"Endpoint monotonicity", endpoint_monotonicity},
        {"Duality gap", duality_gap},
        {"Constructive certificate", certificate},
        {"Brute-force transport equivalence", brute_force_transport},
        {"Radial example", radial_example},
        {"2D necessary-condition residual", necessary_condition_2d},
        {"Property suites", property_suites},
    };
    int failed = 0, k = 0;
    for (const auto& [name, check] : criteria) {
        ++k;
        Outcome r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        if (!r.pass) ++failed;
        std::printf("[%s] %d. %s: %s\n", r.pass ? "PASS" : "FAIL", k, name, r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", k - failed, k);
    return failed == 0 ? 0 : 1;
}
