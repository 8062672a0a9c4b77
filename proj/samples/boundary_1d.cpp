// Evolve the Bayes interval of a two-Gaussian model, then certify one eps.
#include <cstdio>

#include <advflow/certificate.hpp>
#include <advflow/classifier1d.hpp>
#include <advflow/duality.hpp>
#include <advflow/evolution1d.hpp>

int main() {
    using namespace advflow;
    const ClassificationModel model(MixtureDensity::gaussian(2.0, 2.0), MixtureDensity::gaussian(0.0, 1.0), 0.5,
                                    0.5);
    const auto bayes = bayes_set(model);
    std::printf("Bayes set [%.6f, %.6f], risk %.5f\n", bayes[0].lo, bayes[0].hi, robust_risk(model, bayes, 0.0));

    const auto traj = evolve(model, bayes, 0.5, 1e-3);
    for (const auto& s : traj.snapshots) {
        const long k = std::lround(s.eps * 1000);
        if (k % 100 != 0) continue;
        std::printf("eps %.1f  a %.6f  b %.6f  robust risk %.5f\n", s.eps, s.lefts[0], s.rights[0],
                    robust_risk(model, s.as_set(), s.eps));
    }

    const double eps = 0.05;
    const auto snap = evolve(model, bayes, eps, 1e-3).back();
    const auto cert = build_certificate(model, snap, bayes, default_delta(model, bayes));
    const auto rep = verify_certificate(model, cert, snap);
    const auto dual = duality_report(model, snap.as_set(), eps, 4000);
    std::printf("eps %.2f certificate %s, identity defect %.2e, duality gap %.2e\n", eps, rep.pass ? "pass" : "fail",
                rep.identity_defect, dual.gap);
    return rep.pass ? 0 : 1;
}
