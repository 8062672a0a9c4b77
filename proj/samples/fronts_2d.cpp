// Front tracking on the radial example and on a four-Gaussian model.
#include <cstdio>

#include <advflow/contour.hpp>
#include <advflow/flow2d.hpp>
#include <advflow/radial.hpp>

int main() {
    using namespace advflow;
    FlowOptions opt;
    opt.snapshots = {0.0, 0.025, 0.05};
    const auto radial = evolve_curve(RadialField{}, Curve2D::circle({}, 0.5, 157), 0.05, 1e-3, opt);
    const auto oracle = radial_oracle(2, 0.5, 0.05, 1e-4);
    for (const auto& s : radial.snapshots)
        std::printf("radial eps %.3f  mean radius %.6f  oracle %.6f  hausdorff %.1e\n", s.eps, mean_radius(s.curve),
                    oracle(s.eps), hausdorff_to_circle(s.curve, {}, oracle(s.eps)));

    auto bump = [](double x, double y) { return GaussianComponent::bivariate({x, y}, 0.2, 0.0, 0.2, 0.5); };
    const ClassificationModel model(MixtureDensity({bump(0.5, -0.5), bump(0.5, 2.0)}),
                                    MixtureDensity({bump(-0.5, -2.0), bump(-0.5, 0.5)}), 0.5, 0.5);
    const auto start = bayes_contour(model, {-3.0, 3.0, -4.5, 4.5});
    opt.snapshots = {0.0, 0.05, 0.1, 0.15, 0.2};
    const auto flow = evolve_curve(model, start, 0.2, 1e-2, opt);
    for (const auto& s : flow.snapshots)
        std::printf("mixture eps %.2f  length %.5f  vertices %zu\n", s.eps, s.curve.length(), s.curve.size());
    return flow.halted() || radial.halted() ? 1 : 0;
}
