#include <cmath>

#include <gtest/gtest.h>

#include <advflow/classifier1d.hpp>
#include <advflow/evolution1d.hpp>

#include "common.hpp"

using namespace advflow;
using namespace testing_models;

namespace {

// Root of the right-endpoint balance condition near b0, found by bisection.
double exact_right(const ClassificationModel& m, double eps) {
    return bisect([&](double b) { return necessary_residual(m, b, Side::right, eps); }, b0() - 0.2, b0() + 1.0);
}

double exact_left(const ClassificationModel& m, double eps) {
    return bisect([&](double a) { return necessary_residual(m, a, Side::left, eps); }, a0() - 2.0, a0() + 0.2);
}

}  // namespace

TEST(Evolution1D, VelocityMatchesImplicitDifferentiation) {
    const auto m = two_gaussians();
    const double h = 1e-4;
    for (double eps : {0.05, 0.2, 0.4}) {
        const double fd_b = (exact_right(m, eps + h) - exact_right(m, eps - h)) / (2 * h);
        const double fd_a = (exact_left(m, eps + h) - exact_left(m, eps - h)) / (2 * h);
        EXPECT_NEAR(velocity_right(m, exact_right(m, eps), eps), fd_b, 1e-6);
        EXPECT_NEAR(velocity_left(m, exact_left(m, eps), eps), fd_a, 1e-6);
    }
}

TEST(Evolution1D, KeepsBalanceAndMatchesRootCurve) {
    const auto m = two_gaussians();
    const auto t = evolve(m, bayes_set(m), 0.5, 1e-3);
    ASSERT_FALSE(t.halted());
    ASSERT_EQ(t.snapshots.size(), 501u);
    for (const auto& s : t.snapshots) EXPECT_LT(s.max_abs_residual(), 1e-6);
    EXPECT_NEAR(t.back().rights[0], exact_right(m, 0.5), 1e-10);
    EXPECT_NEAR(t.back().lefts[0], exact_left(m, 0.5), 1e-10);
}

TEST(Evolution1D, EndpointsMoveApart) {
    const auto m = two_gaussians();
    const auto t = evolve(m, bayes_set(m), 0.5, 1e-3);
    for (std::size_t k = 1; k < t.snapshots.size(); ++k) {
        EXPECT_LT(t.snapshots[k].lefts[0], t.snapshots[k - 1].lefts[0]);
        EXPECT_GT(t.snapshots[k].rights[0], t.snapshots[k - 1].rights[0]);
    }
}

TEST(Evolution1D, SymmetricBoundaryStaysAtZero) {
    const auto m = symmetric();
    const auto t = evolve(m, bayes_set(m), 0.5, 1e-3);
    ASSERT_FALSE(t.halted());
    for (const auto& s : t.snapshots) {
        EXPECT_EQ(s.lefts[0], -inf);
        EXPECT_NEAR(s.rights[0], 0.0, 1e-12);
    }
}

TEST(Evolution1D, TwoBumpsHaltAtCollision) {
    const auto m = two_bumps();
    const auto t = evolve(m, bayes_set(m), 1.5, 1e-3);
    ASSERT_TRUE(t.halted());
    const auto& e = t.events.front();
    EXPECT_EQ(e.kind, EventKind::interval_collision);
    EXPECT_GT(e.eps, 0.0);
    EXPECT_LT(e.eps, 1.5);
    // Nothing past the event is recorded.
    EXPECT_LT(t.back().eps, e.eps);
}

TEST(Evolution1D, UnprojectedRk4IsFourthOrder) {
    const auto m = two_gaussians();
    EvolveOptions opt;
    opt.project = false;
    const double target = exact_right(m, 0.5);
    double err[3];
    const double steps[3] = {0.1, 0.05, 0.025};
    for (int k = 0; k < 3; ++k) {
        opt.step = steps[k];
        err[k] = std::abs(evolve(m, bayes_set(m), 0.5, opt).back().rights[0] - target);
    }
    for (int k = 0; k < 2; ++k) {
        const double order = std::log2(err[k] / err[k + 1]);
        EXPECT_GT(order, 3.5) << k;
        EXPECT_LT(order, 4.5) << k;
    }
}

TEST(Evolution1D, DetectsSmallDenominator) {
    // Far in the tail every term underflows, so the denominator is below the
    // threshold relative to the model's derivative scale.
    const auto m = two_gaussians();
    EXPECT_THROW(velocity_right(m, 60.0, 0.0), DegeneracyError);
}

TEST(Evolution1D, RejectsBadArguments) {
    const auto m = two_gaussians();
    EXPECT_THROW(evolve(m, bayes_set(m), 0.5, -1.0), ConfigError);
    EXPECT_THROW(evolve(four_gaussians_2d(), IntervalUnion({{0, 1}}), 0.5, 1e-3), DimensionError);
}
