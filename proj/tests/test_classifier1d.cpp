#include <chrono>

#include <gtest/gtest.h>

#include <advflow/classifier1d.hpp>

#include "common.hpp"

using namespace advflow;
using namespace testing_models;

TEST(Classifier1D, CrossingsMatchClosedForm) {
    const auto xs = bayes_crossings(two_gaussians(), default_window(two_gaussians()));
    ASSERT_EQ(xs.size(), 2u);
    EXPECT_NEAR(xs[0], a0(), 1e-12);
    EXPECT_NEAR(xs[1], b0(), 1e-12);
    const auto a = bayes_set(two_gaussians());
    ASSERT_EQ(a.size(), 1u);
    EXPECT_NEAR(a[0].lo, -2.570917243474, 1e-11);
    EXPECT_NEAR(a[0].hi, 1.237583910141, 1e-11);
}

TEST(Classifier1D, SymmetricModelSplitsAtZero) {
    const auto a = bayes_set(symmetric());
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].lo, -inf);
    EXPECT_NEAR(a[0].hi, 0.0, 1e-15);
}

TEST(Classifier1D, TwoBumpsGiveThreePieces) {
    const auto a = bayes_set(two_bumps());
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a[0].lo, -inf);
    EXPECT_EQ(a[2].hi, inf);
    EXPECT_NEAR(a[1].lo, -a[1].hi, 1e-12);
}

TEST(Classifier1D, DegenerateModelThrows) {
    const ClassificationModel m(MixtureDensity::gaussian(0, 1), MixtureDensity::gaussian(0, 1), 0.5, 0.5);
    EXPECT_THROW(bayes_crossings(m, default_window(m)), DegenerateModelError);
    const auto rep = check_assumptions(m, {});
    EXPECT_FALSE(rep.finite_count_ok);
}

TEST(Classifier1D, AssumptionReport) {
    const auto m = two_gaussians();
    const auto rep = check_assumptions(m, bayes_crossings(m, default_window(m)));
    EXPECT_TRUE(rep.finite_count_ok);
    EXPECT_TRUE(rep.nondegenerate_ok);
    EXPECT_GT(rep.min_abs_gap, 1e-3);
}

TEST(Classifier1D, RobustRiskMatchesSimpson) {
    const auto m = two_gaussians();
    const double a = a0(), b = b0();
    for (double eps : {0.0, 0.1, 0.3}) {
        const double in0 = simpson([&](double x) { return m.weighted0(x); }, a - eps, b + eps);
        const double in1 = simpson([&](double x) { return m.weighted1(x); }, a + eps, b - eps);
        EXPECT_NEAR(robust_risk(m, IntervalUnion({{a, b}}), eps), in0 + 0.5 - in1, 1e-10) << eps;
    }
}

TEST(Classifier1D, BayesSetMinimizesStandardRisk) {
    const auto m = two_gaussians();
    const double base = robust_risk(m, bayes_set(m), 0.0);
    for (double da : {-0.1, 0.0, 0.1})
        for (double db : {-0.1, 0.0, 0.1}) {
            if (da == 0.0 && db == 0.0) continue;
            EXPECT_GT(robust_risk(m, IntervalUnion({{a0() + da, b0() + db}}), 0.0), base);
        }
}

TEST(Classifier1D, RiskIsMonotoneInEps) {
    const auto m = two_gaussians();
    const auto a = bayes_set(m);
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
        const double r = robust_risk(m, a, 0.05 * k);
        EXPECT_GE(r, prev);
        prev = r;
    }
}

TEST(Classifier1D, CrossingsAreFast) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 10; ++i) bayes_set(two_gaussians());
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Classifier1D, RejectsTwoDimensionalModel) {
    EXPECT_THROW(bayes_set(four_gaussians_2d()), DimensionError);
}
