#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include <advflow/transport.hpp>

#include "common.hpp"

using namespace advflow;
using namespace testing_models;


TEST(Transport, DualValueMatchesExhaustiveMatching) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> e(0, 16);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_side(rng);
        const auto b = random_side(rng);
        const double eps = e(rng) / 16.0;
        const DiscreteMeasure mu0(a.points, a.masses), mu1(b.points, b.masses);
        const int matched = brute_force_matching(a.units, b.units, 2.0 * eps);
        const double m0 = static_cast<double>(a.units.size()), m1 = static_cast<double>(b.units.size());
        EXPECT_EQ(matched_mass(mu0, mu1, 2.0 * eps), matched) << trial;
        EXPECT_EQ(dual_value(mu0, mu1, eps), m0 + m1 - 2.0 * matched) << trial;
        if (m0 == m1) {
            EXPECT_EQ(dual_value(mu0, mu1, eps, DualMode::balanced), m0 - matched) << trial;
        }
    }
}

TEST(Transport, BalancedModeRejectsUnequalMass) {
    const DiscreteMeasure mu0({0.0}, {1.0}), mu1({0.0}, {2.0});
    EXPECT_THROW(dual_value(mu0, mu1, 0.1, DualMode::balanced), ConfigError);
}

TEST(Transport, ZeroEpsMatchesOnlyCoincidentAtoms) {
    const DiscreteMeasure mu0({0.0, 1.0}, {1.0, 1.0}), mu1({1.0, 2.0}, {1.0, 1.0});
    EXPECT_EQ(dual_value(mu0, mu1, 0.0), 2.0);
    EXPECT_EQ(dual_value(mu0, mu1, 0.5), 0.0);
}

TEST(Transport, RejectsBadMeasures) {
    EXPECT_THROW(DiscreteMeasure({0.0, 1.0}, {1.0}), ConfigError);
    EXPECT_THROW(DiscreteMeasure({0.0}, {-1.0}), ConfigError);
    EXPECT_THROW(dual_value(DiscreteMeasure({0.0}, {1.0}), DiscreteMeasure({0.0}, {1.0}), -0.1), ConfigError);
}

TEST(Transport, DiscretizationKeepsClassMasses) {
    const auto m = two_gaussians();
    const auto d = discretize(m, 4000, default_window(m));
    EXPECT_NEAR(d.mu0.total(), 0.5, 1e-6);
    EXPECT_NEAR(d.mu1.total(), 0.5, 1e-6);
}
