#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tcone/cones.hpp"
#include "tcone/constants.hpp"

using namespace tcone;

namespace {

// g(theta) from series-oracle Legendre values.
double oracle_residual(double theta, double ratio) {
    const double c = std::cos(theta);
    const auto [pc, dpc] = oracle::legendre_half(c);
    const auto [pm, dpm] = oracle::legendre_half(-c);
    return ratio * pm * dpc + pc * dpm;
}

MaterialConfig cfg3(double ratio) {
    MaterialConfig cfg;
    cfg.n = 3;
    cfg.alpha = 1.0;
    cfg.beta = ratio;
    return cfg;
}

}  // namespace

TEST(Cones, ResidualAffineInRatio) {
    const double a = cones::transmission_residual(0.8, 10.0);
    const double b = cones::transmission_residual(0.8, 30.0);
    EXPECT_NEAR(cones::transmission_residual(0.8, 20.0), 0.5 * (a + b), 1e-14);
}

TEST(Cones, ResidualMatchesSeriesOracle) {
    EXPECT_NEAR(cones::transmission_residual(0.8, 17.59), oracle_residual(0.8, 17.59), 1e-10);
}

TEST(Cones, TwoSignChangesAtRatioThirty) {
    int changes = 0;
    double prev = cones::transmission_residual(1e-4, 30.0);
    for (int k = 1; k <= 2000; ++k) {
        const double th = 1e-4 + (0.5 * std::numbers::pi - 2e-4) * k / 2000.0;
        const double g = cones::transmission_residual(th, 30.0);
        if ((g < 0.0) != (prev < 0.0)) ++changes;
        prev = g;
    }
    EXPECT_EQ(changes, 2);
}

TEST(Cones, CriticalAnglesMatchScanBisection) {
    const auto roots = cones::critical_angles(30.0);
    ASSERT_EQ(roots.size(), 2u);
    const auto ref = oracle::scan_roots([](double t) { return oracle_residual(t, 30.0); }, 1e-4,
                                        0.5 * std::numbers::pi - 1e-4, 100000);
    ASSERT_EQ(ref.size(), 2u);
    EXPECT_NEAR(roots[0], ref[0], 1e-8);
    EXPECT_NEAR(roots[1], ref[1], 1e-8);
    EXPECT_NEAR(roots[0], 0.2579237525, 1e-9);
    EXPECT_NEAR(roots[1], 0.7474510892, 1e-9);
}

TEST(Cones, NoRootsBelowThreshold) {
    EXPECT_TRUE(cones::critical_angles(10.0).empty());
    const double l0 = constants::to_double(constants::lambda0(3));
    EXPECT_TRUE(cones::critical_angles(l0).empty());
    EXPECT_TRUE(cones::critical_angles(1.01).empty());
}

TEST(Cones, ThresholdTwoWays) {
    const auto bis = cones::critical_threshold(1e-6);
    const auto newton = cones::critical_threshold_newton();
    EXPECT_NEAR(bis.lambda1, 17.59, 0.05);
    EXPECT_NEAR(bis.lambda1, newton.lambda1, 1e-4);
    EXPECT_NEAR(newton.lambda1, 17.5986398677, 1e-8);
    EXPECT_NEAR(newton.theta_star, std::numbers::pi / 6.0, 1e-8);
    EXPECT_TRUE(cones::critical_angles(bis.lambda1 - 1e-5).empty());
    EXPECT_EQ(cones::critical_angles(bis.lambda1 + 1e-5).size(), 2u);
    const auto near = cones::critical_angles(bis.lambda1 + 1e-3);
    ASSERT_EQ(near.size(), 2u);
    EXPECT_LT(near[1] - near[0], 0.1);
}

TEST(Cones, DoubleRootConsistency) {
    const auto bp = cones::critical_threshold_newton();
    const double tol = 1e-10;
    EXPECT_LE(std::abs(cones::transmission_residual(bp.theta_star, bp.lambda1)), tol);
    const double h = 1e-6;
    const double dg = (cones::transmission_residual(bp.theta_star + h, bp.lambda1) -
                       cones::transmission_residual(bp.theta_star - h, bp.lambda1)) / (2 * h);
    EXPECT_LE(std::abs(dg), std::sqrt(tol));
}

TEST(Cones, BifurcationRows) {
    const auto rows = cones::bifurcation_diagram({10.0, 17.0, 18.0, 30.0});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].roots.size(), 0u);
    EXPECT_EQ(rows[1].roots.size(), 0u);
    EXPECT_EQ(rows[2].roots.size(), 2u);
    EXPECT_EQ(rows[3].roots.size(), 2u);
}

TEST(Cones, SolutionContinuityAndTransmission) {
    const double th = cones::critical_angles(30.0).back();
    const auto sol = cones::cone_exact_solution(th, 30.0);
    EXPECT_NEAR(sol.f_inside_coeff * legendre::p_half(std::cos(th)).value,
                sol.f_outside_coeff * legendre::p_half(-std::cos(th)).value, 1e-14);
    const auto bg = cones::cone_boundary_gradient(sol, 1.0);
    EXPECT_NEAR(1.0 * bg.normal_out / (30.0 * bg.normal_in), 1.0, 1e-8);
    const auto bg4 = cones::cone_boundary_gradient(sol, 4.0);
    EXPECT_DOUBLE_EQ(bg.normal_in / bg4.normal_in, 2.0);
    EXPECT_DOUBLE_EQ(bg.tangential / bg4.tangential, 2.0);
    EXPECT_THROW(cones::cone_exact_solution(th + 0.05, 30.0), NotCriticalError);
}

TEST(Cones, GammaMatchesOracleFormula) {
    const double th = cones::critical_angles(30.0).back();
    const double c = std::cos(th), s = std::sin(th);
    const auto [pc, dpc] = oracle::legendre_half(c);
    const auto [pm, dpm] = oracle::legendre_half(-c);
    const double f = pm * pc;
    const double fb = -pm * s * dpc;
    const double fa = pc * s * dpm;
    const double expected = -(30.0 * fb * fb - fa * fa + 29.0 * 0.25 * f * f) / (2.0 * c);
    const double g = cones::cone_criticality_gamma(th, cfg3(30.0));
    EXPECT_GT(g, 0.0);
    EXPECT_NEAR(g, expected, 1e-8);
    EXPECT_NEAR(cones::cone_criticality_gamma(th, cfg3(30.0), 2.0), 4.0 * g, 1e-12);
}

TEST(Cones, GammaErrors) {
    const double th = cones::critical_angles(30.0).back();
    EXPECT_THROW(cones::cone_criticality_gamma(th + 0.05, cfg3(30.0)), NotCriticalError);
    auto cfg = cfg3(30.0);
    cfg.n = 2;
    EXPECT_THROW(cones::cone_criticality_gamma(th, cfg), DomainError);
    EXPECT_THROW(cones::transmission_residual(0.0, 30.0), DomainError);
}

TEST(Cones, RootsInsideAngleWindow) {
    const auto w = constants::delta0(3, 30.0);
    const double d0 = std::pow(10.0, w.delta0.log10);
    for (double th : cones::critical_angles(30.0)) {
        EXPECT_GT(th, d0);
        EXPECT_LT(th, 0.5 * std::numbers::pi - d0);
    }
}
