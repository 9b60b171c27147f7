#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "tcone/constants.hpp"

using namespace tcone;
using constants::Rational;
using Big = boost::multiprecision::cpp_bin_float_50;

TEST(Constants, ExactRationals) {
    EXPECT_EQ(constants::lambda0(3), Rational(31, 23));
    EXPECT_EQ(constants::lambda0(2), Rational(5, 3));
    EXPECT_EQ(constants::sobolev_exponent_m(3), Rational(3, 5));
    EXPECT_EQ(constants::decay_radii(3, 2.0).theta_i, Rational(1, 24));
    EXPECT_EQ(constants::to_string(constants::lambda0(3)), "31/23");
    EXPECT_NEAR(constants::to_double(constants::lambda0(3)), 31.0 / 23.0, 1e-15);
}

TEST(Constants, Lambda0TendsToOne) {
    Rational prev = constants::lambda0(2);
    for (int n = 3; n <= 50; ++n) {
        const Rational l = constants::lambda0(n);
        EXPECT_GT(l, Rational(1));
        EXPECT_LT(l, prev);
        prev = l;
    }
    EXPECT_LT(constants::to_double(prev), 1.03);
}

TEST(Constants, Caccioppoli) {
    EXPECT_DOUBLE_EQ(constants::caccioppoli_constant(3, 1.0, 1.0), 2048.0);
    EXPECT_DOUBLE_EQ(constants::caccioppoli_constant(3, 2.0, 1.0), 4096.0);
    EXPECT_DOUBLE_EQ(constants::caccioppoli_constant(4, 17.59, 2.0), 4.0 * 4096.0 * 17.59);
}

TEST(Constants, GehringExponent) {
    const auto g = constants::gehring_exponent(3, 2.0, 1.0);
    const double c1 = 2048.0 * 512000.0;
    EXPECT_EQ(g.c1, c1);
    EXPECT_NEAR(g.p, (2.0 * c1 - 0.6) / (2.0 * c1 - 1.0), 1e-15);
    EXPECT_GT(g.p, 1.0);
    // C1 = 4 40^n C for the Caccioppoli constant C.
    EXPECT_DOUBLE_EQ(g.c1, 4.0 * std::pow(40.0, 3) * constants::caccioppoli_constant(3, 2.0, 1.0));
    EXPECT_LT(constants::gehring_exponent(3, 4.0).p_minus_one, g.p_minus_one);
}

TEST(Constants, GehringConstant) {
    EXPECT_NEAR(constants::gehring_constant(3, 1.0), std::pow(2.0, 7) * 125.0 * std::pow(3.0, 1.5), 1e-9);
    const double expected = 32.0 * std::pow(5.0, 2.002) * std::pow(2.0, 1.001) * std::pow(std::numbers::pi, 0.001);
    EXPECT_NEAR(constants::gehring_constant(2, 1.001) / expected, 1.0, 1e-14);
    EXPECT_NEAR(constants::gehring_constant_log10(2, 0.001), std::log10(expected), 1e-13);
    EXPECT_NEAR(constants::unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-15);
}

TEST(Constants, DecayRadii) {
    const auto d = constants::decay_radii(3, 2.0);
    const double th = 1.0 / 96.0;
    EXPECT_DOUBLE_EQ(d.theta_iii, th);
    EXPECT_NEAR(d.chi, 0.5 * th * th - 32.0 * th * th * th, 1e-18);
    EXPECT_GT(d.chi, 0.0);
    EXPECT_DOUBLE_EQ(constants::decay_radii(3, 1.0).theta_iii, 1.0 / 24.0);
}

TEST(Constants, Delta1ExtendedPrecision) {
    const int n = 3;
    const double ratio = 17.59;
    const Big m = Big(3) / 5;
    const Big c1 = Big(1024) * 512000 * Big(ratio);
    const Big pm1 = (1 - m) / (2 * c1 - 1);
    const Big p = 1 + pm1;
    const Big omega = 4 * boost::multiprecision::atan(Big(1)) * 4 / 3;
    const Big log_c = (2 * n + 1) * log10(Big(2)) + n * p * log10(Big(5)) + Big(n) * p / 2 * log10(Big(n)) +
                      pm1 * log10(omega);
    const Big theta = Big(2) / 48 / (Big(ratio) * Big(ratio));
    const Big chi = theta * theta * (Big(0.5) - 8 * Big(ratio) * Big(ratio) * theta);
    const Big expected = (log10(chi) - 2 * log10(Big(ratio)) - log_c / p) * p / pm1;
    const auto d1 = constants::delta1(n, ratio);
    EXPECT_TRUE(d1.underflow);
    EXPECT_NEAR(d1.delta1.log10 / expected.convert_to<double>(), 1.0, 1e-12);
}

TEST(Constants, Delta1DefiningEquation) {
    const auto g = constants::gehring_exponent(3, 30.0);
    const double p = 1.0 + g.p_minus_one;
    const auto d1 = constants::delta1(3, 30.0);
    const double lhs = (g.p_minus_one / p) * d1.delta1.log10 + constants::gehring_constant_log10(3, g.p_minus_one) / p +
                       2.0 * std::log10(30.0) - constants::decay_radii(3, 30.0).chi_log10;
    EXPECT_NEAR(lhs, 0.0, 1e-6);
    EXPECT_LT(constants::delta1(3, 40.0).delta1.log10, d1.delta1.log10);
}

TEST(Constants, SectorVolume) {
    const double w = constants::unit_ball_volume(3);
    EXPECT_NEAR(constants::sector_volume(0.5 * std::numbers::pi, 3), 0.5 * w, 1e-14);
    EXPECT_EQ(constants::sector_volume(0.0, 3), 0.0);
    // int_0^t sin^3 = 2/3 - cos t + cos^3 t / 3
    const double t = std::numbers::pi / 4.0;
    const double closed = std::numbers::pi * ((2.0 / 3.0 - std::cos(t) + std::pow(std::cos(t), 3) / 3.0) +
                                              std::pow(std::sin(t), 2) * std::cos(t) / 3.0);
    EXPECT_NEAR(constants::sector_volume(t, 3), closed, 1e-13);
    for (int n = 2; n <= 10; ++n) {
        EXPECT_NEAR(constants::sector_volume(0.7, n), constants::sector_volume_recursive(0.7, n), 1e-12) << n;
        EXPECT_NEAR(constants::sector_volume(0.5 * std::numbers::pi, n), 0.5 * constants::unit_ball_volume(n), 1e-12);
    }
}

TEST(Constants, LogInversionAgainstGridScan) {
    const int n = 3;
    const double target = 0.1 * constants::unit_ball_volume(n);
    const double ln_theta = constants::detail::invert_increasing_log(
        [n](double x) { return constants::detail::ln_sector_volume(x, n); }, std::log(target), n - 1.0);
    // Two-level scan of sector_volume over [0, pi/2].
    double lo = 0.0, width = 0.5 * std::numbers::pi;
    for (int level = 0; level < 3; ++level) {
        const int points = 10000;
        double step = width / points;
        for (int k = 1; k <= points; ++k) {
            if (constants::sector_volume(lo + k * step, n) >= target) {
                lo += (k - 1) * step;
                break;
            }
        }
        width = step;
    }
    EXPECT_NEAR(std::exp(ln_theta), lo + 0.5 * width, 1e-8);
}

TEST(Constants, Delta0SmallAngleAsymptotics) {
    const int n = 3;
    const auto d1 = constants::delta1(n, 30.0);
    const auto w = constants::delta0(n, 30.0);
    const double lg_target = d1.delta1.log10 + std::log10(constants::unit_ball_volume(n));
    const double small = (lg_target - std::log10(std::numbers::pi / 3.0)) / (n - 1);
    const double flat = lg_target - std::log10(std::numbers::pi * 2.0 / 3.0);
    EXPECT_NEAR(w.theta_small.log10 / small, 1.0, 1e-9);
    EXPECT_NEAR(w.flat_margin.log10 / flat, 1.0, 1e-9);
    EXPECT_EQ(w.delta0.log10, std::min(w.theta_small.log10, w.flat_margin.log10));
    EXPECT_LE(constants::delta0(n, 40.0).delta0.log10, w.delta0.log10);
}

TEST(Constants, Eps0) {
    const auto e = constants::eps0_from_p(0.5, 3, 1.1);
    EXPECT_NEAR(e.log10, -33.0 * std::log10(2.0), 1e-10);
    EXPECT_NEAR(constants::eps0(0.999999, 3, 0.5).value, 1.0, 1e-4);
    EXPECT_THROW(constants::eps0(1.0, 3, 0.5), DomainError);
    EXPECT_THROW(constants::eps0(0.5, 3, 0.0), DomainError);
}

TEST(Constants, DimensionalSweep) {
    for (int n = 2; n <= 10; ++n) {
        const auto l = constants::build_ledger(n, 30.0, 1.0);
        EXPECT_TRUE(std::isfinite(l.c_cacc) && l.c_cacc > 0.0) << n;
        EXPECT_GT(l.p_minus_one, 0.0) << n;
        EXPECT_TRUE(std::isfinite(l.c_gehring.log10)) << n;
        EXPECT_GT(l.chi.log10, -std::numeric_limits<double>::infinity()) << n;
        EXPECT_LT(l.delta1.delta1.log10, 0.0) << n;
        EXPECT_TRUE(std::isfinite(l.window.delta0.log10)) << n;
        EXPECT_GT(l.lambda0, Rational(1)) << n;
        EXPECT_EQ(l.m, Rational(n, n + 2)) << n;
    }
}

TEST(Constants, LedgerRejectsBadInput) {
    EXPECT_THROW(constants::build_ledger(1, 30.0), DomainError);
    EXPECT_THROW(constants::build_ledger(3, 30.0, 0.0), DomainError);
}
