#pragma once

// Explicit constants of the regularity theory for the two-phase transmission
// problem: Caccioppoli and Gehring constants, the higher-integrability
// exponent, the decay radii, the smallness threshold delta_1, the contrast
// bound lambda_0 and the admissible-angle margin delta_0.
//
// Every constant that can underflow or overflow binary64 is carried as a
// LogValue (linear value plus log10). Rational constants are exact.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "tcone/errors.hpp"

namespace tcone::constants {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// A positive quantity carried both linearly (may under/overflow) and in log10.
struct LogValue {
    double value = 0.0;
    double log10 = 0.0;

    static LogValue from_log10(double lg) { return LogValue{std::pow(10.0, lg), lg}; }
    static LogValue from_value(double v) { return LogValue{v, std::log10(v)}; }
    [[nodiscard]] bool underflows() const { return value == 0.0 || value < std::numeric_limits<double>::min(); }
};

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) {
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

namespace detail {

inline void check_n(int n, const char* who) {
    if (n < 2) throw DomainError(std::string(who) + ": n must be at least 2");
}
inline void check_ratio(double ratio, const char* who) {
    if (!(ratio > 1.0)) throw DomainError(std::string(who) + ": ratio must exceed 1");
}
inline void check_cs(double c_s, const char* who) {
    if (!(c_s > 0.0)) throw DomainError(std::string(who) + ": C_S must be positive");
}

}  // namespace detail

/// Volume of the unit ball in R^n, omega_n = pi^{n/2} / Gamma(n/2 + 1),
/// via omega_0 = 1, omega_1 = 2, omega_n = 2 pi / n * omega_{n-2}.
inline double unit_ball_volume(int n) {
    if (n < 0) throw DomainError("unit_ball_volume: n must be non-negative");
    double w = (n % 2 == 0) ? 1.0 : 2.0;
    for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) w *= 2.0 * std::numbers::pi / k;
    return w;
}

/// m = n / (n + 2).
inline Rational sobolev_exponent_m(int n) {
    detail::check_n(n, "sobolev_exponent_m");
    return Rational(n, n + 2);
}

/// Caccioppoli constant C = C_S^2 2^{n+8} (beta/alpha).
inline double caccioppoli_constant(int n, double ratio, double c_s = 1.0) {
    detail::check_n(n, "caccioppoli_constant");
    if (!(ratio > 0.0)) throw DomainError("caccioppoli_constant: ratio must be positive");
    detail::check_cs(c_s, "caccioppoli_constant");
    return c_s * c_s * std::ldexp(1.0, n + 8) * ratio;
}

struct GehringExponent {
    double c1 = 0.0;
    double p = 1.0;
    /// p - 1 = (1 - m) / (2 C1 - 1), kept separately since p itself rounds
    /// to 1 in binary64 once C1 exceeds ~1e16.
    double p_minus_one = 0.0;
};

/// C1 = C_S^2 2^10 80^n (beta/alpha) and p = (2 C1 - m) / (2 C1 - 1).
inline GehringExponent gehring_exponent(int n, double ratio, double c_s = 1.0) {
    detail::check_n(n, "gehring_exponent");
    if (!(ratio > 0.0)) throw DomainError("gehring_exponent: ratio must be positive");
    detail::check_cs(c_s, "gehring_exponent");
    const double m = to_double(sobolev_exponent_m(n));
    GehringExponent g;
    g.c1 = c_s * c_s * 1024.0 * std::pow(80.0, n) * ratio;
    g.p = (2.0 * g.c1 - m) / (2.0 * g.c1 - 1.0);
    g.p_minus_one = (1.0 - m) / (2.0 * g.c1 - 1.0);
    return g;
}

/// log10 of C = 2^{2n+1} 5^{np} n^{np/2} omega_n^{p-1}.
inline double gehring_constant_log10(int n, double p_minus_one) {
    detail::check_n(n, "gehring_constant");
    if (!(p_minus_one >= 0.0)) throw DomainError("gehring_constant: p must be at least 1");
    const double p = 1.0 + p_minus_one;
    return (2 * n + 1) * std::log10(2.0) + n * p * std::log10(5.0) + 0.5 * n * p * std::log10(double(n)) +
           p_minus_one * std::log10(unit_ball_volume(n));
}

/// C = 2^{2n+1} 5^{np} n^{np/2} omega_n^{p-1}, the Gehring reverse-Hoelder constant.
inline double gehring_constant(int n, double p) {
    detail::check_n(n, "gehring_constant");
    if (!(p >= 1.0)) throw DomainError("gehring_constant: p must be at least 1");
    return std::pow(2.0, 2 * n + 1) * std::pow(5.0, n * p) * std::pow(double(n), 0.5 * n * p) *
           std::pow(unit_ball_volume(n), p - 1.0);
}

struct DecayRadii {
    Rational theta_i;       ///< (n-1) / (2^{n+1} n), cases (i)/(ii)
    double theta_iii = 0.0; ///< theta_i (alpha/beta)^2, case (iii)
    double chi = 0.0;       ///< 1/2 theta^{n-1} - 2^n ratio^2 theta^n at theta = theta_iii
    double chi_log10 = 0.0;
};

inline DecayRadii decay_radii(int n, double ratio) {
    detail::check_n(n, "decay_radii");
    if (!(ratio >= 1.0)) throw DomainError("decay_radii: ratio must be at least 1");
    DecayRadii d;
    d.theta_i = Rational(n - 1, BigInt(1) << (n + 1)) / n;
    d.theta_iii = to_double(d.theta_i) / (ratio * ratio);
    const double th = d.theta_iii;
    // chi = theta^{n-1} (1/2 - 2^n ratio^2 theta); the bracket is formed first
    // so that chi_log10 stays finite when theta^{n-1} underflows.
    const double bracket = 0.5 - std::ldexp(1.0, n) * ratio * ratio * th;
    if (!(bracket > 0.0)) throw InvariantError("decay_radii: chi is not positive");
    d.chi_log10 = (n - 1) * std::log10(th) + std::log10(bracket);
    d.chi = std::pow(th, n - 1) * bracket;
    if (!(d.chi_log10 > -std::numeric_limits<double>::infinity())) {
        throw InvariantError("decay_radii: chi is not positive");
    }
    return d;
}

struct Delta1 {
    LogValue delta1;
    /// Set when the linear value underflows binary64; delta1.log10 stays exact.
    bool underflow = false;
};

/// Supremum admissible delta_1 = [(alpha/beta)^2 C^{-1/p} chi]^{p/(p-1)}.
inline Delta1 delta1(int n, double ratio, double c_s = 1.0) {
    detail::check_n(n, "delta1");
    detail::check_ratio(ratio, "delta1");
    detail::check_cs(c_s, "delta1");
    const auto g = gehring_exponent(n, ratio, c_s);
    const double log_c = gehring_constant_log10(n, g.p_minus_one);
    const auto radii = decay_radii(n, ratio);
    const double p = 1.0 + g.p_minus_one;
    const double base = radii.chi_log10 - 2.0 * std::log10(ratio) - log_c / p;
    // p / (p - 1) = p (2 C1 - 1) / (1 - m)
    const double m = to_double(sobolev_exponent_m(n));
    const double exponent = p * (2.0 * g.c1 - 1.0) / (1.0 - m);
    Delta1 out;
    out.delta1 = LogValue::from_log10(base * exponent);
    out.underflow = out.delta1.underflows();
    if (!(out.delta1.log10 < 0.0)) throw InvariantError("delta1: value is not below 1");
    return out;
}

/// lambda_0(n) = (n^n + n(n-1)^{n-1} - (n-1)^n) / (n^n - n(n-1)^{n-1} + (n-1)^n), exact.
inline Rational lambda0(int n) {
    detail::check_n(n, "lambda0");
    const BigInt nn = boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(n));
    const BigInt a = BigInt(n) * boost::multiprecision::pow(BigInt(n - 1), static_cast<unsigned>(n - 1));
    const BigInt b = boost::multiprecision::pow(BigInt(n - 1), static_cast<unsigned>(n));
    return Rational(nn + a - b, nn - a + b);
}

/// Integral of sin^k over [0, theta] by the exact antiderivative recursion
/// I_k = -sin^{k-1} cos / k + (k-1)/k I_{k-2}.
inline double sin_power_integral(double theta, int k) {
    if (k < 0) throw DomainError("sin_power_integral: k must be non-negative");
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    double i_even = theta;
    double i_odd = 1.0 - c;
    double result = (k % 2 == 0) ? i_even : i_odd;
    for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) {
        result = -std::pow(s, j - 1) * c / j + (j - 1.0) / j * result;
    }
    return result;
}

/// |E_theta cap B_1| = omega_{n-1} ( int_0^theta sin^n + sin^{n-1} theta cos theta / n ),
/// integral by adaptive Gauss-Kronrod.
inline double sector_volume(double theta, int n) {
    detail::check_n(n, "sector_volume");
    if (!(theta >= 0.0) || !(theta <= 0.5 * std::numbers::pi)) {
        throw DomainError("sector_volume: theta must lie in [0, pi/2]");
    }
    if (theta == 0.0) return 0.0;
    const auto integrand = [n](double t) { return std::pow(std::sin(t), n); };
    double err = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, 0.0, theta, 15, 1e-13, &err);
    const double s = std::sin(theta);
    return unit_ball_volume(n - 1) * (integral + std::pow(s, n - 1) * std::cos(theta) / n);
}

/// Same as sector_volume via sin_power_integral; used as a cross-check.
inline double sector_volume_recursive(double theta, int n) {
    detail::check_n(n, "sector_volume");
    const double s = std::sin(theta);
    return unit_ball_volume(n - 1) * (sin_power_integral(theta, n) + std::pow(s, n - 1) * std::cos(theta) / n);
}

namespace detail {

inline constexpr double kSmallAngle = 1e-8;

// ln |E_theta cap B_1| as a function of ln theta. Below kSmallAngle the leading
// term omega_{n-1} theta^{n-1} / n is exact to binary64.
inline double ln_sector_volume(double ln_theta, int n) {
    if (ln_theta < std::log(kSmallAngle)) {
        return std::log(unit_ball_volume(n - 1) / n) + (n - 1) * ln_theta;
    }
    return std::log(sector_volume(std::min(std::exp(ln_theta), 0.5 * std::numbers::pi), n));
}

// ln |(H Delta E_theta) cap B_1| for theta = pi/2 - eps, with H the half-space
// bounded by the hyperplane orthogonal to the cone axis through the vertex:
//   omega_n / 2 - |E_theta cap B_1| = omega_{n-1} (n-1)/n int_0^eps cos^{n-2}.
inline double ln_flat_defect(double ln_eps, int n) {
    const double lead = std::log(unit_ball_volume(n - 1) * (n - 1.0) / n);
    if (ln_eps < std::log(kSmallAngle)) return lead + ln_eps;
    const double eps = std::min(std::exp(ln_eps), 0.5 * std::numbers::pi);
    const auto integrand = [n](double s) { return std::pow(std::cos(s), n - 2); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(integrand, 0.0, eps, 15, 1e-13);
    return lead + std::log(integral);
}

// Bisection in ln x for f(ln x) = target, f increasing, on (-inf, ln(pi/2)].
template <class F>
double invert_increasing_log(F f, double target, double slope) {
    double hi = std::log(0.5 * std::numbers::pi);
    if (f(hi) <= target) return hi;
    // Lower end from the leading power law, pushed well past the root.
    double lo = std::min(hi, (target - f(0.0)) / slope) - 50.0;
    while (f(lo) > target) lo = 2.0 * lo - 1.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target) lo = mid; else hi = mid;
        if (hi - lo <= 1e-10 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

struct AngleWindow {
    LogValue delta0;        ///< min(theta_small, pi/2 - theta_flat)
    LogValue theta_small;   ///< sector volume equals delta1 |B_1|
    LogValue flat_margin;   ///< pi/2 - theta_flat, half-space defect equals delta1 |B_1|
};

/// delta_0 from delta_1 through sector-volume inversion in log space.
inline AngleWindow delta0(int n, double ratio, double c_s = 1.0) {
    detail::check_n(n, "delta0");
    const auto d1 = delta1(n, ratio, c_s);
    const double ln_target = d1.delta1.log10 * std::numbers::ln10 + std::log(unit_ball_volume(n));
    const double ln_theta = detail::invert_increasing_log(
        [n](double x) { return detail::ln_sector_volume(x, n); }, ln_target, n - 1.0);
    const double ln_eps = detail::invert_increasing_log(
        [n](double x) { return detail::ln_flat_defect(x, n); }, ln_target, 1.0);
    AngleWindow w;
    w.theta_small = LogValue::from_log10(ln_theta / std::numbers::ln10);
    w.flat_margin = LogValue::from_log10(ln_eps / std::numbers::ln10);
    w.delta0 = (w.theta_small.log10 <= w.flat_margin.log10) ? w.theta_small : w.flat_margin;
    return w;
}

/// eps_0(tau) = tau^{n / (1 - 1/p)} = tau^{n p / (p - 1)}.
inline LogValue eps0(double tau, int n, double p_minus_one) {
    detail::check_n(n, "eps0");
    if (!(tau > 0.0) || !(tau < 1.0)) throw DomainError("eps0: tau must lie in (0, 1)");
    if (!(p_minus_one > 0.0)) throw DomainError("eps0: p must exceed 1");
    const double exponent = n * (1.0 + p_minus_one) / p_minus_one;
    return LogValue::from_log10(exponent * std::log10(tau));
}

/// Same as eps0, taking p itself (adequate while p - 1 is resolvable in binary64).
inline LogValue eps0_from_p(double tau, int n, double p) { return eps0(tau, n, p - 1.0); }

struct ConstantsLedger {
    int n = 3;
    double ratio = 0.0;
    double c_s = 1.0;
    Rational m;
    double c_cacc = 0.0;
    double c1_gehring = 0.0;
    double p = 1.0;
    double p_minus_one = 0.0;
    LogValue c_gehring;
    Rational theta_i;
    double theta_iii = 0.0;
    LogValue chi;
    Delta1 delta1;
    Rational lambda0;
    AngleWindow window;
    double omega_n = 0.0;

    [[nodiscard]] LogValue eps0(double tau) const { return constants::eps0(tau, n, p_minus_one); }
};

inline ConstantsLedger build_ledger(int n, double ratio, double c_s = 1.0) {
    detail::check_n(n, "build_ledger");
    detail::check_ratio(ratio, "build_ledger");
    detail::check_cs(c_s, "build_ledger");
    ConstantsLedger l;
    l.n = n;
    l.ratio = ratio;
    l.c_s = c_s;
    l.m = sobolev_exponent_m(n);
    l.c_cacc = caccioppoli_constant(n, ratio, c_s);
    const auto g = gehring_exponent(n, ratio, c_s);
    l.c1_gehring = g.c1;
    l.p = g.p;
    l.p_minus_one = g.p_minus_one;
    l.c_gehring = LogValue::from_log10(gehring_constant_log10(n, g.p_minus_one));
    const auto radii = decay_radii(n, ratio);
    l.theta_i = radii.theta_i;
    l.theta_iii = radii.theta_iii;
    l.chi = LogValue{radii.chi, radii.chi_log10};
    l.delta1 = delta1(n, ratio, c_s);
    l.lambda0 = lambda0(n);
    l.window = delta0(n, ratio, c_s);
    l.omega_n = unit_ball_volume(n);
    return l;
}

}  // namespace tcone::constants
