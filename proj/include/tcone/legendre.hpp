#pragma once

// Legendre function of the first kind of degree 1/2 on (-1, 1].
//
// Two regimes of the Gauss hypergeometric representation
//     P_{1/2}(t) = 2F1(-1/2, 3/2; 1; x),  x = (1 - t) / 2
// are used: the direct series for x <= 1/2, and for x > 1/2 the logarithmic
// connection expansion in w = 1 - x = (1 + t) / 2, which carries the
// ln(1 + t) singularity at t = -1 explicitly.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>

#include "tcone/errors.hpp"

namespace tcone::legendre {

/// Smallest absolute tolerance accepted by the evaluator.
inline constexpr double kToleranceFloor = 1e-13;

struct LegendreEval {
    double t = 1.0;
    double value = 1.0;       ///< P_{1/2}(t)
    double derivative = 0.0;  ///< dP_{1/2}/dt
    double est_error = 0.0;   ///< bound on |value - P_{1/2}(t)|
    double derivative_est_error = 0.0;
};

namespace detail {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double term) {
        const double s = sum_ + term;
        if (std::abs(sum_) >= std::abs(term)) {
            comp_ += (sum_ - s) + term;
        } else {
            comp_ += (term - s) + sum_;
        }
        sum_ = s;
        abs_sum_ += std::abs(term);
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }
    [[nodiscard]] double abs_sum() const { return abs_sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_sum_ = 0.0;
};

inline constexpr double kA = -0.5;
inline constexpr double kB = 1.5;
inline constexpr std::size_t kMaxTerms = 4000;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Series in x = (1 - t)/2, valid and fast for x <= 1/2.
inline LegendreEval direct_series(double t) {
    const double x = 0.5 * (1.0 - t);
    CompensatedSum value;
    CompensatedSum deriv_x;  // dF/dx = ab * 2F1(a+1, b+1; 2; x)
    double term = 1.0;
    double dterm = kA * kB;
    double value_tail = 0.0;
    double deriv_tail = 0.0;
    for (std::size_t k = 0; k < kMaxTerms; ++k) {
        value.add(term);
        deriv_x.add(dterm);
        const double kk = static_cast<double>(k);
        const double next = term * (kA + kk) * (kB + kk) / ((kk + 1.0) * (kk + 1.0)) * x;
        const double dnext =
            dterm * (kA + 1.0 + kk) * (kB + 1.0 + kk) / ((kk + 1.0) * (kk + 2.0)) * x;
        term = next;
        dterm = dnext;
        // For k >= 1 both term ratios are bounded by x, so the geometric
        // tail bound |next| / (1 - x) is rigorous.
        value_tail = std::abs(term) / (1.0 - x);
        deriv_tail = std::abs(dterm) / (1.0 - x);
        if (k >= 1 && value_tail <= kEps * std::abs(value.value()) * 0.25 &&
            deriv_tail <= kEps * std::abs(deriv_x.value()) * 0.25) {
            break;
        }
        if (term == 0.0 && dterm == 0.0) {
            value_tail = deriv_tail = 0.0;
            break;
        }
    }
    LegendreEval out;
    out.t = t;
    out.value = value.value();
    out.derivative = -0.5 * deriv_x.value();
    out.est_error = value_tail + 4.0 * kEps * value.abs_sum();
    out.derivative_est_error = 0.5 * (deriv_tail + 4.0 * kEps * deriv_x.abs_sum());
    return out;
}

// Logarithmic connection expansion in w = (1 + t)/2, valid for w < 1:
//   P = -(1/pi) * sum_n c_n [h_n - ln w] w^n,
//   c_n = (a)_n (b)_n / (n!)^2,
//   h_n = 2 psi(n+1) - psi(a+n) - psi(b+n).
inline LegendreEval log_series(double t) {
    const double w = 0.5 * (1.0 + t);
    const double log_w = std::log(w);
    CompensatedSum value;
    CompensatedSum deriv_w;  // sum of c_n w^(n-1) [n (h_n - ln w) - 1]
    double c = 1.0;
    double h = 4.0 * std::numbers::ln2 - 4.0;  // psi(-1/2) = psi(3/2) = psi(1/2) + 2
    double w_pow = 1.0;                       // w^n
    double w_pow_m1 = 1.0 / w;                // w^(n-1)
    double value_tail = 0.0;
    double deriv_tail = 0.0;
    for (std::size_t n = 0; n < kMaxTerms; ++n) {
        const double nn = static_cast<double>(n);
        const double vt = c * (h - log_w) * w_pow;
        const double dt = c * w_pow_m1 * (nn * (h - log_w) - 1.0);
        value.add(vt);
        deriv_w.add(dt);
        h += 2.0 / (nn + 1.0) - 1.0 / (kA + nn) - 1.0 / (kB + nn);
        c *= (kA + nn) * (kB + nn) / ((nn + 1.0) * (nn + 1.0));
        w_pow *= w;
        w_pow_m1 *= w;
        const double next_v = std::abs(c * (h - log_w) * w_pow);
        const double next_d = std::abs(c * w_pow_m1 * ((nn + 1.0) * (h - log_w) - 1.0));
        // h_n is bounded and c_n decays, so the tail is dominated by a
        // geometric series of ratio w; the factor 2 absorbs the slow drift of h_n.
        value_tail = 2.0 * next_v / (1.0 - w);
        deriv_tail = 2.0 * next_d / (1.0 - w);
        if (n >= 2 && value_tail <= kEps * std::abs(value.value()) * 0.25 &&
            deriv_tail <= kEps * std::abs(deriv_w.value()) * 0.25) {
            break;
        }
    }
    const double scale = -1.0 / std::numbers::pi;
    LegendreEval out;
    out.t = t;
    out.value = scale * value.value();
    out.derivative = 0.5 * scale * deriv_w.value();
    out.est_error = (value_tail + 4.0 * kEps * value.abs_sum()) / std::numbers::pi;
    out.derivative_est_error = 0.5 * (deriv_tail + 4.0 * kEps * deriv_w.abs_sum()) / std::numbers::pi;
    return out;
}

}  // namespace detail

/// Evaluates P_{1/2}(t) and its derivative. Throws DomainError outside
/// (-1, 1] and ToleranceError when the error bound exceeds `tol`.
inline LegendreEval p_half(double t, double tol = 1e-12) {
    if (!(t > -1.0) || !(t <= 1.0)) {
        throw DomainError("p_half: t must lie in (-1, 1]");
    }
    if (!(tol > 0.0)) {
        throw DomainError("p_half: tol must be positive");
    }
    if (tol < kToleranceFloor) {
        throw ToleranceError("p_half: tolerance below the binary64 floor 1e-13");
    }
    if (t == 1.0) {
        return LegendreEval{1.0, 1.0, 0.375, 0.0, 0.0};
    }
    LegendreEval out = (t >= 0.0) ? detail::direct_series(t) : detail::log_series(t);
    if (out.est_error > tol) {
        throw ToleranceError("p_half: error bound exceeds requested tolerance");
    }
    return out;
}

/// The two evaluations entering the cone profile: at cos(theta) and -cos(theta).
inline std::pair<LegendreEval, LegendreEval> p_half_pair(double theta, double tol = 1e-12) {
    if (!(theta > 0.0) || !(theta < std::numbers::pi)) {
        throw DomainError("p_half_pair: theta must lie in (0, pi)");
    }
    const double c = std::cos(theta);
    return {p_half(c, tol), p_half(-c, tol)};
}

}  // namespace tcone::legendre
