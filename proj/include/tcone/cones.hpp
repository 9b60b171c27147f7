#pragma once

// Circular Taylor cones in R^3: the transmission root equation for the
// opening angle, its fold threshold, the closed-form potential
// u = sqrt(rho) f(theta), and the Euler-Lagrange balance on the cone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "tcone/errors.hpp"
#include "tcone/legendre.hpp"
#include "tcone/material.hpp"

namespace tcone::cones {

/// g is evaluated on [kEndpointMargin, pi/2 - kEndpointMargin] only.
inline constexpr double kEndpointMargin = 1e-4;
inline constexpr std::size_t kScanPoints = 4096;

/// Factors of the residual g(theta, r) = r A(theta) + B(theta) and their
/// theta-derivatives, with A = P(-cos) P'(cos) and B = P(cos) P'(-cos).
struct ResidualFactors {
    double a = 0.0;
    double b = 0.0;
    double da = 0.0;
    double db = 0.0;
};

namespace detail {

// Second derivative recovered from the Legendre ODE with nu(nu+1) = 3/4.
inline double second_derivative(const legendre::LegendreEval& e) {
    return (2.0 * e.t * e.derivative - 0.75 * e.value) / (1.0 - e.t * e.t);
}

inline void check_open_quarter(double theta, const char* who) {
    if (!(theta > 0.0) || !(theta < 0.5 * std::numbers::pi)) {
        throw DomainError(std::string(who) + ": theta must lie in (0, pi/2)");
    }
}

}  // namespace detail

inline ResidualFactors residual_factors(double theta) {
    detail::check_open_quarter(theta, "residual_factors");
    const auto [at_c, at_minus_c] = legendre::p_half_pair(theta);
    const double s = std::sin(theta);
    const double pp_c = detail::second_derivative(at_c);
    const double pp_mc = detail::second_derivative(at_minus_c);
    ResidualFactors f;
    f.a = at_minus_c.value * at_c.derivative;
    f.b = at_c.value * at_minus_c.derivative;
    f.da = s * (at_minus_c.derivative * at_c.derivative - at_minus_c.value * pp_c);
    f.db = s * (at_c.value * pp_mc - at_c.derivative * at_minus_c.derivative);
    return f;
}

/// Alpha-normalized transmission residual
///   g(theta, r) = r P(-cos) P'(cos) + P(cos) P'(-cos),  r = beta / alpha.
inline double transmission_residual(double theta, double ratio) {
    detail::check_open_quarter(theta, "transmission_residual");
    const auto f = residual_factors(theta);
    return ratio * f.a + f.b;
}

inline double transmission_residual_dtheta(double theta, double ratio) {
    const auto f = residual_factors(theta);
    return ratio * f.da + f.db;
}

namespace detail {

inline double refine_bracket(double lo, double hi, double ratio) {
    auto g = [ratio](double th) { return transmission_residual(th, ratio); };
    const double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(50), iters);
    if (iters >= 200) {
        throw ConvergenceError("critical_angles: root refinement exhausted its budget");
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Sorted roots of g(., ratio) on (0, pi/2). Each root is bracketed by a sign
/// change of the uniform scan, or split out of a scan-level extremum that
/// hides a close pair, and refined to |g| <= tol.
inline std::vector<double> critical_angles(double ratio, double tol = 1e-10) {
    if (!(ratio > 1.0)) throw DomainError("critical_angles: ratio must exceed 1");
    if (!(tol > 0.0)) throw DomainError("critical_angles: tol must be positive");

    const double lo = kEndpointMargin;
    const double hi = 0.5 * std::numbers::pi - kEndpointMargin;
    const std::size_t k = kScanPoints;
    std::vector<double> th(k);
    std::vector<double> gv(k);
    for (std::size_t i = 0; i < k; ++i) {
        th[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
        gv[i] = transmission_residual(th[i], ratio);
    }

    std::vector<std::pair<double, double>> brackets;
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (gv[i] == 0.0) {
            roots.push_back(th[i]);
        } else if (gv[i] * gv[i + 1] < 0.0) {
            brackets.emplace_back(th[i], th[i + 1]);
        }
    }
    if (gv[k - 1] == 0.0) roots.push_back(th[k - 1]);

    // A pair of roots closer than the scan spacing shows up as a same-sign
    // local minimum of |g|.
    for (std::size_t i = 1; i + 1 < k; ++i) {
        const double s = gv[i] > 0.0 ? 1.0 : -1.0;
        if (gv[i] == 0.0 || gv[i - 1] * s <= 0.0 || gv[i + 1] * s <= 0.0) continue;
        if (!(s * gv[i] < s * gv[i - 1] && s * gv[i] <= s * gv[i + 1])) continue;
        auto sg = [s, ratio](double x) { return s * transmission_residual(x, ratio); };
        std::uintmax_t it = 200;
        const auto [xm, fm] = boost::math::tools::brent_find_minima(sg, th[i - 1], th[i + 1], 52, it);
        if (fm < 0.0) {
            brackets.emplace_back(th[i - 1], xm);
            brackets.emplace_back(xm, th[i + 1]);
        }
    }

    for (const auto& [a, b] : brackets) {
        const double r = detail::refine_bracket(a, b, ratio);
        const auto f = residual_factors(r);
        if (std::abs(ratio * f.a + f.b) > tol) {
            throw ConvergenceError("critical_angles: refined root misses the residual tolerance");
        }
        roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                roots.end());
    return roots;
}

/// Fold of the root set: below lambda1 no critical angle exists, above it
/// two do. theta_star is the double root at lambda1.
struct BifurcationPoint {
    double lambda1 = 0.0;
    double theta_star = 0.0;
};

namespace detail {

// Zero of q = A B' - B A' (equivalently of d/dtheta of -B/A) inside a bracket.
inline double fold_angle(double a, double b) {
    auto q = [](double th) {
        const auto f = residual_factors(th);
        return f.a * f.db - f.b * f.da;
    };
    const double qa = q(a);
    const double qb = q(b);
    if (qa * qb > 0.0) {
        throw ConvergenceError("critical_threshold: fold angle is not bracketed by the root pair");
    }
    if (qa == 0.0) return a;
    if (qb == 0.0) return b;
    std::uintmax_t iters = 200;
    const auto [x, y] = boost::math::tools::toms748_solve(
        q, a, b, qa, qb, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (x + y);
}

}  // namespace detail

/// Outer bisection on the ratio over the 0 -> 2 root-count transition.
inline BifurcationPoint critical_threshold(double tol = 1e-6) {
    if (!(tol > 0.0)) throw DomainError("critical_threshold: tol must be positive");
    double lo = 2.0;
    double hi = 100.0;
    if (!critical_angles(lo).empty() || critical_angles(hi).size() != 2) {
        throw ConvergenceError("critical_threshold: initial ratio bracket does not straddle the fold");
    }
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto n_roots = critical_angles(mid).size();
        if (n_roots == 0) {
            lo = mid;
        } else if (n_roots == 2) {
            hi = mid;
        } else {
            throw ConvergenceError("critical_threshold: unexpected root count during bisection");
        }
    }
    if (hi - lo > tol) throw ConvergenceError("critical_threshold: bisection budget exhausted");
    const auto pair = critical_angles(hi);
    BifurcationPoint bp;
    bp.lambda1 = 0.5 * (lo + hi);
    bp.theta_star = detail::fold_angle(pair[0], pair[1]);
    return bp;
}

/// Newton on the system {g = 0, dg/dtheta = 0} in the unknowns (theta, r).
/// The theta-derivatives of A' and B' in the Jacobian use central differences.
inline BifurcationPoint critical_threshold_newton(double tol = 1e-12) {
    // Starting point: scan minimum of r(theta) = -B/A over admissible values.
    const double lo = kEndpointMargin;
    const double hi = 0.5 * std::numbers::pi - kEndpointMargin;
    double theta = 0.0;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 512; ++i) {
        const double th = lo + (hi - lo) * static_cast<double>(i) / 511.0;
        const auto f = residual_factors(th);
        if (f.a == 0.0) continue;
        const double r = -f.b / f.a;
        if (r > 1.0 && r < ratio) {
            ratio = r;
            theta = th;
        }
    }
    if (!std::isfinite(ratio)) throw ConvergenceError("critical_threshold_newton: no starting point");

    constexpr double step = 1e-5;
    for (int it = 0; it < 60; ++it) {
        const auto f = residual_factors(theta);
        const auto fp = residual_factors(theta + step);
        const auto fm = residual_factors(theta - step);
        const double dda = (fp.da - fm.da) / (2.0 * step);
        const double ddb = (fp.db - fm.db) / (2.0 * step);
        const double f1 = ratio * f.a + f.b;
        const double f2 = ratio * f.da + f.db;
        const double j11 = ratio * f.da + f.db;
        const double j12 = f.a;
        const double j21 = ratio * dda + ddb;
        const double j22 = f.da;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) throw SingularityError("critical_threshold_newton: singular Jacobian");
        const double d_theta = (f1 * j22 - j12 * f2) / det;
        const double d_ratio = (j11 * f2 - j21 * f1) / det;
        theta -= d_theta;
        ratio -= d_ratio;
        if (std::abs(d_theta) < tol && std::abs(d_ratio) < tol * std::max(1.0, ratio)) {
            return BifurcationPoint{ratio, theta};
        }
    }
    throw ConvergenceError("critical_threshold_newton: no convergence");
}

struct BifurcationRow {
    double ratio = 0.0;
    std::vector<double> roots;
};

inline std::vector<BifurcationRow> bifurcation_diagram(const std::vector<double>& ratios,
                                                       double tol = 1e-10) {
    std::vector<BifurcationRow> rows;
    rows.reserve(ratios.size());
    for (double r : ratios) rows.push_back(BifurcationRow{r, critical_angles(r, tol)});
    return rows;
}

/// Closed-form potential u(rho, theta) = sqrt(rho) f(theta), with
///   f = f_inside_coeff  * P(cos theta)   on [0, theta0]   (the cone E, sigma = beta)
///   f = f_outside_coeff * P(-cos theta)  on [theta0, pi]  (sigma = alpha).
struct ConeSolution {
    double theta0 = 0.0;
    double amplitude = 1.0;
    double f_inside_coeff = 0.0;   ///< amplitude * P(-cos theta0)
    double f_outside_coeff = 0.0;  ///< amplitude * P(cos theta0)

    [[nodiscard]] bool inside(double theta) const { return theta <= theta0; }

    [[nodiscard]] double f(double theta) const {
        if (inside(theta)) return f_inside_coeff * legendre::p_half(std::cos(theta)).value;
        return f_outside_coeff * legendre::p_half(-std::cos(theta)).value;
    }
    /// f' from the inside branch (extended to any theta in [0, pi/2)).
    [[nodiscard]] double df_inside(double theta) const {
        return -f_inside_coeff * std::sin(theta) * legendre::p_half(std::cos(theta)).derivative;
    }
    /// f' from the outside branch (extended to any theta in (0, pi]).
    [[nodiscard]] double df_outside(double theta) const {
        return f_outside_coeff * std::sin(theta) * legendre::p_half(-std::cos(theta)).derivative;
    }
    [[nodiscard]] double df(double theta) const {
        return inside(theta) ? df_inside(theta) : df_outside(theta);
    }
    [[nodiscard]] double value(double rho, double theta) const { return std::sqrt(rho) * f(theta); }
    /// |Du|^2 = f^2 / (4 rho) + f'^2 / rho.
    [[nodiscard]] double grad_sq(double rho, double theta) const {
        const double fv = f(theta);
        const double dfv = df(theta);
        return (0.25 * fv * fv + dfv * dfv) / rho;
    }
};

/// The f-construction at any theta0, without checking the transmission condition.
inline ConeSolution cone_profile(double theta0, double amplitude = 1.0) {
    detail::check_open_quarter(theta0, "cone_profile");
    if (!(amplitude > 0.0)) throw DomainError("cone_profile: amplitude must be positive");
    const auto [at_c, at_minus_c] = legendre::p_half_pair(theta0);
    return ConeSolution{theta0, amplitude, amplitude * at_minus_c.value, amplitude * at_c.value};
}

namespace detail {

inline void require_critical(double theta0, double ratio, double rel_tol) {
    const auto f = residual_factors(theta0);
    const double scale = ratio * std::abs(f.a) + std::abs(f.b);
    if (std::abs(ratio * f.a + f.b) > rel_tol * scale) {
        throw NotCriticalError("theta0 does not satisfy the transmission equation");
    }
}

}  // namespace detail

/// Cone solution at a critical angle of `ratio`; NotCriticalError otherwise.
inline ConeSolution cone_exact_solution(double theta0, double ratio, double amplitude = 1.0,
                                        double rel_tol = 1e-8) {
    detail::require_critical(theta0, ratio, rel_tol);
    return cone_profile(theta0, amplitude);
}

/// Surface tension balancing the 1/rho terms of the Euler-Lagrange relation
/// on the cone (multiplier zero):
///   gamma (n-1) cos theta0 + beta f_b'^2 - alpha f_a'^2 + (beta-alpha) f^2/4 = 0.
inline double cone_criticality_gamma(double theta0, const MaterialConfig& cfg, double amplitude = 1.0,
                                     double rel_tol = 1e-8) {
    cfg.validate();
    if (cfg.n != 3) throw DomainError("cone_criticality_gamma: the closed-form cone is three-dimensional");
    detail::require_critical(theta0, cfg.ratio(), rel_tol);
    const auto sol = cone_profile(theta0, amplitude);
    const double fv = sol.f(theta0);
    const double dfb = sol.df_inside(theta0);
    const double dfa = sol.df_outside(theta0);
    const double stress = cfg.beta * dfb * dfb - cfg.alpha * dfa * dfa + (cfg.beta - cfg.alpha) * 0.25 * fv * fv;
    const double gamma = -stress / ((cfg.n - 1) * std::cos(theta0));
    if (!(gamma > 0.0)) {
        throw SignError("cone_criticality_gamma: balancing surface tension is not positive");
    }
    return gamma;
}

struct BoundaryGradient {
    double normal_in = 0.0;   ///< d_nu u from inside E
    double normal_out = 0.0;  ///< d_nu u from outside E
    double tangential = 0.0;  ///< radial (tangential) derivative on the cone
};

/// Traces of Du on the cone surface at distance rho from the vertex.
inline BoundaryGradient cone_boundary_gradient(const ConeSolution& sol, double rho) {
    if (!(rho > 0.0)) throw DomainError("cone_boundary_gradient: rho must be positive");
    const double sr = std::sqrt(rho);
    return BoundaryGradient{sol.df_inside(sol.theta0) / sr, sol.df_outside(sol.theta0) / sr,
                            sol.f(sol.theta0) / (2.0 * sr)};
}

}  // namespace tcone::cones
