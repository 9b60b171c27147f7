#pragma once

// Transmission solves on planar half-space and axisymmetric cone grids, ball
// quadrature, and the numerical checks built on it: monotonicity of ball
// averages, energy decay fits, the flux jump across the interface, reverse
// Hoelder ratios and the inside-phase energy lower bound on cones.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tcone/constants.hpp"
#include "tcone/errors.hpp"
#include "tcone/geometry.hpp"
#include "tcone/grid.hpp"
#include "tcone/material.hpp"

namespace tcone::pde {

/// Boundary datum in grid coordinates: (x, y) on planar grids, (rho, theta) on cone grids.
using BoundaryFn = std::function<double(double, double)>;

inline constexpr double kDefaultSolveTol = 1e-10;
inline constexpr std::size_t kConeSubsamples = 8;

inline ScalarField solve_transmission(const AxisymGrid& grid, const std::vector<std::uint8_t>& phase,
                                      const MaterialConfig& cfg, const BoundaryFn& boundary,
                                      double tol = kDefaultSolveTol) {
    cfg.validate_allow_equal();
    if (!(tol > 0.0)) throw DomainError("solve_transmission: tol must be positive");
    if (phase.size() != grid.num_cells()) throw SingularityError("solve_transmission: phase size mismatch");
    ScalarField f;
    f.grid = grid;
    f.cfg = cfg;
    f.phase = phase;
    f.sigma = sigma_from_phase(phase, cfg);
    f.values.assign(grid.num_nodes(), 0.0);
    for (std::size_t j = 0; j < grid.n1(); ++j) {
        for (std::size_t i = 0; i < grid.n0(); ++i) {
            if (!grid.is_dirichlet(i, j)) continue;
            const double v = boundary(grid.c0[i], grid.c1[j]);
            if (!std::isfinite(v)) throw DomainError("solve_transmission: boundary data not finite");
            f.values[grid.node(i, j)] = v;
        }
    }
    const TransmissionOperator op(f.grid, f.sigma);
    f.stats = pcg(op, dirichlet_mask(f.grid), f.values, tol);
    return f;
}

/// Solve on the canonical configuration of the grid (half-space or cone).
inline ScalarField solve_transmission(const AxisymGrid& grid, const MaterialConfig& cfg,
                                      const BoundaryFn& boundary, double tol = kDefaultSolveTol) {
    return solve_transmission(grid, canonical_phase(grid), cfg, boundary, tol);
}

/// Nodal interpolant of `fn` on the canonical configuration (no solve).
inline ScalarField sample_field(const AxisymGrid& grid, const MaterialConfig& cfg, const BoundaryFn& fn) {
    ScalarField f;
    f.grid = grid;
    f.cfg = cfg;
    f.phase = canonical_phase(grid);
    f.sigma = sigma_from_phase(f.phase, cfg);
    f.values.resize(grid.num_nodes());
    for (std::size_t j = 0; j < grid.n1(); ++j)
        for (std::size_t i = 0; i < grid.n0(); ++i) f.values[grid.node(i, j)] = fn(grid.c0[i], grid.c1[j]);
    return f;
}

/// Max over free nodes of |(A u)_k| relative to max_k diag_k * max|u|.
inline double galerkin_residual(const ScalarField& f) {
    const TransmissionOperator op(f.grid, f.sigma);
    std::vector<double> au;
    op.apply(f.values, au);
    double res = 0.0;
    double diag = 0.0;
    double umax = 0.0;
    for (std::size_t j = 0; j < f.grid.n1(); ++j) {
        for (std::size_t i = 0; i < f.grid.n0(); ++i) {
            const std::size_t k = f.grid.node(i, j);
            umax = std::max(umax, std::abs(f.values[k]));
            if (f.grid.is_dirichlet(i, j)) continue;
            res = std::max(res, std::abs(au[k]));
            diag = std::max(diag, op.diag(k));
        }
    }
    const double scale = diag * std::max(umax, 1.0);
    return scale > 0.0 ? res / scale : res;
}

/// Discrete energy of the whole field, sum over cells of sigma |Du|^2.
inline double total_dirichlet(const ScalarField& f) {
    return TransmissionOperator(f.grid, f.sigma).energy(f.values);
}

struct FieldError {
    double max_abs = 0.0;
    double l2 = 0.0;
};

/// Nodal max error and cell-averaged L2 error against `fn`.
inline FieldError field_error(const ScalarField& f, const BoundaryFn& fn) {
    const auto& g = f.grid;
    std::vector<double> err(g.num_nodes());
    FieldError out;
    for (std::size_t j = 0; j < g.n1(); ++j) {
        for (std::size_t i = 0; i < g.n0(); ++i) {
            const std::size_t k = g.node(i, j);
            err[k] = f.values[k] - fn(g.c0[i], g.c1[j]);
            out.max_abs = std::max(out.max_abs, std::abs(err[k]));
        }
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < g.cells1(); ++j) {
        for (std::size_t i = 0; i < g.cells0(); ++i) {
            const double e2 = 0.25 * (err[g.node(i, j)] * err[g.node(i, j)] +
                                      err[g.node(i + 1, j)] * err[g.node(i + 1, j)] +
                                      err[g.node(i, j + 1)] * err[g.node(i, j + 1)] +
                                      err[g.node(i + 1, j + 1)] * err[g.node(i + 1, j + 1)]);
            acc += e2 * g.vol[g.cell(i, j)];
        }
    }
    out.l2 = std::sqrt(acc);
    return out;
}

/// Cell average of |Du|^2 consistent with the discrete energy.
inline double cell_grad_sq(const ScalarField& f, std::size_t i, std::size_t j) {
    const auto& g = f.grid;
    const std::size_t c = g.cell(i, j);
    const double u00 = f.values[g.node(i, j)];
    const double u10 = f.values[g.node(i + 1, j)];
    const double u01 = f.values[g.node(i, j + 1)];
    const double u11 = f.values[g.node(i + 1, j + 1)];
    const double db = u10 - u00;
    const double dt = u11 - u01;
    const double dl = u01 - u00;
    const double dr = u11 - u10;
    return (g.kx[c] * (db * db + dt * dt) + g.ky[c] * (dl * dl + dr * dr)) / g.vol[c];
}

namespace detail {

inline void check_ball(const AxisymGrid& g, geometry::Point center, double r, const char* who) {
    if (!(r > 0.0)) throw DomainError(std::string(who) + ": radius must be positive");
    constexpr double slack = 1e-12;
    if (g.shape == GridShape::Planar) {
        if (center.x - r < g.c0.front() - slack || center.x + r > g.c0.back() + slack ||
            center.y - r < g.c1.front() - slack || center.y + r > g.c1.back() + slack) {
            throw DomainError(std::string(who) + ": ball exits the grid domain");
        }
        return;
    }
    if (center.x != 0.0) throw DomainError(std::string(who) + ": cone balls must be centred on the axis");
    if (std::abs(center.y) + r > g.radius * (1.0 + slack)) {
        throw DomainError(std::string(who) + ": ball exits the grid domain");
    }
}

// Fraction of cell (i, j) inside B_r(center).
inline double ball_fraction(const AxisymGrid& g, std::size_t i, std::size_t j, geometry::Point center, double r) {
    if (g.shape == GridShape::Planar) {
        const double a = geometry::disk_rect_area(center, r, g.c0[i], g.c0[i + 1], g.c1[j], g.c1[j + 1]);
        return a / g.vol[g.cell(i, j)];
    }
    const double ra = g.c0[i];
    const double rb = g.c0[i + 1];
    if (center.y == 0.0) {
        if (rb <= r) return 1.0;
        if (ra >= r) return 0.0;
        return (r * r * r - ra * ra * ra) / (rb * rb * rb - ra * ra * ra);
    }
    const double ta = g.c1[j];
    const double tb = g.c1[j + 1];
    const double rm = 0.5 * (ra + rb);
    const double tm = 0.5 * (ta + tb);
    const double mx = rm * std::sin(tm);
    const double mz = rm * std::cos(tm);
    double reach = 0.0;
    for (double rr : {ra, rb})
        for (double tt : {ta, tb}) reach = std::max(reach, std::hypot(rr * std::sin(tt) - mx, rr * std::cos(tt) - mz));
    reach += rb * (tb - ta) * (tb - ta) / 8.0 + 1e-14;
    const double dist = std::hypot(mx, mz - center.y);
    if (dist + reach <= r) return 1.0;
    if (dist - reach >= r) return 0.0;
    double inside = 0.0;
    double total = 0.0;
    const auto n = static_cast<double>(kConeSubsamples);
    for (std::size_t a = 0; a < kConeSubsamples; ++a) {
        const double rr = ra + (rb - ra) * (static_cast<double>(a) + 0.5) / n;
        for (std::size_t b = 0; b < kConeSubsamples; ++b) {
            const double tt = ta + (tb - ta) * (static_cast<double>(b) + 0.5) / n;
            const double w = rr * rr * std::sin(tt);
            total += w;
            if (std::hypot(rr * std::sin(tt), rr * std::cos(tt) - center.y) < r) inside += w;
        }
    }
    return total > 0.0 ? inside / total : 0.0;
}

// Sum over cells of fraction * vol * integrand(i, j).
template <class F>
double ball_integral(const ScalarField& f, geometry::Point center, double r, F&& integrand) {
    const auto& g = f.grid;
    std::size_t i0 = 0, i1 = g.cells0(), j0 = 0, j1 = g.cells1();
    if (g.shape == GridShape::Planar) {
        auto lo = [](const std::vector<double>& c, double v) {
            const auto it = std::upper_bound(c.begin(), c.end(), v);
            return it == c.begin() ? std::size_t{0} : static_cast<std::size_t>(it - c.begin()) - 1;
        };
        auto hi = [](const std::vector<double>& c, double v) {
            return static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), v) - c.begin());
        };
        i0 = lo(g.c0, center.x - r);
        i1 = std::min(g.cells0(), hi(g.c0, center.x + r));
        j0 = lo(g.c1, center.y - r);
        j1 = std::min(g.cells1(), hi(g.c1, center.y + r));
    }
    double acc = 0.0;
    for (std::size_t j = j0; j < j1; ++j) {
        for (std::size_t i = i0; i < i1; ++i) {
            const double w = ball_fraction(g, i, j, center, r);
            if (w <= 0.0) continue;
            acc += w * g.vol[g.cell(i, j)] * integrand(i, j);
        }
    }
    return acc;
}

inline void check_radii(const std::vector<double>& radii, std::size_t min_count, const char* who) {
    if (radii.size() < min_count) {
        throw DomainError(std::string(who) + ": need at least " + std::to_string(min_count) + " radii");
    }
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
            throw DomainError(std::string(who) + ": radii must be positive and strictly increasing");
        }
    }
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_dev = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    for (std::size_t k = 0; k < x.size(); ++k) {
        out.max_dev = std::max(out.max_dev, std::abs(y[k] - (out.intercept + out.slope * x[k])));
    }
    return out;
}

}  // namespace detail

/// Measure of B_r(center) as seen by the grid quadrature.
inline double ball_measure(const ScalarField& f, geometry::Point center, double r) {
    detail::check_ball(f.grid, center, r, "ball_measure");
    return detail::ball_integral(f, center, r, [](std::size_t, std::size_t) { return 1.0; });
}

/// Integral of |Du|^2 (or sigma |Du|^2 when `weighted`) over B_rho(center).
inline double dirichlet_energy(const ScalarField& f, geometry::Point center, double rho, bool weighted) {
    detail::check_ball(f.grid, center, rho, "dirichlet_energy");
    return detail::ball_integral(f, center, rho, [&](std::size_t i, std::size_t j) {
        const double g2 = cell_grad_sq(f, i, j);
        return weighted ? f.sigma[f.grid.cell(i, j)] * g2 : g2;
    });
}

/// Integral of |Du|^2 over E intersected with B_rho(center).
inline double phase_energy(const ScalarField& f, geometry::Point center, double rho) {
    detail::check_ball(f.grid, center, rho, "phase_energy");
    return detail::ball_integral(f, center, rho, [&](std::size_t i, std::size_t j) {
        return f.phase[f.grid.cell(i, j)] ? cell_grad_sq(f, i, j) : 0.0;
    });
}

struct MonotonicityReport {
    std::vector<double> radii;
    std::vector<double> averages;  ///< (1/|B_rho|) int_{B_rho} sigma |Du|^2
    double tolerance = 0.0;        ///< 10 h^2 max(averages)
    double max_drop = 0.0;         ///< largest averages[k] - averages[k+1]
    bool passed = true;
};

/// True when the phase of a planar grid is {y < offset} for the grid's interface offset.
inline bool is_halfspace_configuration(const ScalarField& f) {
    const auto& g = f.grid;
    if (g.shape != GridShape::Planar) return false;
    const auto canon = canonical_phase(g);
    if (f.phase != canon) return false;
    return g.interface_index > 0 && g.interface_index + 1 < g.n1() && g.c1[g.interface_index] == g.interface_param;
}

inline MonotonicityReport check_monotonicity(const ScalarField& f, geometry::Point center,
                                             const std::vector<double>& radii) {
    if (!is_halfspace_configuration(f)) {
        throw ConfigError("check_monotonicity: the interface is not a half-space");
    }
    if (std::abs(center.y - f.grid.interface_param) > 1e-12) {
        throw ConfigError("check_monotonicity: the centre must lie on the interface");
    }
    detail::check_radii(radii, 2, "check_monotonicity");
    MonotonicityReport rep;
    rep.radii = radii;
    for (double r : radii) {
        const double e = dirichlet_energy(f, center, r, true);
        rep.averages.push_back(e / ball_measure(f, center, r));
    }
    const double h = f.grid.spacing();
    const double scale = *std::max_element(rep.averages.begin(), rep.averages.end());
    rep.tolerance = 10.0 * h * h * scale;
    for (std::size_t k = 0; k + 1 < rep.averages.size(); ++k) {
        rep.max_drop = std::max(rep.max_drop, rep.averages[k] - rep.averages[k + 1]);
    }
    rep.passed = rep.max_drop <= rep.tolerance;
    return rep;
}

struct DecayFit {
    std::vector<double> radii;
    std::vector<double> energies;           ///< int_{B_rho} |Du|^2
    std::vector<double> weighted_energies;  ///< int_{B_rho} sigma |Du|^2
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;  ///< max deviation of log energy from the fitted line
};

inline constexpr double kDegenerateEnergy = 1e-14;

inline DecayFit decay_fit(const ScalarField& f, geometry::Point center, const std::vector<double>& radii) {
    detail::check_radii(radii, 5, "decay_fit");
    DecayFit out;
    out.radii = radii;
    for (double r : radii) {
        out.energies.push_back(dirichlet_energy(f, center, r, false));
        out.weighted_energies.push_back(dirichlet_energy(f, center, r, true));
    }
    if (std::all_of(out.energies.begin(), out.energies.end(), [](double e) { return e < kDegenerateEnergy; })) {
        throw DegenerateError("decay_fit: all energies vanish");
    }
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(out.energies[k] > 0.0)) throw DegenerateError("decay_fit: zero energy on a ball of the ladder");
        lx.push_back(std::log(radii[k]));
        ly.push_back(std::log(out.energies[k]));
    }
    const auto fit = detail::fit_line(lx, ly);
    out.fitted_exponent = fit.slope;
    out.fit_residual = fit.max_dev;
    return out;
}

/// Geometric ladder of `count` radii from r_min to r_max.
inline std::vector<double> geometric_radii(double r_min, double r_max, std::size_t count) {
    if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw DomainError("geometric_radii: bad ladder");
    std::vector<double> out(count);
    const double q = std::log(r_max / r_min) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) out[k] = r_min * std::exp(q * static_cast<double>(k));
    out.back() = r_max;
    return out;
}

/// Fraction of the cone radius below which flux-jump stencils are not evaluated.
inline constexpr double kFluxWindowInner = 0.1;

/// Max over interface nodes of |sigma_+ d_nu u_+ - sigma_- d_nu u_-| with
/// one-sided second-order normal stencils. Planar grids use every interior
/// node of the line y = offset; cone grids use nodes with rho in [0.1 R, R).
inline double flux_jump(const ScalarField& f) {
    const auto& g = f.grid;
    const std::size_t jm = g.interface_index;
    if (jm < 2 || jm + 2 >= g.n1()) throw SingularityError("flux_jump: interface too close to the grid edge");
    const double h_minus = g.c1[jm] - g.c1[jm - 1];
    const double h_plus = g.c1[jm + 1] - g.c1[jm];
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < g.n0(); ++i) {
        double metric = 1.0;
        if (g.shape == GridShape::ConeAxisym) {
            if (g.c0[i] < kFluxWindowInner * g.radius) continue;
            metric = 1.0 / g.c0[i];
        }
        const double u0 = f.at(i, jm);
        const double d_plus = metric * (-3.0 * u0 + 4.0 * f.at(i, jm + 1) - f.at(i, jm + 2)) / (2.0 * h_plus);
        const double d_minus = metric * (3.0 * u0 - 4.0 * f.at(i, jm - 1) + f.at(i, jm - 2)) / (2.0 * h_minus);
        const std::size_t ci = std::min(i, g.cells0() - 1);
        const double s_plus = f.sigma[g.cell(ci, jm)];
        const double s_minus = f.sigma[g.cell(ci, jm - 1)];
        worst = std::max(worst, std::abs(s_plus * d_plus - s_minus * d_minus));
    }
    return worst;
}

struct BallSpec {
    geometry::Point center;
    double r = 0.0;
};

struct ReverseHolderRow {
    BallSpec ball;
    double lhs = 0.0;             ///< mean of |Du|^{2p} over B_r
    double rhs_base = 0.0;        ///< mean of |Du|^2 over B_{2r}
    double ratio_log10 = 0.0;     ///< log10 of lhs / (C rhs_base^p)
    double empirical_constant = 0.0;  ///< lhs / rhs_base^p
    bool passed = true;
};

struct ReverseHolderReport {
    double p = 1.0;
    double c_log10 = 0.0;
    std::vector<ReverseHolderRow> rows;
    double max_empirical_constant = 0.0;
    bool passed = true;
};

inline ReverseHolderReport reverse_holder_check(const ScalarField& f, const constants::ConstantsLedger& ledger,
                                                const std::vector<BallSpec>& balls) {
    if (ledger.n != f.grid.n_eff) throw ConfigError("reverse_holder_check: ledger dimension differs from the grid");
    ReverseHolderReport rep;
    rep.p = ledger.p;
    rep.c_log10 = ledger.c_gehring.log10;
    for (const auto& b : balls) {
        detail::check_ball(f.grid, b.center, 2.0 * b.r, "reverse_holder_check");
        ReverseHolderRow row;
        row.ball = b;
        const double m1 = ball_measure(f, b.center, b.r);
        const double m2 = ball_measure(f, b.center, 2.0 * b.r);
        row.lhs = detail::ball_integral(f, b.center, b.r,
                                        [&](std::size_t i, std::size_t j) { return std::pow(cell_grad_sq(f, i, j), ledger.p); }) /
                  m1;
        row.rhs_base = dirichlet_energy(f, b.center, 2.0 * b.r, false) / m2;
        if (row.rhs_base > 0.0) {
            row.empirical_constant = row.lhs / std::pow(row.rhs_base, ledger.p);
            row.ratio_log10 = std::log10(row.empirical_constant) - rep.c_log10;
        } else {
            row.empirical_constant = 0.0;
            row.ratio_log10 = -std::numeric_limits<double>::infinity();
        }
        row.passed = row.ratio_log10 <= 0.0;
        rep.max_empirical_constant = std::max(rep.max_empirical_constant, row.empirical_constant);
        rep.passed = rep.passed && row.passed;
        rep.rows.push_back(row);
    }
    return rep;
}

struct ConeLowerBoundReport {
    std::vector<double> radii;
    std::vector<double> inside_energies;  ///< int_{E cap B_rho} |Du|^2
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
    double c0 = 0.0;  ///< min over the ladder of inside energy / rho^{n-1}
    bool passed = true;
};

/// Fits the growth of the inside-phase energy around the cone vertex.
inline ConeLowerBoundReport cone_energy_lowerbound_check(const ScalarField& f, const std::vector<double>& radii) {
    if (f.grid.shape != GridShape::ConeAxisym) throw ConfigError("cone_energy_lowerbound_check: not a cone grid");
    if (f.cfg.alpha == f.cfg.beta) {
        throw ConfigError("cone_energy_lowerbound_check: no interface when alpha equals beta");
    }
    detail::check_radii(radii, 5, "cone_energy_lowerbound_check");
    ConeLowerBoundReport rep;
    rep.radii = radii;
    const double k = static_cast<double>(f.grid.n_eff - 1);
    std::vector<double> lx, ly;
    rep.c0 = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const double e = phase_energy(f, {0.0, 0.0}, r);
        rep.inside_energies.push_back(e);
        if (!(e > kDegenerateEnergy)) throw DegenerateError("cone_energy_lowerbound_check: vanishing inside energy");
        lx.push_back(std::log(r));
        ly.push_back(std::log(e));
        rep.c0 = std::min(rep.c0, e / std::pow(r, k));
    }
    const auto fit = detail::fit_line(lx, ly);
    rep.fitted_exponent = fit.slope;
    rep.fit_residual = fit.max_dev;
    rep.passed = rep.c0 > 0.0 && rep.fitted_exponent <= k + 0.1;
    return rep;
}

// Boundary data -------------------------------------------------------------

/// Exact half-space solution for E = {y < offset}: slope 1/beta below, 1/alpha above.
inline BoundaryFn halfspace_exact(const MaterialConfig& cfg, double offset = 0.0) {
    return [cfg, offset](double, double y) {
        const double s = y - offset;
        return s >= 0.0 ? s / cfg.alpha : s / cfg.beta;
    };
}

enum class BoundaryPreset { LinearX, Quadratic, TwoPole };

/// Named presets on the unit square.
inline BoundaryFn preset(BoundaryPreset p) {
    switch (p) {
        case BoundaryPreset::LinearX:
            return [](double x, double) { return x; };
        case BoundaryPreset::Quadratic:
            return [](double x, double y) { return (x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5); };
        case BoundaryPreset::TwoPole:
            return [](double x, double y) {
                const double a = std::hypot(x + 0.25, y - 0.5);
                const double b = std::hypot(x - 1.25, y - 0.5);
                return std::log(a / b);
            };
    }
    throw DomainError("preset: unknown boundary preset");
}

inline BoundaryPreset parse_preset(const std::string& name) {
    if (name == "linear-x") return BoundaryPreset::LinearX;
    if (name == "quadratic") return BoundaryPreset::Quadratic;
    if (name == "two-pole") return BoundaryPreset::TwoPole;
    throw DomainError("unknown boundary preset '" + name + "'");
}

inline std::string preset_name(BoundaryPreset p) {
    switch (p) {
        case BoundaryPreset::LinearX: return "linear-x";
        case BoundaryPreset::Quadratic: return "quadratic";
        case BoundaryPreset::TwoPole: return "two-pole";
    }
    return "unknown";
}

/// `fn` composed with the affine map taking [x0, x1] x [y0, y1] onto the unit square.
inline BoundaryFn on_unit_square(BoundaryFn fn, double x0, double x1, double y0, double y1) {
    return [fn = std::move(fn), x0, x1, y0, y1](double x, double y) {
        return fn((x - x0) / (x1 - x0), (y - y0) / (y1 - y0));
    };
}

/// Cubic polynomial sum_{a+b<=3} c_ab x^a y^b.
struct Cubic {
    std::array<double, 10> c{};

    [[nodiscard]] double operator()(double x, double y) const {
        const std::array<double, 10> m{1.0, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y};
        double s = 0.0;
        for (std::size_t k = 0; k < 10; ++k) s += c[k] * m[k];
        return s;
    }
};

}  // namespace tcone::pde
