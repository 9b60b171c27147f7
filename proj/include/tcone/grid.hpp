#pragma once

// Tensor-product grids for the transmission problem, node-based potentials
// with a cellwise coefficient, and the matrix-free discrete operator.
//
// The discrete Dirichlet energy is a sum over cells,
//     e_c = sigma_c [ kx_c (du_bottom^2 + du_top^2) + ky_c (du_left^2 + du_right^2) ],
// where du are nodal differences along the four cell edges and kx_c, ky_c
// integrate the metric over the cell. Planar grids use Cartesian (x, y);
// cone grids use spherical (rho, theta) with rotational symmetry about the
// theta = 0 axis, so the same five-point structure carries the factor
// 2 pi rho^2 sin(theta).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tcone/errors.hpp"
#include "tcone/material.hpp"

namespace tcone::pde {

enum class GridShape { Planar, ConeAxisym };

/// Boundary condition on the small cap rho = rho_min around the cone vertex.
enum class CapCondition { Natural, Dirichlet };

inline constexpr std::size_t kMinResolution = 16;

/// Structured grid. For planar grids axis 0/1 are x/y; for cone grids they
/// are rho/theta (theta measured from the cone axis).
struct AxisymGrid {
    int n_eff = 2;
    GridShape shape = GridShape::Planar;
    std::vector<double> c0;  ///< node coordinates along axis 0
    std::vector<double> c1;  ///< node coordinates along axis 1
    double radius = 1.0;     ///< half-width (planar) or outer ball radius (cone)
    double interface_param = 0.0;  ///< half-space offset (planar) or theta0 (cone)
    std::size_t interface_index = 0;  ///< index of the interface line along axis 1
    CapCondition cap = CapCondition::Natural;

    std::vector<double> kx;   ///< per-cell metric factor for axis-0 edges
    std::vector<double> ky;   ///< per-cell metric factor for axis-1 edges
    std::vector<double> vol;  ///< per-cell measure (area or volume)

    [[nodiscard]] std::size_t n0() const { return c0.size(); }
    [[nodiscard]] std::size_t n1() const { return c1.size(); }
    [[nodiscard]] std::size_t cells0() const { return c0.size() - 1; }
    [[nodiscard]] std::size_t cells1() const { return c1.size() - 1; }
    [[nodiscard]] std::size_t num_nodes() const { return n0() * n1(); }
    [[nodiscard]] std::size_t num_cells() const { return cells0() * cells1(); }
    [[nodiscard]] std::size_t node(std::size_t i, std::size_t j) const { return j * n0() + i; }
    [[nodiscard]] std::size_t cell(std::size_t i, std::size_t j) const { return j * cells0() + i; }

    [[nodiscard]] bool is_dirichlet(std::size_t i, std::size_t j) const {
        if (shape == GridShape::Planar) {
            return i == 0 || j == 0 || i + 1 == n0() || j + 1 == n1();
        }
        if (i + 1 == n0()) return true;
        return i == 0 && cap == CapCondition::Dirichlet;
    }

    /// Cartesian position of a node; cone grids map to the meridian plane (x = rho sin, z = rho cos).
    [[nodiscard]] std::pair<double, double> position(std::size_t i, std::size_t j) const {
        if (shape == GridShape::Planar) return {c0[i], c1[j]};
        return {c0[i] * std::sin(c1[j]), c0[i] * std::cos(c1[j])};
    }

    /// Largest cell spacing measured in length units.
    [[nodiscard]] double spacing() const {
        double h = 0.0;
        for (std::size_t i = 0; i + 1 < n0(); ++i) h = std::max(h, c0[i + 1] - c0[i]);
        const double scale = shape == GridShape::Planar ? 1.0 : radius;
        for (std::size_t j = 0; j + 1 < n1(); ++j) h = std::max(h, scale * (c1[j + 1] - c1[j]));
        return h;
    }

    void compute_metric() {
        kx.assign(num_cells(), 0.0);
        ky.assign(num_cells(), 0.0);
        vol.assign(num_cells(), 0.0);
        for (std::size_t j = 0; j < cells1(); ++j) {
            for (std::size_t i = 0; i < cells0(); ++i) {
                const std::size_t c = cell(i, j);
                const double d0 = c0[i + 1] - c0[i];
                const double d1 = c1[j + 1] - c1[j];
                if (shape == GridShape::Planar) {
                    kx[c] = 0.5 * d1 / d0;
                    ky[c] = 0.5 * d0 / d1;
                    vol[c] = d0 * d1;
                } else {
                    const double ra = c0[i];
                    const double rb = c0[i + 1];
                    const double dcos = std::cos(c1[j]) - std::cos(c1[j + 1]);
                    const double radial = (rb * rb * rb - ra * ra * ra) / 3.0 * dcos;
                    const double polar = (rb - ra) * dcos;
                    kx[c] = std::numbers::pi * radial / (d0 * d0);
                    ky[c] = std::numbers::pi * polar / (d1 * d1);
                    vol[c] = 2.0 * std::numbers::pi * radial;
                }
            }
        }
    }
};

inline std::vector<double> linspace(double a, double b, std::size_t cells) {
    std::vector<double> v(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
        v[k] = (k == cells) ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(cells);
    }
    return v;
}

/// Planar grid on [x0, x1] x [y0, y1] with nx x ny cells.
inline AxisymGrid make_planar_grid(std::size_t nx, std::size_t ny, double x0, double x1, double y0, double y1) {
    if (nx < 2 || ny < 2) throw SingularityError("make_planar_grid: need at least 2 cells per direction");
    if (!(x1 > x0) || !(y1 > y0)) throw SingularityError("make_planar_grid: empty domain");
    AxisymGrid g;
    g.n_eff = 2;
    g.shape = GridShape::Planar;
    g.c0 = linspace(x0, x1, nx);
    g.c1 = linspace(y0, y1, ny);
    g.radius = 0.5 * std::max(x1 - x0, y1 - y0);
    g.compute_metric();
    return g;
}

/// Square [-R, R]^2 with an even number n of cells per side; the half-space
/// interface is the grid line y = 0.
inline AxisymGrid make_halfspace_grid(std::size_t n, double radius = 1.0) {
    if (n < kMinResolution || n % 2 != 0) {
        throw SingularityError("make_halfspace_grid: resolution must be even and at least 16");
    }
    AxisymGrid g = make_planar_grid(n, n, -radius, radius, -radius, radius);
    g.radius = radius;
    g.interface_param = 0.0;
    g.interface_index = n / 2;
    return g;
}

/// Spherical (rho, theta) grid for an axisymmetric cone of opening theta0.
/// rho runs over [R / n_rho, R] (the vertex cap of radius R / n_rho is
/// excised), theta over [0, pi] with theta0 on a grid line.
inline AxisymGrid make_cone_grid(std::size_t n_rho, std::size_t n_theta, double radius, double theta0,
                                 CapCondition cap = CapCondition::Natural) {
    if (n_rho < kMinResolution || n_theta < kMinResolution) {
        throw SingularityError("make_cone_grid: resolution must be at least 16 per direction");
    }
    if (!(theta0 > 0.0) || !(theta0 < std::numbers::pi)) throw DomainError("make_cone_grid: theta0 out of range");
    if (!(radius > 0.0)) throw DomainError("make_cone_grid: radius must be positive");
    AxisymGrid g;
    g.n_eff = 3;
    g.shape = GridShape::ConeAxisym;
    g.radius = radius;
    g.interface_param = theta0;
    g.cap = cap;
    const double h = radius / static_cast<double>(n_rho);
    g.c0 = linspace(h, radius, n_rho - 1);
    auto n_in = static_cast<std::size_t>(std::lround(static_cast<double>(n_theta) * theta0 / std::numbers::pi));
    n_in = std::clamp<std::size_t>(n_in, 4, n_theta - 4);
    const auto inner = linspace(0.0, theta0, n_in);
    const auto outer = linspace(theta0, std::numbers::pi, n_theta - n_in);
    g.c1 = inner;
    g.c1.insert(g.c1.end(), outer.begin() + 1, outer.end());
    g.interface_index = n_in;
    g.compute_metric();
    return g;
}

/// Phase of the canonical configuration of each grid: the half-space
/// {y < offset} for planar grids, the cone {theta < theta0} otherwise.
inline std::vector<std::uint8_t> canonical_phase(const AxisymGrid& g) {
    std::vector<std::uint8_t> phase(g.num_cells(), 0);
    for (std::size_t j = 0; j < g.cells1(); ++j) {
        const double mid = 0.5 * (g.c1[j] + g.c1[j + 1]);
        for (std::size_t i = 0; i < g.cells0(); ++i) {
            phase[g.cell(i, j)] = (mid < g.interface_param) ? 1 : 0;
        }
    }
    return phase;
}

struct SolveStats {
    std::size_t iterations = 0;
    double rel_residual = 0.0;
};

/// Discrete potential with its grid, phase map and coefficient.
struct ScalarField {
    AxisymGrid grid;
    MaterialConfig cfg;
    std::vector<std::uint8_t> phase;  ///< per cell, 1 = E (sigma = beta)
    std::vector<double> sigma;        ///< per cell
    std::vector<double> values;       ///< per node
    SolveStats stats;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[grid.node(i, j)]; }
};

inline std::vector<double> sigma_from_phase(const std::vector<std::uint8_t>& phase, const MaterialConfig& cfg) {
    std::vector<double> s(phase.size());
    for (std::size_t c = 0; c < phase.size(); ++c) s[c] = cfg.sigma(phase[c] != 0);
    return s;
}

/// Edge conductances of the five-point operator for a given coefficient.
class TransmissionOperator {
public:
    TransmissionOperator(const AxisymGrid& g, const std::vector<double>& sigma) : g_(&g) {
        if (sigma.size() != g.num_cells()) throw SingularityError("TransmissionOperator: sigma size mismatch");
        rebuild(sigma);
    }

    /// Recomputes every conductance from `sigma`.
    void rebuild(const std::vector<double>& sigma) {
        const auto& g = *g_;
        wx_.assign(g.cells0() * g.n1(), 0.0);
        wy_.assign(g.n0() * g.cells1(), 0.0);
        for (std::size_t j = 0; j < g.cells1(); ++j) {
            for (std::size_t i = 0; i < g.cells0(); ++i) {
                const std::size_t c = g.cell(i, j);
                const double ax = sigma[c] * g.kx[c];
                const double ay = sigma[c] * g.ky[c];
                wx_[j * g.cells0() + i] += ax;
                wx_[(j + 1) * g.cells0() + i] += ax;
                wy_[j * g.n0() + i] += ay;
                wy_[j * g.n0() + i + 1] += ay;
            }
        }
        diag_.assign(g.num_nodes(), 0.0);
        for (std::size_t j = 0; j < g.n1(); ++j) {
            for (std::size_t i = 0; i < g.n0(); ++i) {
                double d = 0.0;
                if (i > 0) d += wx(i - 1, j);
                if (i + 1 < g.n0()) d += wx(i, j);
                if (j > 0) d += wy(i, j - 1);
                if (j + 1 < g.n1()) d += wy(i, j);
                diag_[g.node(i, j)] = d;
            }
        }
    }

    /// Adds the contribution of a coefficient change `dsigma` on cell (i, j).
    void update_cell(std::size_t i, std::size_t j, double dsigma) {
        const auto& g = *g_;
        const std::size_t c = g.cell(i, j);
        const double ax = dsigma * g.kx[c];
        const double ay = dsigma * g.ky[c];
        wx_[j * g.cells0() + i] += ax;
        wx_[(j + 1) * g.cells0() + i] += ax;
        wy_[j * g.n0() + i] += ay;
        wy_[j * g.n0() + i + 1] += ay;
        for (std::size_t k : {g.node(i, j), g.node(i + 1, j), g.node(i, j + 1), g.node(i + 1, j + 1)}) {
            diag_[k] += ax + ay;
        }
    }

    /// Conductance of the axis-0 edge (i, j) -- (i + 1, j).
    [[nodiscard]] double wx(std::size_t i, std::size_t j) const { return wx_[j * g_->cells0() + i]; }
    /// Conductance of the axis-1 edge (i, j) -- (i, j + 1).
    [[nodiscard]] double wy(std::size_t i, std::size_t j) const { return wy_[j * g_->n0() + i]; }
    [[nodiscard]] double diag(std::size_t node) const { return diag_[node]; }
    [[nodiscard]] const AxisymGrid& grid() const { return *g_; }

    /// out = A u (all nodes, no boundary masking).
    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        const auto& g = *g_;
        out.assign(g.num_nodes(), 0.0);
        for (std::size_t j = 0; j < g.n1(); ++j) {
            for (std::size_t i = 0; i < g.n0(); ++i) {
                const std::size_t k = g.node(i, j);
                double acc = 0.0;
                if (i > 0) acc += wx(i - 1, j) * (u[k] - u[k - 1]);
                if (i + 1 < g.n0()) acc += wx(i, j) * (u[k] - u[k + 1]);
                if (j > 0) acc += wy(i, j - 1) * (u[k] - u[k - g.n0()]);
                if (j + 1 < g.n1()) acc += wy(i, j) * (u[k] - u[k + g.n0()]);
                out[k] = acc;
            }
        }
    }

    /// Discrete energy sum_e w_e (du_e)^2.
    [[nodiscard]] double energy(const std::vector<double>& u) const {
        const auto& g = *g_;
        double e = 0.0;
        for (std::size_t j = 0; j < g.n1(); ++j) {
            for (std::size_t i = 0; i + 1 < g.n0(); ++i) {
                const double d = u[g.node(i + 1, j)] - u[g.node(i, j)];
                e += wx(i, j) * d * d;
            }
        }
        for (std::size_t j = 0; j + 1 < g.n1(); ++j) {
            for (std::size_t i = 0; i < g.n0(); ++i) {
                const double d = u[g.node(i, j + 1)] - u[g.node(i, j)];
                e += wy(i, j) * d * d;
            }
        }
        return e;
    }

private:
    const AxisymGrid* g_;
    std::vector<double> wx_;
    std::vector<double> wy_;
    std::vector<double> diag_;
};

inline std::vector<std::uint8_t> dirichlet_mask(const AxisymGrid& g) {
    std::vector<std::uint8_t> m(g.num_nodes(), 0);
    for (std::size_t j = 0; j < g.n1(); ++j)
        for (std::size_t i = 0; i < g.n0(); ++i) m[g.node(i, j)] = g.is_dirichlet(i, j) ? 1 : 0;
    return m;
}

/// Jacobi-preconditioned conjugate gradients on the free nodes. `u` holds
/// the Dirichlet data on masked nodes and the initial guess elsewhere.
/// Convergence is measured as ||r|| / ||b|| with b = -(A u_lift) on free
/// nodes and u_lift the Dirichlet data extended by zero.
inline SolveStats pcg(const TransmissionOperator& op, const std::vector<std::uint8_t>& mask,
                      std::vector<double>& u, double tol, std::size_t max_iter = 0) {
    const auto& g = op.grid();
    const std::size_t n = g.num_nodes();
    if (max_iter == 0) max_iter = 20 * n + 1000;

    std::vector<double> lift(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        if (mask[k]) lift[k] = u[k];
    std::vector<double> tmp;
    op.apply(lift, tmp);
    double b_norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (!mask[k]) b_norm2 += tmp[k] * tmp[k];
    const double b_norm = std::sqrt(b_norm2);

    for (std::size_t k = 0; k < n; ++k) {
        if (!mask[k] && !(op.diag(k) > 0.0)) throw SingularityError("pcg: isolated free node");
    }

    std::vector<double> r(n, 0.0);
    std::vector<double> z(n, 0.0);
    std::vector<double> p(n, 0.0);
    std::vector<double> q;
    op.apply(u, tmp);
    double r_norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = mask[k] ? 0.0 : -tmp[k];
        r_norm2 += r[k] * r[k];
    }
    const double scale = b_norm > 0.0 ? b_norm : 1.0;
    SolveStats stats;
    stats.rel_residual = std::sqrt(r_norm2) / scale;
    if (stats.rel_residual <= tol) return stats;

    double rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = mask[k] ? 0.0 : r[k] / op.diag(k);
        p[k] = z[k];
        rz += r[k] * z[k];
    }
    for (std::size_t it = 1; it <= max_iter; ++it) {
        op.apply(p, q);
        double pq = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (!mask[k]) pq += p[k] * q[k];
        if (!(pq > 0.0)) throw SingularityError("pcg: operator is not positive definite on free nodes");
        const double step = rz / pq;
        r_norm2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask[k]) continue;
            u[k] += step * p[k];
            r[k] -= step * q[k];
            r_norm2 += r[k] * r[k];
        }
        stats.iterations = it;
        stats.rel_residual = std::sqrt(r_norm2) / scale;
        if (stats.rel_residual <= tol) return stats;
        double rz_new = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask[k]) continue;
            z[k] = r[k] / op.diag(k);
            rz_new += r[k] * z[k];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = mask[k] ? 0.0 : z[k] + beta * p[k];
    }
    throw ConvergenceError("pcg: iteration budget exhausted (relative residual " +
                           std::to_string(stats.rel_residual) + ")");
}

}  // namespace tcone::pde
