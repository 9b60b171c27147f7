#pragma once

// Two-dimensional alternating minimization of the penalized two-phase energy
//     F(E, u) = gamma P(E) + int sigma_E |Du|^2 + Lambda | |E| - target |
// over cell phases of a uniform grid on the unit square, with u the discrete
// elastic minimizer for the current phase. The perimeter is the length of the
// marching-squares contour of the cell indicator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "tcone/errors.hpp"
#include "tcone/geometry.hpp"
#include "tcone/grid.hpp"
#include "tcone/material.hpp"
#include "tcone/pde.hpp"

namespace tcone::minimizer {

using geometry::Point;
using geometry::Segment;

/// Contour segment with the outer unit normal of E.
struct InterfaceSegment {
    Segment seg;
    Point normal;

    [[nodiscard]] Point midpoint() const { return {0.5 * (seg.a.x + seg.b.x), 0.5 * (seg.a.y + seg.b.y)}; }
};

struct EnergyParts {
    double perimeter = 0.0;
    double dirichlet = 0.0;
    double volume = 0.0;
    double total = 0.0;
};

struct InterfaceState {
    pde::ScalarField field;  ///< grid, phase, sigma and the solved potential
    pde::BoundaryFn boundary;
    double target_volume = 0.5;
    EnergyParts parts;

    [[nodiscard]] std::size_t n() const { return field.grid.cells0(); }
    [[nodiscard]] double h() const { return 1.0 / static_cast<double>(n()); }
    [[nodiscard]] double energy() const { return parts.total; }
    [[nodiscard]] const std::vector<std::uint8_t>& phase() const { return field.phase; }
};

// Marching squares --------------------------------------------------------

namespace detail {

// Phase of cell (a, b) with edge replication outside [0, n).
inline int padded(const std::vector<std::uint8_t>& phase, std::size_t n, long a, long b) {
    const long m = static_cast<long>(n) - 1;
    const auto i = static_cast<std::size_t>(std::clamp(a, 0L, m));
    const auto j = static_cast<std::size_t>(std::clamp(b, 0L, m));
    return phase[j * n + i];
}

// Segments of the dual square whose corners are the centres of cells
// (a, b), (a+1, b), (a+1, b+1), (a, b+1); a, b range over [-1, n-1].
// Saddles separate the two E corners. Segments are clipped to the unit square.
template <class Out>
void dual_square_segments(const std::vector<std::uint8_t>& phase, std::size_t n, long a, long b, Out&& out) {
    const int bl = padded(phase, n, a, b);
    const int br = padded(phase, n, a + 1, b);
    const int tr = padded(phase, n, a + 1, b + 1);
    const int tl = padded(phase, n, a, b + 1);
    const int count = bl + br + tr + tl;
    if (count == 0 || count == 4) return;
    const double h = 1.0 / static_cast<double>(n);
    const double x0 = (static_cast<double>(a) + 0.5) * h;
    const double y0 = (static_cast<double>(b) + 0.5) * h;
    const Point pb{x0 + 0.5 * h, y0};
    const Point pr{x0 + h, y0 + 0.5 * h};
    const Point pt{x0 + 0.5 * h, y0 + h};
    const Point pl{x0, y0 + 0.5 * h};
    const std::array<Point, 4> corners{Point{x0, y0}, Point{x0 + h, y0}, Point{x0 + h, y0 + h}, Point{x0, y0 + h}};
    const std::array<int, 4> in{bl, br, tr, tl};

    auto emit = [&](Point p, Point q, Point e_side) {
        auto clipped = geometry::clip_segment_to_box(Segment{p, q}, 0.0, 1.0, 0.0, 1.0);
        if (!clipped || clipped->length() <= 0.0) return;
        const double len = Segment{p, q}.length();
        Point nrm{(q.y - p.y) / len, -(q.x - p.x) / len};
        const Point mid{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
        if ((e_side.x - mid.x) * nrm.x + (e_side.y - mid.y) * nrm.y > 0.0) nrm = {-nrm.x, -nrm.y};
        out(InterfaceSegment{*clipped, nrm});
    };

    if (count == 2 && bl == tr) {
        // Saddle: cut off each E corner.
        if (bl) {
            emit(pb, pl, corners[0]);
            emit(pt, pr, corners[2]);
        } else {
            emit(pb, pr, corners[1]);
            emit(pt, pl, corners[3]);
        }
        return;
    }
    Point ce{0.0, 0.0};
    for (std::size_t k = 0; k < 4; ++k) {
        if (in[k]) {
            ce.x += corners[k].x / count;
            ce.y += corners[k].y / count;
        }
    }
    std::array<Point, 2> ends{};
    std::size_t m = 0;
    if (bl != br) ends[m++] = pb;
    if (br != tr) ends[m++] = pr;
    if (tr != tl) ends[m++] = pt;
    if (tl != bl) ends[m++] = pl;
    emit(ends[0], ends[1], ce);
}

inline double dual_square_length(const std::vector<std::uint8_t>& phase, std::size_t n, long a, long b) {
    double len = 0.0;
    dual_square_segments(phase, n, a, b, [&](const InterfaceSegment& s) { len += s.seg.length(); });
    return len;
}

// Perimeter over the dual squares [a0, a1] x [b0, b1] (clamped to [-1, n-1]).
inline double local_perimeter(const std::vector<std::uint8_t>& phase, std::size_t n, long a0, long a1, long b0,
                              long b1) {
    const long m = static_cast<long>(n) - 1;
    double len = 0.0;
    for (long b = std::max(b0, -1L); b <= std::min(b1, m); ++b)
        for (long a = std::max(a0, -1L); a <= std::min(a1, m); ++a) len += dual_square_length(phase, n, a, b);
    return len;
}

}  // namespace detail

/// Marching-squares contour of the phase on an n x n cell grid of the unit square.
inline std::vector<InterfaceSegment> interface_segments(const std::vector<std::uint8_t>& phase, std::size_t n) {
    std::vector<InterfaceSegment> out;
    const long m = static_cast<long>(n) - 1;
    for (long b = -1; b <= m; ++b)
        for (long a = -1; a <= m; ++a)
            detail::dual_square_segments(phase, n, a, b, [&](const InterfaceSegment& s) { out.push_back(s); });
    return out;
}

inline double discrete_perimeter(const std::vector<std::uint8_t>& phase, std::size_t n) {
    const long m = static_cast<long>(n) - 1;
    return detail::local_perimeter(phase, n, -1, m, -1, m);
}

inline double phase_volume(const std::vector<std::uint8_t>& phase, std::size_t n) {
    const auto cells = std::count(phase.begin(), phase.end(), std::uint8_t{1});
    return static_cast<double>(cells) / static_cast<double>(n * n);
}

// Energy ------------------------------------------------------------------

inline double volume_penalty(const MaterialConfig& cfg, double volume, double target) {
    return cfg.lambda_pen * std::abs(volume - target);
}

/// Recomputes every term of the energy from the phase and the stored potential.
inline EnergyParts total_energy(const InterfaceState& s, const MaterialConfig& cfg) {
    EnergyParts p;
    p.perimeter = discrete_perimeter(s.phase(), s.n());
    p.dirichlet = pde::total_dirichlet(s.field);
    p.volume = phase_volume(s.phase(), s.n());
    p.total = cfg.gamma * p.perimeter + p.dirichlet + volume_penalty(cfg, p.volume, s.target_volume);
    return p;
}

inline constexpr double kElasticTol = 1e-12;

/// Elastic minimizer for a fixed phase on the n x n unit-square grid.
inline pde::ScalarField solve_elastic(std::size_t n, const std::vector<std::uint8_t>& phase,
                                      const MaterialConfig& cfg, const pde::BoundaryFn& boundary,
                                      double tol = kElasticTol) {
    const auto grid = pde::make_planar_grid(n, n, 0.0, 1.0, 0.0, 1.0);
    return pde::solve_transmission(grid, phase, cfg, boundary, tol);
}

enum class InitKind { VerticalCut, Disk, RandomBlocks, Empty, Full };

/// Initial phase: vertical cut (E on the left) at the target fraction, a
/// centred disk of the target area, random 4x4-cell blocks, or constant.
inline std::vector<std::uint8_t> initial_phase(std::size_t n, double target, InitKind kind, std::uint64_t seed = 0) {
    std::vector<std::uint8_t> phase(n * n, 0);
    const double h = 1.0 / static_cast<double>(n);
    switch (kind) {
        case InitKind::VerticalCut: {
            const auto cols = static_cast<std::size_t>(std::lround(target * static_cast<double>(n)));
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < std::min(cols, n); ++i) phase[j * n + i] = 1;
            break;
        }
        case InitKind::Disk: {
            const double r = std::sqrt(std::max(target, 0.0) / std::numbers::pi);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = (static_cast<double>(i) + 0.5) * h - 0.5;
                    const double y = (static_cast<double>(j) + 0.5) * h - 0.5;
                    phase[j * n + i] = (x * x + y * y < r * r) ? 1 : 0;
                }
            break;
        }
        case InitKind::RandomBlocks: {
            std::mt19937_64 rng(seed);
            std::bernoulli_distribution coin(std::clamp(target, 0.0, 1.0));
            const std::size_t block = 4;
            for (std::size_t bj = 0; bj < n; bj += block)
                for (std::size_t bi = 0; bi < n; bi += block) {
                    const std::uint8_t v = coin(rng) ? 1 : 0;
                    for (std::size_t j = bj; j < std::min(bj + block, n); ++j)
                        for (std::size_t i = bi; i < std::min(bi + block, n); ++i) phase[j * n + i] = v;
                }
            break;
        }
        case InitKind::Empty:
            break;
        case InitKind::Full:
            std::fill(phase.begin(), phase.end(), std::uint8_t{1});
            break;
    }
    return phase;
}

inline InitKind parse_init(const std::string& name) {
    if (name == "vertical-cut") return InitKind::VerticalCut;
    if (name == "disk") return InitKind::Disk;
    if (name == "random-blocks") return InitKind::RandomBlocks;
    if (name == "empty") return InitKind::Empty;
    if (name == "full") return InitKind::Full;
    throw DomainError("unknown initialization '" + name + "'");
}

inline InterfaceState make_state(std::size_t n, std::vector<std::uint8_t> phase, const MaterialConfig& cfg,
                                 pde::BoundaryFn boundary, double target_volume, double tol = kElasticTol) {
    cfg.validate_allow_equal();
    if (n < 2) throw DomainError("make_state: grid must have at least 2 cells per side");
    if (phase.size() != n * n) throw DomainError("make_state: phase size mismatch");
    if (!(target_volume >= 0.0 && target_volume <= 1.0)) throw DomainError("make_state: target volume outside [0, 1]");
    InterfaceState s;
    s.field = solve_elastic(n, phase, cfg, boundary, tol);
    s.boundary = std::move(boundary);
    s.target_volume = target_volume;
    s.parts = total_energy(s, cfg);
    return s;
}

// Alternating minimization ------------------------------------------------

struct Schedule {
    std::size_t max_sweeps = 50;
    std::size_t block = 1;       ///< side of the square cell blocks flipped as one move
    double threshold = 1e-10;    ///< minimal energy decrease for accepting a move
    double tol = kElasticTol;    ///< CG tolerance for every elastic solve
};

struct SweepRecord {
    std::size_t sweep = 0;
    double energy = 0.0;
    double perimeter = 0.0;
    double dirichlet = 0.0;
    double volume = 0.0;
    std::size_t accepted = 0;
};

struct MinimizeResult {
    InterfaceState state;
    std::vector<SweepRecord> trace;  ///< initial state, then every sweep with accepted moves
    std::size_t sweeps = 0;
    std::size_t exact_evaluations = 0;
    std::size_t reverted_sweeps = 0;
    bool budget_exceeded = false;
};

struct MoveEvaluation {
    double lower = 0.0;  ///< rigorous lower bound of the energy change
    double upper = 0.0;  ///< rigorous upper bound of the energy change
    std::optional<double> exact;
};

namespace detail {

struct EdgeDelta {
    bool x_edge = true;
    std::size_t i = 0;
    std::size_t j = 0;
    double dw = 0.0;
};

// Cells of the move starting at (i0, j0) with side `block`.
inline std::vector<std::pair<std::size_t, std::size_t>> move_cells(std::size_t n, std::size_t i0, std::size_t j0,
                                                                   std::size_t block) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t j = j0; j < std::min(j0 + block, n); ++j)
        for (std::size_t i = i0; i < std::min(i0 + block, n); ++i) cells.emplace_back(i, j);
    return cells;
}

// Working data for evaluating moves against a fixed current state.
class MoveEvaluator {
public:
    MoveEvaluator(const InterfaceState& s, const MaterialConfig& cfg, const Schedule& sched)
        : s_(&s), cfg_(&cfg), sched_(&sched), op_(s.field.grid, s.field.sigma), mask_(pde::dirichlet_mask(s.field.grid)) {
        const auto& g = s.field.grid;
        std::vector<double> au;
        op_.apply(s.field.values, au);
        double r1 = 0.0;
        double gmax = 0.0;
        for (std::size_t k = 0; k < g.num_nodes(); ++k) {
            if (mask_[k]) gmax = std::max(gmax, std::abs(s.field.values[k]));
            else r1 += std::abs(au[k]);
        }
        // |sum_free (u_new - u_old) r| <= ||r||_1 * 2 max|g| by the discrete maximum principle.
        margin_ = 4.0 * r1 * gmax * (1.0 + 1e-6) + 1e-13;
    }

    MoveEvaluation evaluate(const std::vector<std::pair<std::size_t, std::size_t>>& cells, bool force_exact,
                            std::vector<double>* u_out = nullptr) {
        const auto& s = *s_;
        const auto& g = s.field.grid;
        const std::size_t n = s.n();
        auto phase = s.field.phase;
        std::vector<EdgeDelta> deltas;
        long a0 = std::numeric_limits<long>::max(), a1 = std::numeric_limits<long>::min();
        long b0 = a0, b1 = a1;
        double dvol_cells = 0.0;
        for (auto [i, j] : cells) {
            const std::size_t c = g.cell(i, j);
            const bool now_e = phase[c] != 0;
            const double ds = cfg_->sigma(!now_e) - cfg_->sigma(now_e);
            phase[c] = now_e ? 0 : 1;
            dvol_cells += now_e ? -1.0 : 1.0;
            deltas.push_back({true, i, j, ds * g.kx[c]});
            deltas.push_back({true, i, j + 1, ds * g.kx[c]});
            deltas.push_back({false, i, j, ds * g.ky[c]});
            deltas.push_back({false, i + 1, j, ds * g.ky[c]});
            a0 = std::min(a0, static_cast<long>(i) - 1);
            a1 = std::max(a1, static_cast<long>(i));
            b0 = std::min(b0, static_cast<long>(j) - 1);
            b1 = std::max(b1, static_cast<long>(j));
        }
        const double dper = local_perimeter(phase, n, a0, a1, b0, b1) - local_perimeter(s.field.phase, n, a0, a1, b0, b1);
        const double vol_new = s.parts.volume + dvol_cells / static_cast<double>(n * n);
        const double rest = cfg_->gamma * dper + volume_penalty(*cfg_, vol_new, s.target_volume) -
                            volume_penalty(*cfg_, s.parts.volume, s.target_volume);

        // Merge duplicate edges (interior edges of a block).
        std::sort(deltas.begin(), deltas.end(), [](const EdgeDelta& p, const EdgeDelta& q) {
            return std::tie(p.x_edge, p.j, p.i) < std::tie(q.x_edge, q.j, q.i);
        });
        double up = 0.0;
        double lo = 0.0;
        for (std::size_t k = 0; k < deltas.size();) {
            double dw = 0.0;
            std::size_t m = k;
            while (m < deltas.size() && deltas[m].x_edge == deltas[k].x_edge && deltas[m].i == deltas[k].i &&
                   deltas[m].j == deltas[k].j) {
                dw += deltas[m].dw;
                ++m;
            }
            const auto& e = deltas[k];
            const double w_old = e.x_edge ? op_.wx(e.i, e.j) : op_.wy(e.i, e.j);
            const double du = e.x_edge ? s.field.at(e.i + 1, e.j) - s.field.at(e.i, e.j)
                                       : s.field.at(e.i, e.j + 1) - s.field.at(e.i, e.j);
            const double w_new = w_old + dw;
            up += dw * du * du;
            const double q = w_old * du;
            lo += q * q * (1.0 / w_old - 1.0 / w_new);
            k = m;
        }
        MoveEvaluation ev;
        ev.upper = rest + up;
        ev.lower = rest + lo - margin_;
        if (!force_exact && ev.lower >= 0.0 && !u_out) return ev;

        auto op = op_;
        for (auto [i, j] : cells) {
            const std::size_t c = g.cell(i, j);
            const bool was_e = s.field.phase[c] != 0;
            op.update_cell(i, j, cfg_->sigma(!was_e) - cfg_->sigma(was_e));
        }
        std::vector<double> u = s.field.values;
        pde::pcg(op, mask_, u, sched_->tol);
        ev.exact = rest + op.energy(u) - s.parts.dirichlet;
        ++exact_count_;
        if (u_out) *u_out = std::move(u);
        return ev;
    }

    [[nodiscard]] std::size_t exact_count() const { return exact_count_; }

private:
    const InterfaceState* s_;
    const MaterialConfig* cfg_;
    const Schedule* sched_;
    pde::TransmissionOperator op_;
    std::vector<std::uint8_t> mask_;
    double margin_ = 0.0;
    std::size_t exact_count_ = 0;
};

inline void apply_move(InterfaceState& s, const MaterialConfig& cfg,
                       const std::vector<std::pair<std::size_t, std::size_t>>& cells, std::vector<double> u) {
    for (auto [i, j] : cells) {
        const std::size_t c = s.field.grid.cell(i, j);
        s.field.phase[c] = s.field.phase[c] ? 0 : 1;
        s.field.sigma[c] = cfg.sigma(s.field.phase[c] != 0);
    }
    s.field.values = std::move(u);
    s.parts = total_energy(s, cfg);
}

}  // namespace detail

/// Energy change of flipping the block of side `block` at (i0, j0), with u re-solved.
inline double move_delta(const InterfaceState& s, const MaterialConfig& cfg, std::size_t i0, std::size_t j0,
                         std::size_t block = 1, double tol = kElasticTol) {
    Schedule sched;
    sched.tol = tol;
    detail::MoveEvaluator ev(s, cfg, sched);
    return *ev.evaluate(detail::move_cells(s.n(), i0, j0, block), true).exact;
}

struct FlipScan {
    double best_delta = std::numeric_limits<double>::infinity();  ///< most negative certified change
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    std::size_t exact_evaluations = 0;
    std::size_t moves = 0;
};

/// Exhaustive scan over every move of the given block size. Moves whose
/// rigorous lower bound is non-negative are certified without a re-solve
/// unless `force_exact` is set.
inline FlipScan flip_scan(const InterfaceState& s, const MaterialConfig& cfg, std::size_t block = 1,
                          bool force_exact = false, double tol = kElasticTol) {
    Schedule sched;
    sched.block = block;
    sched.tol = tol;
    detail::MoveEvaluator ev(s, cfg, sched);
    FlipScan scan;
    const std::size_t n = s.n();
    for (std::size_t j = 0; j < n; j += block) {
        for (std::size_t i = 0; i < n; i += block) {
            const auto e = ev.evaluate(detail::move_cells(n, i, j, block), force_exact);
            ++scan.moves;
            const double d = e.exact ? *e.exact : e.lower;
            if (d < scan.best_delta) {
                scan.best_delta = d;
                scan.best_i = i;
                scan.best_j = j;
            }
        }
    }
    scan.exact_evaluations = ev.exact_count();
    return scan;
}

/// Sweeps over all moves in raster order, accepting any move that lowers
/// the energy by more than the threshold. Each sweep ends with a full
/// re-solve; a sweep whose audited energy does not improve is reverted.
inline MinimizeResult alternate_minimize(InterfaceState init, const MaterialConfig& cfg, const Schedule& sched) {
    if (sched.block == 0) throw DomainError("alternate_minimize: block size must be positive");
    if (!(sched.threshold > 0.0)) throw DomainError("alternate_minimize: threshold must be positive");
    MinimizeResult res;
    res.state = std::move(init);
    auto& s = res.state;
    const std::size_t n = s.n();
    auto record = [&](std::size_t sweep, std::size_t accepted) {
        res.trace.push_back({sweep, s.parts.total, s.parts.perimeter, s.parts.dirichlet, s.parts.volume, accepted});
    };
    record(0, 0);

    for (std::size_t sweep = 1;; ++sweep) {
        if (sweep > sched.max_sweeps) {
            res.budget_exceeded = true;
            break;
        }
        res.sweeps = sweep;
        const InterfaceState start = s;
        std::size_t accepted = 0;
        std::optional<detail::MoveEvaluator> ev;
        ev.emplace(s, cfg, sched);
        for (std::size_t j = 0; j < n; j += sched.block) {
            for (std::size_t i = 0; i < n; i += sched.block) {
                const auto cells = detail::move_cells(n, i, j, sched.block);
                const auto bound = ev->evaluate(cells, false);
                if (bound.lower >= -sched.threshold) continue;
                std::vector<double> u;
                const auto e = ev->evaluate(cells, true, &u);
                ++res.exact_evaluations;
                if (*e.exact < -sched.threshold) {
                    const double before = s.parts.total;
                    detail::apply_move(s, cfg, cells, std::move(u));
                    if (!(s.parts.total < before - sched.threshold)) {
                        throw InvariantError("alternate_minimize: accepted move did not lower the energy");
                    }
                    ++accepted;
                    ev.emplace(s, cfg, sched);
                }
            }
        }
        if (accepted == 0) break;
        // Audit: fresh solve from zero initial data.
        auto audited = make_state(n, s.field.phase, cfg, s.boundary, s.target_volume, sched.tol);
        if (!(audited.parts.total < start.parts.total - sched.threshold)) {
            s = start;
            ++res.reverted_sweeps;
            break;
        }
        s = std::move(audited);
        record(sweep, accepted);
    }
    return res;
}

// Diagnostics -------------------------------------------------------------

namespace detail {

inline void check_disk_in_square(Point x, double r, const char* who) {
    constexpr double slack = 1e-12;
    if (!(r > 0.0) || x.x - r < -slack || x.x + r > 1.0 + slack || x.y - r < -slack || x.y + r > 1.0 + slack) {
        throw DomainError(std::string(who) + ": ball must lie inside the unit square");
    }
}

inline double distance_to_segment(Point p, const Segment& s) {
    const double dx = s.b.x - s.a.x;
    const double dy = s.b.y - s.a.y;
    const double l2 = dx * dx + dy * dy;
    double t = l2 > 0.0 ? ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (s.a.x + t * dx), p.y - (s.a.y + t * dy));
}

}  // namespace detail

/// Perimeter of E inside B_r(x).
inline double perimeter_in_ball(const std::vector<InterfaceSegment>& segs, Point x, double r) {
    double len = 0.0;
    for (const auto& s : segs) len += geometry::segment_length_in_disk(s.seg, x, r);
    return len;
}

/// (1 / 2r) int_{dE cap B_r} |nu_E - nu|^2 minimized over unit nu, i.e. (L - |sum len nu_E|) / r.
inline double excess(const std::vector<InterfaceSegment>& segs, Point x, double r) {
    double len = 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (const auto& s : segs) {
        const double l = geometry::segment_length_in_disk(s.seg, x, r);
        len += l;
        mx += l * s.normal.x;
        my += l * s.normal.y;
    }
    return std::max(0.0, (len - std::hypot(mx, my)) / r);
}

inline double excess(const InterfaceState& s, Point x, double r) {
    detail::check_disk_in_square(x, r, "excess");
    const auto segs = interface_segments(s.phase(), s.n());
    double d = std::numeric_limits<double>::infinity();
    for (const auto& seg : segs) d = std::min(d, detail::distance_to_segment(x, seg.seg));
    if (!(d <= 1e-9)) throw DomainError("excess: the centre is not on the discrete interface");
    return excess(segs, x, r);
}

/// r^{-(n-1)} int_{B_r(x)} |Du|^2 with n = 2.
inline double rescaled_dirichlet(const InterfaceState& s, Point x, double r) {
    detail::check_disk_in_square(x, r, "rescaled_dirichlet");
    return pde::dirichlet_energy(s.field, x, r, false) / r;
}

/// Local energy gamma P(E, B_r) + int_{B_r} sigma |Du|^2.
inline double local_energy(const InterfaceState& s, const std::vector<InterfaceSegment>& segs,
                           const MaterialConfig& cfg, Point x, double r) {
    return cfg.gamma * perimeter_in_ball(segs, x, r) + pde::dirichlet_energy(s.field, x, r, true);
}

struct DensityReport {
    std::vector<double> radii;
    std::size_t samples = 0;
    double min_perimeter_density = std::numeric_limits<double>::infinity();
    double max_energy_density = 0.0;
    double median_energy_density = 0.0;
    double max_excess = 0.0;
};

/// Densities at every segment midpoint x and radius r with B_r(x) inside the square.
inline DensityReport density_report(const InterfaceState& s, const MaterialConfig& cfg,
                                    const std::vector<double>& radii) {
    const auto segs = interface_segments(s.phase(), s.n());
    DensityReport rep;
    rep.radii = radii;
    std::vector<double> energy_densities;
    for (const auto& seg : segs) {
        const Point x = seg.midpoint();
        for (double r : radii) {
            if (x.x - r < 0.0 || x.x + r > 1.0 || x.y - r < 0.0 || x.y + r > 1.0) continue;
            const double per = perimeter_in_ball(segs, x, r) / r;
            const double en = local_energy(s, segs, cfg, x, r) / r;
            rep.min_perimeter_density = std::min(rep.min_perimeter_density, per);
            rep.max_energy_density = std::max(rep.max_energy_density, en);
            rep.max_excess = std::max(rep.max_excess, excess(segs, x, r));
            energy_densities.push_back(en);
        }
    }
    rep.samples = energy_densities.size();
    if (!energy_densities.empty()) {
        auto mid = energy_densities.begin() + static_cast<std::ptrdiff_t>(energy_densities.size() / 2);
        std::nth_element(energy_densities.begin(), mid, energy_densities.end());
        rep.median_energy_density = *mid;
    }
    return rep;
}

// First variation ---------------------------------------------------------

/// Smooth vector field on the unit square with its Jacobian DX[i][j] = d X_i / d x_j.
struct VectorField {
    std::function<Point(Point)> value;
    std::function<std::array<std::array<double, 2>, 2>(Point)> jacobian;
};

/// a * phi(|x - c| / s) with phi(t) = exp(1 - 1 / (1 - t^2)) for t < 1.
inline VectorField bump_field(Point c, double s, Point a) {
    auto profile = [c, s](Point p, double& dphi_dx, double& dphi_dy) {
        const double dx = (p.x - c.x) / s;
        const double dy = (p.y - c.y) / s;
        const double t2 = dx * dx + dy * dy;
        if (t2 >= 1.0) {
            dphi_dx = dphi_dy = 0.0;
            return 0.0;
        }
        const double q = 1.0 - t2;
        const double phi = std::exp(1.0 - 1.0 / q);
        // d phi / d(t2) = -phi / q^2
        const double dphi_dt2 = -phi / (q * q);
        dphi_dx = dphi_dt2 * 2.0 * dx / s;
        dphi_dy = dphi_dt2 * 2.0 * dy / s;
        return phi;
    };
    VectorField f;
    f.value = [profile, a](Point p) {
        double gx = 0.0, gy = 0.0;
        const double phi = profile(p, gx, gy);
        return Point{a.x * phi, a.y * phi};
    };
    f.jacobian = [profile, a](Point p) {
        double gx = 0.0, gy = 0.0;
        profile(p, gx, gy);
        return std::array<std::array<double, 2>, 2>{{{a.x * gx, a.x * gy}, {a.y * gx, a.y * gy}}};
    };
    return f;
}

/// Seeded bump fields with centres in [0.25, 0.75]^2, radii in [0.1, 0.2] and
/// uniformly random directions; all vanish within 0.05 of the boundary.
inline std::vector<VectorField> random_bump_fields(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<VectorField> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double cx = 0.25 + 0.5 * unit(rng);
        const double cy = 0.25 + 0.5 * unit(rng);
        const double radius = 0.1 + 0.1 * unit(rng);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        out.push_back(bump_field({cx, cy}, radius, {std::cos(angle), std::sin(angle)}));
    }
    return out;
}

struct FirstVariationRow {
    double lhs = 0.0;          ///< gamma int div_tau X + int sigma (|Du|^2 div X - 2 <DX Du, Du>)
    double rhs = 0.0;          ///< Lambda int_{dE} |X|
    double normal_flux = 0.0;  ///< int_{dE} <X, nu_E>
    double tolerance = 0.0;
    bool passed = true;
};

struct FirstVariationReport {
    std::vector<FirstVariationRow> rows;
    double tolerance = 0.0;  ///< K h
    double multiplier_low = std::numeric_limits<double>::infinity();
    double multiplier_high = -std::numeric_limits<double>::infinity();
    double multiplier_estimate = 0.0;
    bool passed = true;
};

inline constexpr double kFirstVariationK = 4.0;
inline constexpr std::size_t kSupportMarginCells = 2;

/// Evaluates the weak Euler-Lagrange inequality for each field. Per-field
/// multiplier estimates lhs / normal_flux (over fields with a non-negligible
/// normal flux) give the bracketing interval.
inline FirstVariationReport first_variation_check(const InterfaceState& s, const MaterialConfig& cfg,
                                                  const std::vector<VectorField>& fields,
                                                  double k_tol = kFirstVariationK) {
    const std::size_t n = s.n();
    const double h = s.h();
    const auto& g = s.field.grid;
    const double margin = static_cast<double>(kSupportMarginCells) * h;
    const auto segs = interface_segments(s.phase(), n);
    FirstVariationReport rep;
    rep.tolerance = k_tol * h;
    double flux_scale = 0.0;
    std::vector<double> estimates;

    for (const auto& X : fields) {
        // Support: X must vanish on every node within the boundary margin.
        for (std::size_t j = 0; j < g.n1(); ++j) {
            for (std::size_t i = 0; i < g.n0(); ++i) {
                const double x = g.c0[i];
                const double y = g.c1[j];
                if (std::min({x, y, 1.0 - x, 1.0 - y}) > margin + 1e-14) continue;
                const Point v = X.value({x, y});
                if (v.x != 0.0 || v.y != 0.0) throw SupportError("first_variation_check: field does not vanish near the boundary");
            }
        }
        FirstVariationRow row;
        double surface = 0.0;
        for (const auto& seg : segs) {
            const double len = seg.seg.length();
            if (len <= 0.0) continue;
            const Point tau{(seg.seg.b.x - seg.seg.a.x) / len, (seg.seg.b.y - seg.seg.a.y) / len};
            const Point xa = X.value(seg.seg.a);
            const Point xb = X.value(seg.seg.b);
            surface += (xb.x - xa.x) * tau.x + (xb.y - xa.y) * tau.y;
            // Two-point Gauss quadrature along the segment.
            for (double t : {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)}) {
                const Point p{seg.seg.a.x + t * (seg.seg.b.x - seg.seg.a.x), seg.seg.a.y + t * (seg.seg.b.y - seg.seg.a.y)};
                const Point v = X.value(p);
                row.rhs += 0.5 * len * std::hypot(v.x, v.y);
                row.normal_flux += 0.5 * len * (v.x * seg.normal.x + v.y * seg.normal.y);
            }
        }
        double bulk = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                const Point p{(static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h};
                const auto dx = X.jacobian(p);
                const double divx = dx[0][0] + dx[1][1];
                if (divx == 0.0 && dx[0][1] == 0.0 && dx[1][0] == 0.0) continue;
                const double ux = 0.5 * ((s.field.at(i + 1, j) - s.field.at(i, j)) + (s.field.at(i + 1, j + 1) - s.field.at(i, j + 1))) / h;
                const double uy = 0.5 * ((s.field.at(i, j + 1) - s.field.at(i, j)) + (s.field.at(i + 1, j + 1) - s.field.at(i + 1, j))) / h;
                const double q = ux * (dx[0][0] * ux + dx[0][1] * uy) + uy * (dx[1][0] * ux + dx[1][1] * uy);
                const double sigma = s.field.sigma[g.cell(i, j)];
                bulk += sigma * ((ux * ux + uy * uy) * divx - 2.0 * q) * h * h;
            }
        }
        row.lhs = cfg.gamma * surface + bulk;
        row.rhs *= cfg.lambda_pen;
        row.tolerance = rep.tolerance;
        row.passed = row.lhs <= row.rhs + row.tolerance;
        rep.passed = rep.passed && row.passed;
        flux_scale = std::max(flux_scale, std::abs(row.normal_flux));
        rep.rows.push_back(row);
    }
    for (const auto& row : rep.rows) {
        if (std::abs(row.normal_flux) > 0.1 * flux_scale && flux_scale > 0.0) {
            const double lam = row.lhs / row.normal_flux;
            estimates.push_back(lam);
            rep.multiplier_low = std::min(rep.multiplier_low, lam);
            rep.multiplier_high = std::max(rep.multiplier_high, lam);
        }
    }
    if (!estimates.empty()) {
        auto mid = estimates.begin() + static_cast<std::ptrdiff_t>(estimates.size() / 2);
        std::nth_element(estimates.begin(), mid, estimates.end());
        rep.multiplier_estimate = *mid;
    } else {
        rep.multiplier_low = rep.multiplier_high = 0.0;
    }
    return rep;
}

}  // namespace tcone::minimizer
