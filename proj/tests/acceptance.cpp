// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
//
// Exit status is 0 only when every criterion passes. With --report-only the
// lines are printed the same way but the status only reflects crashes; ctest
// uses that mode so the unit suite stays green while a failing criterion is
// still visible in the log.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tcone/cones.hpp"
#include "tcone/constants.hpp"
#include "tcone/minimizer.hpp"
#include "tcone/pde.hpp"

using namespace tcone;

namespace {

// Pinned tolerances.
constexpr double kLambda1Lo = 17.54;
constexpr double kLambda1Hi = 17.64;
constexpr double kThresholdSeconds = 10.0;
constexpr double kConstantsSeconds = 1.0;
constexpr double kGehringRelTol = 1e-15;
constexpr double kExactMaxErr = 1e-10;
constexpr double kExactFlux = 1e-10;
constexpr double kExactSolveTol = 1e-13;
constexpr double kMonotonicitySeconds = 60.0;
constexpr double kExponentTarget = 2.0;
constexpr double kExponentTol = 0.05;
constexpr double kFluxOrderMin = 1.0;
constexpr double kDecayFactor = 4.0;
constexpr double kMinimizerSeconds = 300.0;
constexpr double kVolumeCells = 1.0;
constexpr double kOracleEnergyTol = 1e-12;
constexpr double kPerimeterDensityMin = 0.5;
constexpr double kEnergyDensityFactor = 10.0;
constexpr double kWidthFactor = 4.0;

struct Line {
    int id;
    bool passed;
    std::string detail;
};

std::vector<Line> g_lines;

void report(int id, bool passed, const std::string& detail) {
    g_lines.push_back({id, passed, detail});
    std::printf("criterion %d: %s  %s\n", id, passed ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_threshold() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto bp = cones::critical_threshold();
    const auto r10 = cones::critical_angles(10.0);
    const auto r30 = cones::critical_angles(30.0);
    const double t = seconds_since(t0);
    bool in_range = r30.size() == 2;
    for (double th : r30) in_range = in_range && th > 0.0 && th < 0.5 * std::numbers::pi;
    const bool ok = bp.lambda1 >= kLambda1Lo && bp.lambda1 <= kLambda1Hi && r10.empty() && in_range &&
                    t < kThresholdSeconds;
    report(1, ok, fmt("lambda1=%.10f roots(10)=%zu roots(30)=%zu [%.10f, %.10f] t=%.2fs", bp.lambda1, r10.size(),
                      r30.size(), r30.empty() ? 0.0 : r30.front(), r30.empty() ? 0.0 : r30.back(), t));
}

void criterion_constants() {
    const auto t0 = std::chrono::steady_clock::now();
    const bool l0 = constants::lambda0(3) == constants::Rational(31, 23);
    const auto ledger = constants::build_ledger(3, 30.0, 1.0);
    const bool th = ledger.theta_i == constants::Rational(1, 24);
    // C1 from the printed formula C_S^2 2^10 80^n ratio at ratio 2.
    const double c1 = 2048.0 * 512000.0;
    const double p_closed = (2.0 * c1 - 0.6) / (2.0 * c1 - 1.0);
    const double p = constants::gehring_exponent(3, 2.0, 1.0).p;
    const double rel = std::abs(p - p_closed) / p_closed;
    // Literal reading with an extra factor 2, shown for reference only.
    const double c1_lit = 2.0 * c1;
    const double rel_lit = std::abs(p - (2.0 * c1_lit - 0.6) / (2.0 * c1_lit - 1.0));
    const double t = seconds_since(t0);
    const bool ok = l0 && th && rel <= kGehringRelTol && t < kConstantsSeconds;
    report(2, ok, fmt("lambda0(3)=%s theta_i(3)=%s p=%.17g rel=%.2e (doubled C1 reading: %.2e) t=%.3fs",
                      constants::to_string(constants::lambda0(3)).c_str(), constants::to_string(ledger.theta_i).c_str(),
                      p, rel, rel_lit, t));
}

void criterion_exactness() {
    MaterialConfig cfg;
    cfg.n = 2;
    cfg.alpha = 1.0;
    cfg.beta = 30.0;
    const auto grid = pde::make_halfspace_grid(128);
    const auto exact = pde::halfspace_exact(cfg);
    const auto f = pde::solve_transmission(grid, cfg, exact, kExactSolveTol);
    const auto err = pde::field_error(f, exact);
    const double jump = pde::flux_jump(f);
    report(3, err.max_abs <= kExactMaxErr && std::abs(jump) <= kExactFlux,
           fmt("128^2 max_err=%.3e flux_jump=%.3e cg_iters=%zu", err.max_abs, jump, f.stats.iterations));
}

void criterion_monotonicity() {
    const auto t0 = std::chrono::steady_clock::now();
    MaterialConfig cfg;
    cfg.n = 2;
    cfg.alpha = 1.0;
    cfg.beta = 30.0;
    const auto grid = pde::make_halfspace_grid(128);
    const auto radii = pde::geometric_radii(0.06, 0.9, 8);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    bool ok = true;
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
        pde::Cubic c;
        for (auto& v : c.c) v = coef(rng);
        const auto f = pde::solve_transmission(grid, cfg, c, 1e-12);
        const auto rep = pde::check_monotonicity(f, {0.0, 0.0}, radii);
        ok = ok && rep.passed;
        worst = std::max(worst, rep.max_drop / rep.tolerance);
    }
    const double t = seconds_since(t0);
    report(4, ok && t < kMonotonicitySeconds, fmt("5 cubic data sets, worst drop/tolerance=%.3e t=%.2fs", worst, t));
}

void criterion_cone_scaling() {
    const double ratio = 30.0;
    const double theta0 = cones::critical_angles(ratio).back();
    const auto sol = cones::cone_exact_solution(theta0, ratio);
    const pde::BoundaryFn exact = [sol](double rho, double th) { return sol.value(rho, th); };
    MaterialConfig cfg;
    cfg.n = 3;
    cfg.alpha = 1.0;
    cfg.beta = ratio;
    const auto radii = pde::geometric_radii(0.1, 0.8, 8);
    const auto g128 = pde::make_cone_grid(128, 128, 1.0, theta0, pde::CapCondition::Dirichlet);
    const auto sampled = pde::sample_field(g128, cfg, exact);
    const auto fit = pde::decay_fit(sampled, {0.0, 0.0}, radii);
    const auto lb = pde::cone_energy_lowerbound_check(sampled, radii);

    std::vector<double> log_h;
    std::vector<double> log_j;
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {32, 64, 128}) {
        const auto g = pde::make_cone_grid(n, n, 1.0, theta0, pde::CapCondition::Dirichlet);
        const auto f = pde::solve_transmission(g, cfg, exact, 1e-12);
        const double j = std::abs(pde::flux_jump(f));
        decreasing = decreasing && j < prev;
        prev = j;
        log_h.push_back(std::log(1.0 / static_cast<double>(n)));
        log_j.push_back(std::log(j));
    }
    const double order = pde::detail::fit_line(log_h, log_j).slope;
    const bool ok = std::abs(fit.fitted_exponent - kExponentTarget) <= kExponentTol && lb.c0 > 0.0 && lb.passed &&
                    decreasing && order >= kFluxOrderMin;
    report(5, ok, fmt("theta0=%.10f exponent=%.4f c0=%.4e flux jumps %.3e/%.3e/%.3e order=%.2f", theta0,
                      fit.fitted_exponent, lb.c0, std::exp(log_j[0]), std::exp(log_j[1]), std::exp(log_j[2]), order));
}

void criterion_decay() {
    MaterialConfig cfg;
    cfg.n = 2;
    cfg.alpha = 1.0;
    cfg.beta = 30.0;
    MaterialConfig flat = cfg;
    flat.beta = cfg.alpha;
    const auto grid = pde::make_halfspace_grid(128);
    const double rho = 0.8;
    bool ok = true;
    double worst = 0.0;
    for (auto preset : {pde::BoundaryPreset::LinearX, pde::BoundaryPreset::Quadratic, pde::BoundaryPreset::TwoPole}) {
        const auto data = pde::on_unit_square(pde::preset(preset), -1.0, 1.0, -1.0, 1.0);
        const auto f = pde::solve_transmission(grid, cfg, data, 1e-12);
        const auto b = pde::solve_transmission(grid, flat, data, 1e-12);
        const double ef = pde::dirichlet_energy(f, {0.0, 0.0}, rho, false);
        const double eb = pde::dirichlet_energy(b, {0.0, 0.0}, rho, false);
        for (double tau : {0.5, 0.25}) {
            const double ratio = pde::dirichlet_energy(f, {0.0, 0.0}, tau * rho, false) / ef;
            // C0: the constant-coefficient ratio in units of tau^2.
            const double c0 = pde::dirichlet_energy(b, {0.0, 0.0}, tau * rho, false) / eb / (tau * tau);
            const double bound = kDecayFactor * c0 * tau * tau;
            ok = ok && ratio <= bound;
            worst = std::max(worst, ratio / bound);
        }
    }
    report(6, ok, fmt("3 presets x tau in {1/2, 1/4}, worst ratio/bound=%.4f", worst));
}

struct Reference {
    MaterialConfig cfg;
    minimizer::MinimizeResult res;
    double seconds = 0.0;
};

Reference reference_run() {
    Reference r;
    r.cfg.n = 2;
    r.cfg.alpha = 1.0;
    r.cfg.beta = 5.0;
    r.cfg.gamma = 0.1;
    r.cfg.lambda_pen = 10.0;
    const auto t0 = std::chrono::steady_clock::now();
    auto init = minimizer::make_state(64, minimizer::initial_phase(64, 0.5, minimizer::InitKind::VerticalCut), r.cfg,
                                      pde::preset(pde::BoundaryPreset::LinearX), 0.5);
    r.res = minimizer::alternate_minimize(std::move(init), r.cfg, {});
    r.seconds = seconds_since(t0);
    return r;
}

// Exhaustive enumeration of the 2^4 block configurations of a 6x6 grid.
// Ties (mirror-image minimizers) are all kept.
struct BlockOracle {
    double best_energy = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::uint8_t>> best_phases;
};

std::vector<std::uint8_t> block_phase(unsigned mask) {
    std::vector<std::uint8_t> ph(36, 0);
    for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t i = 0; i < 6; ++i) ph[j * 6 + i] = (mask >> ((j / 3) * 2 + i / 3)) & 1u;
    return ph;
}

BlockOracle block_oracle(const MaterialConfig& cfg, const pde::BoundaryFn& g) {
    std::vector<std::pair<double, std::vector<std::uint8_t>>> all;
    BlockOracle o;
    for (unsigned mask = 0; mask < 16; ++mask) {
        const auto s = minimizer::make_state(6, block_phase(mask), cfg, g, 0.5);
        all.emplace_back(s.parts.total, s.phase());
        o.best_energy = std::min(o.best_energy, s.parts.total);
    }
    for (auto& [e, ph] : all)
        if (e <= o.best_energy + kOracleEnergyTol) o.best_phases.push_back(ph);
    return o;
}

// Runs the block-restricted minimizer from all-complement and all-E.
std::string oracle_mode(const MaterialConfig& cfg, bool& matched) {
    const auto g = pde::preset(pde::BoundaryPreset::LinearX);
    const auto oracle = block_oracle(cfg, g);
    minimizer::Schedule sched;
    sched.block = 3;
    std::string out = fmt("Lambda=%g min=%.6f reached", cfg.lambda_pen, oracle.best_energy);
    for (unsigned start : {0u, 15u}) {
        const auto r =
            minimizer::alternate_minimize(minimizer::make_state(6, block_phase(start), cfg, g, 0.5), cfg, sched);
        const bool hit = std::abs(r.state.parts.total - oracle.best_energy) <= kOracleEnergyTol &&
                         std::find(oracle.best_phases.begin(), oracle.best_phases.end(), r.state.phase()) !=
                             oracle.best_phases.end();
        matched = matched && hit;
        out += fmt(" %.6f", r.state.parts.total);
    }
    return out;
}

void criterion_minimizer(const Reference& ref) {
    const auto& res = ref.res;
    bool strict = res.trace.size() >= 2;
    for (std::size_t k = 1; k < res.trace.size(); ++k) strict = strict && res.trace[k].energy < res.trace[k - 1].energy;
    const auto scan = minimizer::flip_scan(res.state, ref.cfg);
    const bool stable = scan.best_delta >= -minimizer::Schedule{}.threshold;
    const double h = res.state.h();
    const double cells = (res.state.parts.volume - res.state.target_volume) / (h * h);
    const bool volume_ok = std::abs(cells) <= kVolumeCells;

    // Block oracle in both modes: without and with the volume penalty.
    bool oracle_ok = true;
    MaterialConfig unpenalized = ref.cfg;
    unpenalized.lambda_pen = 0.0;
    const std::string oracle_p = oracle_mode(unpenalized, oracle_ok);
    const std::string oracle_pc = oracle_mode(ref.cfg, oracle_ok);
    const bool ok = strict && stable && volume_ok && oracle_ok && ref.seconds < kMinimizerSeconds;
    report(7, ok,
           fmt("strict=%s (%zu records, E=%.10f) stable=%s (best flip %+.3e) volume_error=%+.1f cells%s oracle=%s "
               "[%s; %s] t=%.1fs",
               strict ? "yes" : "no", res.trace.size(), res.state.parts.total, stable ? "yes" : "no", scan.best_delta,
               cells, volume_ok ? "" : " [exceeds 1 cell]", oracle_ok ? "matched" : "mismatch", oracle_p.c_str(), oracle_pc.c_str(), ref.seconds));
}

void criterion_density(const Reference& ref) {
    const double h = ref.res.state.h();
    const auto rep = minimizer::density_report(ref.res.state, ref.cfg, pde::geometric_radii(4.0 * h, 0.2, 5));
    const bool ok = rep.samples > 0 && rep.min_perimeter_density >= kPerimeterDensityMin &&
                    rep.max_energy_density <= kEnergyDensityFactor * rep.median_energy_density;
    report(8, ok, fmt("samples=%zu min P/r=%.4f max F/r=%.4f median F/r=%.4f", rep.samples, rep.min_perimeter_density,
                      rep.max_energy_density, rep.median_energy_density));
}

void criterion_first_variation(const Reference& ref) {
    const auto bumps = minimizer::first_variation_check(ref.res.state, ref.cfg, minimizer::random_bump_fields(5, 2024));

    // Flat interface {y < 1/2} with its exact transmission solution.
    const std::size_t n = 64;
    const double h = 1.0 / static_cast<double>(n);
    std::vector<std::uint8_t> ph(n * n, 0);
    for (std::size_t j = 0; j < n / 2; ++j)
        for (std::size_t i = 0; i < n; ++i) ph[j * n + i] = 1;
    const auto flat = minimizer::make_state(n, ph, ref.cfg, pde::halfspace_exact(ref.cfg, 0.5), 0.5);
    std::vector<minimizer::VectorField> normals;
    for (double cx : {0.3, 0.5, 0.7})
        for (double sgn : {1.0, -1.0}) normals.push_back(minimizer::bump_field({cx, 0.5}, 0.15, {0.0, sgn}));
    const auto fv = minimizer::first_variation_check(flat, ref.cfg, normals);
    const double width = fv.multiplier_high - fv.multiplier_low;
    const bool bracket = fv.multiplier_low <= fv.multiplier_estimate && fv.multiplier_estimate <= fv.multiplier_high &&
                         width <= kWidthFactor * h;
    // Analytic multiplier of the flat configuration: jump of sigma (d_nu u)^2 / sigma^2.
    const double analytic = 1.0 / ref.cfg.alpha - 1.0 / ref.cfg.beta;
    const bool near = std::abs(fv.multiplier_estimate - analytic) <= kWidthFactor * h;
    report(9, bumps.passed && bracket && near,
           fmt("bumps %s (tol %.4f); flat bracket [%.5f, %.5f] width=%.2e (4h=%.4f) estimate=%.5f analytic=%.5f",
               bumps.passed ? "pass" : "fail", bumps.tolerance, fv.multiplier_low, fv.multiplier_high, width,
               kWidthFactor * h, fv.multiplier_estimate, analytic));
}

}  // namespace

int main(int argc, char** argv) {
    const bool report_only = argc > 1 && std::strcmp(argv[1], "--report-only") == 0;
    try {
        criterion_threshold();
        criterion_constants();
        criterion_exactness();
        criterion_monotonicity();
        criterion_cone_scaling();
        criterion_decay();
        const auto ref = reference_run();
        criterion_minimizer(ref);
        criterion_density(ref);
        criterion_first_variation(ref);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 1;
    }
    const auto failed = std::count_if(g_lines.begin(), g_lines.end(), [](const Line& l) { return !l.passed; });
    std::printf("%zu/%zu criteria passed\n", g_lines.size() - static_cast<std::size_t>(failed), g_lines.size());
    if (report_only) return 0;
    return failed == 0 ? 0 : 1;
}
