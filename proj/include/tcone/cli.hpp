#pragma once

// Command-line front end. Every subcommand computes a JSON summary plus a
// set of artifacts; nothing is written until the computation has finished,
// so validation failures leave the output directory untouched.
//
// Exit codes: 0 success, 2 validation error, 1 internal error.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "tcone/cones.hpp"
#include "tcone/constants.hpp"
#include "tcone/errors.hpp"
#include "tcone/io.hpp"
#include "tcone/minimizer.hpp"
#include "tcone/pde.hpp"

namespace tcone::cli {

inline constexpr const char* kToolVersion = "tcone 1.0.0";

using io::json;

struct Outcome {
    json summary;
    std::string csv;  ///< table used for --format csv; flattened summary when empty
    std::vector<std::pair<std::string, std::string>> artifacts;
    std::string extra_hash_input;
};

namespace detail {

inline json log_value(const constants::LogValue& v) { return json{{"value", v.value}, {"log10", v.log10}}; }

inline void flatten(const json& j, const std::string& prefix, io::Csv& csv) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, csv);
    } else if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", csv);
    } else if (j.is_number_float()) {
        csv.row_strings({prefix, io::fmt(j.get<double>())});
    } else if (j.is_string()) {
        csv.row_strings({prefix, j.get<std::string>()});
    } else {
        csv.row_strings({prefix, j.dump()});
    }
}

inline std::string flatten_csv(const json& j) {
    io::Csv csv({"key", "value"});
    flatten(j, "", csv);
    return csv.str();
}

inline bool is_validation_error(const std::exception& e) {
    return dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
           dynamic_cast<const ToleranceError*>(&e) || dynamic_cast<const NotCriticalError*>(&e) ||
           dynamic_cast<const SignError*>(&e) || dynamic_cast<const SupportError*>(&e) ||
           dynamic_cast<const SingularityError*>(&e) || dynamic_cast<const DegenerateError*>(&e);
}

}  // namespace detail

// Problem setup shared by solve / decay / reverse-holder ---------------------

struct ProblemOptions {
    std::string shape = "halfspace";
    std::size_t resolution = 128;
    double alpha = 1.0;
    double ratio = 30.0;
    std::string boundary = "exact";
    std::string root = "larger";
    std::string cap = "natural";
    std::uint64_t seed = 1;
    double tol = pde::kDefaultSolveTol;
};

struct Problem {
    pde::AxisymGrid grid;
    MaterialConfig cfg;
    pde::BoundaryFn boundary;
    std::optional<pde::BoundaryFn> exact;
    double theta0 = 0.0;
};

inline pde::Cubic random_cubic(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    pde::Cubic c;
    for (auto& v : c.c) v = coef(rng);
    return c;
}

inline double pick_root(double ratio, const std::string& which) {
    const auto roots = cones::critical_angles(ratio);
    if (roots.empty()) throw DomainError("no critical cone angle exists for this ratio");
    if (which == "larger") return roots.back();
    if (which == "smaller") return roots.front();
    throw DomainError("--root must be 'larger' or 'smaller'");
}

inline Problem build_problem(const ProblemOptions& o) {
    Problem p;
    p.cfg.alpha = o.alpha;
    p.cfg.beta = o.alpha * o.ratio;
    if (!(o.alpha > 0.0) || !(o.ratio >= 1.0)) throw DomainError("need alpha > 0 and ratio >= 1");
    if (o.shape == "halfspace") {
        p.cfg.n = 2;
        p.grid = pde::make_halfspace_grid(o.resolution);
        const double r = p.grid.radius;
        if (o.boundary == "exact") {
            p.boundary = pde::halfspace_exact(p.cfg);
            p.exact = p.boundary;
        } else if (o.boundary == "cubic") {
            p.boundary = random_cubic(o.seed);
        } else {
            p.boundary = pde::on_unit_square(pde::preset(pde::parse_preset(o.boundary)), -r, r, -r, r);
        }
        return p;
    }
    if (o.shape == "cone") {
        p.cfg.n = 3;
        if (!(o.ratio > 1.0)) throw DomainError("cone runs need ratio > 1");
        p.theta0 = pick_root(o.ratio, o.root);
        pde::CapCondition cap;
        if (o.cap == "natural") cap = pde::CapCondition::Natural;
        else if (o.cap == "dirichlet") cap = pde::CapCondition::Dirichlet;
        else throw DomainError("--cap must be 'natural' or 'dirichlet'");
        p.grid = pde::make_cone_grid(o.resolution, o.resolution, 1.0, p.theta0, cap);
        const auto sol = cones::cone_exact_solution(p.theta0, o.ratio);
        pde::BoundaryFn ex = [sol](double rho, double th) { return sol.value(rho, th); };
        if (o.boundary == "exact") {
            p.boundary = ex;
            p.exact = ex;
        } else if (o.boundary == "perturbed") {
            const double scale = 0.1 * std::max(std::abs(sol.f_inside_coeff), std::abs(sol.f_outside_coeff));
            p.boundary = [ex, scale](double rho, double th) { return ex(rho, th) + scale * rho * std::cos(th); };
        } else {
            throw DomainError("cone boundary must be 'exact' or 'perturbed'");
        }
        return p;
    }
    throw DomainError("--shape must be 'halfspace' or 'cone'");
}

inline void add_problem_options(CLI::App* sub, ProblemOptions& o) {
    sub->add_option("--shape", o.shape, "halfspace or cone")->capture_default_str();
    sub->add_option("--resolution", o.resolution, "cells per direction")->capture_default_str();
    sub->add_option("--alpha", o.alpha, "coefficient outside E")->capture_default_str();
    sub->add_option("--ratio", o.ratio, "beta / alpha")->capture_default_str();
    sub->add_option("--boundary", o.boundary,
                    "halfspace: exact|cubic|linear-x|quadratic|two-pole; cone: exact|perturbed")
        ->capture_default_str();
    sub->add_option("--root", o.root, "cone angle: larger or smaller root")->capture_default_str();
    sub->add_option("--cap", o.cap, "vertex cap condition: natural or dirichlet")->capture_default_str();
    sub->add_option("--seed", o.seed, "seed for random boundary data")->capture_default_str();
    sub->add_option("--tol", o.tol, "relative CG residual")->capture_default_str();
}

inline json problem_json(const Problem& p) {
    json j;
    j["shape"] = p.grid.shape == pde::GridShape::Planar ? "halfspace" : "cone";
    j["n_eff"] = p.grid.n_eff;
    j["alpha"] = p.cfg.alpha;
    j["beta"] = p.cfg.beta;
    if (p.grid.shape == pde::GridShape::ConeAxisym) j["theta0"] = p.theta0;
    return j;
}

// Subcommands -------------------------------------------------------------

inline json ledger_json(const constants::ConstantsLedger& l, double tau) {
    json j;
    j["n"] = l.n;
    j["ratio"] = l.ratio;
    j["c_s"] = l.c_s;
    j["sobolev_m"] = constants::to_string(l.m);
    j["caccioppoli"] = l.c_cacc;
    j["gehring_c1"] = l.c1_gehring;
    j["p"] = l.p;
    j["p_minus_one"] = l.p_minus_one;
    j["gehring_constant"] = detail::log_value(l.c_gehring);
    j["theta_i"] = constants::to_string(l.theta_i);
    j["theta_i_value"] = constants::to_double(l.theta_i);
    j["theta_iii"] = l.theta_iii;
    j["chi"] = detail::log_value(l.chi);
    j["delta1"] = detail::log_value(l.delta1.delta1);
    j["delta1_underflow"] = l.delta1.underflow;
    j["lambda0"] = constants::to_string(l.lambda0);
    j["lambda0_value"] = constants::to_double(l.lambda0);
    j["delta0"] = detail::log_value(l.window.delta0);
    j["theta_small"] = detail::log_value(l.window.theta_small);
    j["flat_margin"] = detail::log_value(l.window.flat_margin);
    j["omega_n"] = l.omega_n;
    j["eps0"] = json{{"tau", tau}, {"value", l.eps0(tau).value}, {"log10", l.eps0(tau).log10}};
    return j;
}

inline Outcome cmd_constants(int n, double ratio, double c_s, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("--tau must lie in (0, 1)");
    const auto l = constants::build_ledger(n, ratio, c_s);
    Outcome out;
    out.summary = ledger_json(l, tau);
    return out;
}

inline Outcome cmd_cone_angles(double ratio, double tol) {
    const auto roots = cones::critical_angles(ratio, tol);
    Outcome out;
    io::Csv csv({"index", "theta", "degrees", "residual"});
    json arr = json::array();
    for (std::size_t k = 0; k < roots.size(); ++k) {
        const double res = cones::transmission_residual(roots[k], ratio);
        arr.push_back({{"theta", roots[k]}, {"degrees", roots[k] * 180.0 / std::numbers::pi}, {"residual", res}});
        csv.row({static_cast<double>(k), roots[k], roots[k] * 180.0 / std::numbers::pi, res});
    }
    out.summary = {{"ratio", ratio}, {"count", roots.size()}, {"roots", arr}};
    out.csv = csv.str();
    return out;
}

inline Outcome cmd_threshold(double tol, double ratio_min, double ratio_max, std::size_t samples) {
    if (!(ratio_min > 1.0) || !(ratio_max > ratio_min) || samples < 2) {
        throw DomainError("bifurcation sweep needs 1 < ratio-min < ratio-max and at least 2 samples");
    }
    const auto bp = cones::critical_threshold(tol);
    const auto nb = cones::critical_threshold_newton();
    std::vector<double> ratios(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        ratios[k] = ratio_min + (ratio_max - ratio_min) * static_cast<double>(k) / static_cast<double>(samples - 1);
    }
    const auto rows = cones::bifurcation_diagram(ratios);
    io::Csv bif({"ratio", "count", "theta_small", "theta_large"});
    for (const auto& r : rows) {
        bif.row_strings({io::fmt(r.ratio), std::to_string(r.roots.size()),
                         r.roots.empty() ? "" : io::fmt(r.roots.front()),
                         r.roots.empty() ? "" : io::fmt(r.roots.back())});
    }
    Outcome out;
    out.summary = {{"lambda1", bp.lambda1},
                   {"theta_star", bp.theta_star},
                   {"bisection_tol", tol},
                   {"lambda1_newton", nb.lambda1},
                   {"theta_star_newton", nb.theta_star},
                   {"bifurcation_samples", samples}};
    out.artifacts.emplace_back("bifurcation.csv", bif.str());
    return out;
}

inline Outcome cmd_cone_gamma(double ratio, double alpha, const std::string& root, std::optional<double> theta,
                              double amplitude) {
    MaterialConfig cfg;
    cfg.n = 3;
    cfg.alpha = alpha;
    cfg.beta = alpha * ratio;
    const double th = theta ? *theta : pick_root(ratio, root);
    const double g = cones::cone_criticality_gamma(th, cfg, amplitude);
    Outcome out;
    out.summary = {{"ratio", ratio}, {"alpha", alpha}, {"beta", cfg.beta}, {"theta0", th},
                   {"amplitude", amplitude}, {"gamma", g}};
    return out;
}

inline json solve_summary(const Problem& p, const pde::ScalarField& f) {
    json j = problem_json(p);
    j["resolution"] = p.grid.cells0();
    j["cg_iterations"] = f.stats.iterations;
    j["cg_rel_residual"] = f.stats.rel_residual;
    j["galerkin_residual"] = pde::galerkin_residual(f);
    j["dirichlet_energy"] = pde::total_dirichlet(f);
    j["flux_jump"] = pde::flux_jump(f);
    if (p.exact) {
        const auto e = pde::field_error(f, *p.exact);
        j["max_error"] = e.max_abs;
        j["l2_error"] = e.l2;
    }
    return j;
}

inline Outcome cmd_solve(const ProblemOptions& o) {
    const auto p = build_problem(o);
    const auto f = pde::solve_transmission(p.grid, p.cfg, p.boundary, o.tol);
    Outcome out;
    out.summary = solve_summary(p, f);
    out.artifacts.emplace_back("field.bin", io::field_binary(f));
    out.artifacts.emplace_back("field.json", io::field_metadata(f, "field.bin").dump(2) + "\n");
    return out;
}

inline Outcome cmd_decay(const ProblemOptions& o, double r_min, double r_max, std::size_t count) {
    const auto p = build_problem(o);
    const auto f = pde::solve_transmission(p.grid, p.cfg, p.boundary, o.tol);
    const auto radii = pde::geometric_radii(r_min, r_max, count);
    const auto fit = pde::decay_fit(f, {0.0, 0.0}, radii);
    io::Csv csv({"rho", "energy", "weighted_energy"});
    for (std::size_t k = 0; k < radii.size(); ++k) csv.row({radii[k], fit.energies[k], fit.weighted_energies[k]});
    Outcome out;
    out.summary = problem_json(p);
    out.summary["fitted_exponent"] = fit.fitted_exponent;
    out.summary["fit_residual"] = fit.fit_residual;
    if (p.grid.shape == pde::GridShape::ConeAxisym && p.cfg.alpha != p.cfg.beta) {
        const auto lb = pde::cone_energy_lowerbound_check(f, radii);
        out.summary["inside_exponent"] = lb.fitted_exponent;
        out.summary["inside_c0"] = lb.c0;
        out.summary["inside_lower_bound_passed"] = lb.passed;
    }
    out.csv = csv.str();
    out.artifacts.emplace_back("decay.csv", csv.str());
    return out;
}

inline Outcome cmd_monotonicity(std::size_t resolution, double alpha, double ratio, std::uint64_t seed,
                                std::size_t samples, double r_min, double r_max, std::size_t count, double tol) {
    if (samples == 0) throw DomainError("--samples must be positive");
    MaterialConfig cfg;
    cfg.n = 2;
    cfg.alpha = alpha;
    cfg.beta = alpha * ratio;
    const auto grid = pde::make_halfspace_grid(resolution);
    const auto radii = pde::geometric_radii(r_min, r_max, count);
    io::Csv csv({"sample", "rho", "average"});
    json rows = json::array();
    bool all = true;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto data = random_cubic(seed + s);
        const auto f = pde::solve_transmission(grid, cfg, data, tol);
        const auto rep = pde::check_monotonicity(f, {0.0, 0.0}, radii);
        for (std::size_t k = 0; k < radii.size(); ++k) csv.row({static_cast<double>(s), radii[k], rep.averages[k]});
        rows.push_back({{"seed", seed + s}, {"max_drop", rep.max_drop}, {"tolerance", rep.tolerance},
                        {"passed", rep.passed}, {"averages", rep.averages}});
        all = all && rep.passed;
    }
    Outcome out;
    out.summary = {{"resolution", resolution}, {"alpha", alpha}, {"beta", cfg.beta}, {"radii", radii},
                   {"samples", rows}, {"passed", all}};
    out.csv = csv.str();
    return out;
}

inline std::vector<pde::BallSpec> default_balls(const pde::AxisymGrid& g) {
    if (g.shape == pde::GridShape::Planar) {
        return {{{0.0, 0.0}, 0.1}, {{0.0, 0.0}, 0.3}, {{0.2, 0.1}, 0.2}, {{-0.3, -0.2}, 0.25}, {{0.1, 0.4}, 0.15}};
    }
    return {{{0.0, 0.0}, 0.1}, {{0.0, 0.0}, 0.4}, {{0.0, 0.4}, 0.2}, {{0.0, -0.4}, 0.2}, {{0.0, 0.25}, 0.3}};
}

inline Outcome cmd_reverse_holder(const ProblemOptions& o, double c_s) {
    const auto p = build_problem(o);
    const auto f = pde::solve_transmission(p.grid, p.cfg, p.boundary, o.tol);
    if (!(p.cfg.beta > p.cfg.alpha)) throw DomainError("reverse-holder needs ratio > 1");
    const auto ledger = constants::build_ledger(p.grid.n_eff, p.cfg.ratio(), c_s);
    const auto rep = pde::reverse_holder_check(f, ledger, default_balls(p.grid));
    io::Csv csv({"center_x", "center_y", "r", "lhs", "rhs_base", "empirical_constant", "ratio_log10"});
    json rows = json::array();
    for (const auto& r : rep.rows) {
        csv.row({r.ball.center.x, r.ball.center.y, r.ball.r, r.lhs, r.rhs_base, r.empirical_constant, r.ratio_log10});
        rows.push_back({{"center", {r.ball.center.x, r.ball.center.y}}, {"r", r.ball.r}, {"lhs", r.lhs},
                        {"rhs_base", r.rhs_base}, {"empirical_constant", r.empirical_constant},
                        {"ratio_log10", r.ratio_log10}, {"passed", r.passed}});
    }
    Outcome out;
    out.summary = problem_json(p);
    out.summary["p"] = rep.p;
    out.summary["gehring_constant_log10"] = rep.c_log10;
    out.summary["max_empirical_constant"] = rep.max_empirical_constant;
    out.summary["balls"] = rows;
    out.summary["passed"] = rep.passed;
    out.csv = csv.str();
    return out;
}

// minimize ----------------------------------------------------------------

struct MinimizeConfig {
    std::size_t grid = 64;
    MaterialConfig cfg;
    double target_volume = 0.5;
    std::string boundary = "linear-x";
    std::string init = "vertical-cut";
    std::uint64_t seed = 1;
    std::size_t sweeps = 50;
    std::size_t block = 1;
};

inline constexpr std::size_t kMinMinimizeGrid = 40;

inline MinimizeConfig parse_minimize_config(const std::string& text) {
    const auto kv = io::parse_key_values(text);
    MinimizeConfig mc;
    mc.cfg.n = 2;
    mc.cfg.alpha = 1.0;
    mc.cfg.beta = 5.0;
    mc.cfg.gamma = 0.1;
    mc.cfg.lambda_pen = 10.0;
    auto num = [](const std::string& key, const std::string& v) {
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != v.size() || !std::isfinite(d)) throw ConfigError("config: '" + key + "' is not a number");
        return d;
    };
    auto count = [&](const std::string& key, const std::string& v) {
        const double d = num(key, v);
        if (d < 0.0 || d != std::floor(d) || d > 1e9) throw ConfigError("config: '" + key + "' must be a non-negative integer");
        return static_cast<std::size_t>(d);
    };
    for (const auto& [k, v] : kv) {
        if (k == "grid") mc.grid = count(k, v);
        else if (k == "gamma") mc.cfg.gamma = num(k, v);
        else if (k == "alpha") mc.cfg.alpha = num(k, v);
        else if (k == "beta") mc.cfg.beta = num(k, v);
        else if (k == "Lambda") mc.cfg.lambda_pen = num(k, v);
        else if (k == "target_volume") mc.target_volume = num(k, v);
        else if (k == "boundary") mc.boundary = v;
        else if (k == "init") mc.init = v;
        else if (k == "seed") mc.seed = count(k, v);
        else if (k == "sweeps") mc.sweeps = count(k, v);
        else if (k == "block") mc.block = count(k, v);
        else throw ConfigError("config: unknown key '" + k + "'");
    }
    mc.cfg.validate_allow_equal();
    // The first-variation bumps vanish only within 0.05 of the boundary, so
    // the two-cell support margin needs h <= 0.025.
    if (mc.grid < kMinMinimizeGrid) {
        throw ConfigError("config: grid must be at least " + std::to_string(kMinMinimizeGrid));
    }
    if (mc.block == 0) throw ConfigError("config: block must be positive");
    if (!(mc.target_volume >= 0.0 && mc.target_volume <= 1.0)) throw ConfigError("config: target_volume outside [0, 1]");
    pde::parse_preset(mc.boundary);
    minimizer::parse_init(mc.init);
    return mc;
}

inline constexpr std::size_t kBumpFields = 5;

inline json minimize_diagnostics(const minimizer::MinimizeResult& res, const MaterialConfig& cfg, std::uint64_t seed) {
    const auto& s = res.state;
    const double h = s.h();
    json d;
    d["energy"] = s.parts.total;
    d["perimeter"] = s.parts.perimeter;
    d["dirichlet"] = s.parts.dirichlet;
    d["volume"] = s.parts.volume;
    d["target_volume"] = s.target_volume;
    d["volume_error_cells"] = (s.parts.volume - s.target_volume) / (h * h);
    d["sweeps"] = res.sweeps;
    d["exact_evaluations"] = res.exact_evaluations;
    d["reverted_sweeps"] = res.reverted_sweeps;
    d["budget_exceeded"] = res.budget_exceeded;
    const auto scan = minimizer::flip_scan(s, cfg);
    d["flip_scan"] = {{"best_delta", scan.best_delta}, {"moves", scan.moves}, {"exact_evaluations", scan.exact_evaluations},
                      {"stable", scan.best_delta > -1e-10}};
    if (4.0 * h < 0.2) {
        const auto dens = minimizer::density_report(s, cfg, pde::geometric_radii(4.0 * h, 0.2, 5));
        d["density"] = {{"radii", dens.radii},
                        {"samples", dens.samples},
                        {"min_perimeter_density", dens.min_perimeter_density},
                        {"max_energy_density", dens.max_energy_density},
                        {"median_energy_density", dens.median_energy_density},
                        {"max_excess", dens.max_excess}};
    }
    if (s.n() >= 8) {
        const auto fv = minimizer::first_variation_check(s, cfg, minimizer::random_bump_fields(kBumpFields, seed));
        json rows = json::array();
        for (const auto& r : fv.rows) {
            rows.push_back({{"lhs", r.lhs}, {"rhs", r.rhs}, {"normal_flux", r.normal_flux}, {"passed", r.passed}});
        }
        d["first_variation"] = {{"tolerance", fv.tolerance},
                                {"passed", fv.passed},
                                {"multiplier_estimate", fv.multiplier_estimate},
                                {"multiplier_low", fv.multiplier_low},
                                {"multiplier_high", fv.multiplier_high},
                                {"fields", rows}};
    }
    return d;
}

inline std::string trace_csv(const minimizer::MinimizeResult& res) {
    io::Csv csv({"sweep", "energy", "perimeter", "dirichlet", "volume"});
    for (const auto& t : res.trace) {
        csv.row_strings({std::to_string(t.sweep), io::fmt(t.energy), io::fmt(t.perimeter), io::fmt(t.dirichlet),
                         io::fmt(t.volume)});
    }
    return csv.str();
}

inline minimizer::MinimizeResult run_minimizer(const MinimizeConfig& mc) {
    auto phase = minimizer::initial_phase(mc.grid, mc.target_volume, minimizer::parse_init(mc.init), mc.seed);
    auto state = minimizer::make_state(mc.grid, std::move(phase), mc.cfg, pde::preset(pde::parse_preset(mc.boundary)),
                                       mc.target_volume);
    minimizer::Schedule sched;
    sched.max_sweeps = mc.sweeps;
    sched.block = mc.block;
    return minimizer::alternate_minimize(std::move(state), mc.cfg, sched);
}

inline Outcome cmd_minimize(const std::string& config_path) {
    const std::string text = io::read_file(config_path);
    const auto mc = parse_minimize_config(text);
    const auto res = run_minimizer(mc);
    Outcome out;
    out.summary = minimize_diagnostics(res, mc.cfg, mc.seed);
    out.csv = trace_csv(res);
    out.extra_hash_input = text;
    out.artifacts.emplace_back("phase.pgm", io::phase_pgm(res.state.phase(), res.state.n()));
    out.artifacts.emplace_back("u.bin", io::field_binary(res.state.field));
    out.artifacts.emplace_back("u.json", io::field_metadata(res.state.field, "u.bin").dump(2) + "\n");
    out.artifacts.emplace_back("diagnostics.json", out.summary.dump(2) + "\n");
    out.artifacts.emplace_back("trace.csv", out.csv);
    return out;
}

// report ------------------------------------------------------------------

inline Outcome cmd_report(std::size_t min_grid) {
    json r;
    const auto bp = cones::critical_threshold(1e-6);
    r["threshold"] = {{"lambda1", bp.lambda1}, {"theta_star", bp.theta_star}};
    json angles;
    for (double ratio : {10.0, 30.0}) angles[io::fmt(ratio)] = cones::critical_angles(ratio);
    r["cone_angles"] = angles;
    r["constants"] = ledger_json(constants::build_ledger(3, 30.0, 1.0), 0.5);
    json l0;
    for (int n = 2; n <= 6; ++n) l0[std::to_string(n)] = constants::to_string(constants::lambda0(n));
    r["lambda0"] = l0;
    {
        MaterialConfig c30;
        c30.n = 3;
        c30.alpha = 1.0;
        c30.beta = 30.0;
        const auto roots = cones::critical_angles(30.0);
        json g = json::array();
        for (double th : roots) g.push_back({{"theta0", th}, {"gamma", cones::cone_criticality_gamma(th, c30)}});
        r["cone_gamma"] = g;
    }
    {
        ProblemOptions o;
        o.tol = 1e-13;
        const auto p = build_problem(o);
        const auto f = pde::solve_transmission(p.grid, p.cfg, p.boundary, o.tol);
        r["transmission_exactness"] = solve_summary(p, f);
    }
    r["monotonicity"] = cmd_monotonicity(128, 1.0, 30.0, 1, 5, 0.06, 0.9, 8, 1e-12).summary;
    {
        ProblemOptions o;
        o.shape = "cone";
        o.cap = "dirichlet";
        o.tol = 1e-12;
        json ladder = json::array();
        for (std::size_t n : {32, 64, 128}) {
            o.resolution = n;
            const auto p = build_problem(o);
            const auto f = pde::solve_transmission(p.grid, p.cfg, p.boundary, o.tol);
            ladder.push_back({{"resolution", n}, {"flux_jump", pde::flux_jump(f)}});
        }
        o.resolution = 128;
        const auto p = build_problem(o);
        const auto fs = pde::sample_field(p.grid, p.cfg, *p.exact);
        const auto radii = pde::geometric_radii(0.1, 0.8, 8);
        const auto fit = pde::decay_fit(fs, {0.0, 0.0}, radii);
        const auto lb = pde::cone_energy_lowerbound_check(fs, radii);
        r["cone_scaling"] = {{"theta0", p.theta0}, {"fitted_exponent", fit.fitted_exponent},
                             {"inside_exponent", lb.fitted_exponent}, {"inside_c0", lb.c0},
                             {"flux_ladder", ladder}};
    }
    {
        json rows = json::array();
        MaterialConfig cfg;
        cfg.n = 2;
        cfg.alpha = 1.0;
        cfg.beta = 30.0;
        MaterialConfig flat = cfg;
        flat.beta = cfg.alpha;
        const auto grid = pde::make_halfspace_grid(128);
        const double rho = 0.8;
        for (auto preset : {pde::BoundaryPreset::LinearX, pde::BoundaryPreset::Quadratic, pde::BoundaryPreset::TwoPole}) {
            const auto data = pde::on_unit_square(pde::preset(preset), -1.0, 1.0, -1.0, 1.0);
            const auto f = pde::solve_transmission(grid, cfg, data, 1e-12);
            const auto b = pde::solve_transmission(grid, flat, data, 1e-12);
            for (double tau : {0.5, 0.25}) {
                const double ratio = pde::dirichlet_energy(f, {0, 0}, tau * rho, false) /
                                     pde::dirichlet_energy(f, {0, 0}, rho, false);
                const double base = pde::dirichlet_energy(b, {0, 0}, tau * rho, false) /
                                    pde::dirichlet_energy(b, {0, 0}, rho, false);
                rows.push_back({{"preset", pde::preset_name(preset)}, {"tau", tau}, {"ratio", ratio},
                                {"c0", base / (tau * tau)}, {"bound", 4.0 * base}});
            }
        }
        r["decay"] = rows;
    }
    {
        MinimizeConfig mc;
        mc.grid = min_grid;
        mc.cfg.n = 2;
        mc.cfg.alpha = 1.0;
        mc.cfg.beta = 5.0;
        mc.cfg.gamma = 0.1;
        mc.cfg.lambda_pen = 10.0;
        const auto res = run_minimizer(mc);
        r["minimizer"] = minimize_diagnostics(res, mc.cfg, mc.seed);
        json scan = json::array();
        for (double lam : {5.0, 10.0, 12.5, 15.0, 20.0}) {
            mc.cfg.lambda_pen = lam;
            const auto rl = run_minimizer(mc);
            const double h = rl.state.h();
            scan.push_back({{"Lambda", lam}, {"volume", rl.state.parts.volume},
                            {"volume_error_cells", (rl.state.parts.volume - mc.target_volume) / (h * h)},
                            {"energy", rl.state.parts.total}});
        }
        r["lambda_scan"] = scan;
    }
    Outcome out;
    out.summary = r;
    return out;
}

// Dispatcher --------------------------------------------------------------

inline json collect_parameters(const CLI::App* sub) {
    json params = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
        const std::string name = opt->get_lnames().front();
        if (opt->count() > 0) params[name] = opt->as<std::string>();
        else params[name] = opt->get_default_str();
    }
    return params;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"Taylor-cone transmission toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "json";
    std::string out_dir = ".";
    app.add_option("--format", format, "summary format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    std::function<Outcome()> action;

    int c_n = 3;
    double c_ratio = 30.0, c_cs = 1.0, c_tau = 0.5;
    auto* constants_cmd = app.add_subcommand("constants", "explicit constants ledger");
    constants_cmd->add_option("--n", c_n, "dimension")->capture_default_str();
    constants_cmd->add_option("--ratio", c_ratio, "beta / alpha")->capture_default_str();
    auto* cs_opt = constants_cmd->add_option("--cs", c_cs, "Sobolev constant C_S")->capture_default_str();
    constants_cmd->add_option("--tau", c_tau, "decay scale for eps0")->capture_default_str();
    constants_cmd->callback([&] {
        if (cs_opt->count() == 0) err << "warning: C_S defaults to 1; pass --cs for a sharp Sobolev constant\n";
        action = [&] { return cmd_constants(c_n, c_ratio, c_cs, c_tau); };
    });

    double a_ratio = 30.0, a_tol = 1e-10;
    auto* angles_cmd = app.add_subcommand("cone-angles", "critical cone angles for a ratio");
    angles_cmd->add_option("--ratio", a_ratio, "beta / alpha")->capture_default_str();
    angles_cmd->add_option("--tol", a_tol, "residual tolerance")->capture_default_str();
    angles_cmd->callback([&] { action = [&] { return cmd_cone_angles(a_ratio, a_tol); }; });

    double t_tol = 1e-6, t_min = 2.0, t_max = 60.0;
    std::size_t t_samples = 117;
    auto* thr_cmd = app.add_subcommand("threshold", "critical ratio lambda1 and bifurcation diagram");
    thr_cmd->add_option("--tol", t_tol, "bisection tolerance on the ratio")->capture_default_str();
    thr_cmd->add_option("--ratio-min", t_min, "bifurcation sweep start")->capture_default_str();
    thr_cmd->add_option("--ratio-max", t_max, "bifurcation sweep end")->capture_default_str();
    thr_cmd->add_option("--samples", t_samples, "bifurcation sweep samples")->capture_default_str();
    thr_cmd->callback([&] { action = [&] { return cmd_threshold(t_tol, t_min, t_max, t_samples); }; });

    double g_ratio = 30.0, g_alpha = 1.0, g_amp = 1.0;
    std::string g_root = "larger";
    std::optional<double> g_theta;
    auto* gamma_cmd = app.add_subcommand("cone-gamma", "surface tension balancing a critical cone");
    gamma_cmd->add_option("--ratio", g_ratio, "beta / alpha")->capture_default_str();
    gamma_cmd->add_option("--alpha", g_alpha, "coefficient outside E")->capture_default_str();
    gamma_cmd->add_option("--root", g_root, "larger or smaller critical angle")->capture_default_str();
    gamma_cmd->add_option("--theta", g_theta, "explicit cone angle (overrides --root)");
    gamma_cmd->add_option("--amplitude", g_amp, "amplitude of the cone potential")->capture_default_str();
    gamma_cmd->callback([&] { action = [&] { return cmd_cone_gamma(g_ratio, g_alpha, g_root, g_theta, g_amp); }; });

    ProblemOptions s_opts;
    auto* solve_cmd = app.add_subcommand("solve", "transmission solve");
    add_problem_options(solve_cmd, s_opts);
    solve_cmd->callback([&] { action = [&] { return cmd_solve(s_opts); }; });

    ProblemOptions d_opts;
    double d_rmin = 0.1, d_rmax = 0.8;
    std::size_t d_count = 8;
    auto* decay_cmd = app.add_subcommand("decay", "energy decay fit around the origin");
    add_problem_options(decay_cmd, d_opts);
    decay_cmd->add_option("--rmin", d_rmin, "smallest radius")->capture_default_str();
    decay_cmd->add_option("--rmax", d_rmax, "largest radius")->capture_default_str();
    decay_cmd->add_option("--count", d_count, "number of radii")->capture_default_str();
    decay_cmd->callback([&] { action = [&] { return cmd_decay(d_opts, d_rmin, d_rmax, d_count); }; });

    std::size_t m_res = 128, m_samples = 5, m_count = 8;
    double m_alpha = 1.0, m_ratio = 30.0, m_rmin = 0.06, m_rmax = 0.9, m_tol = 1e-12;
    std::uint64_t m_seed = 1;
    auto* mono_cmd = app.add_subcommand("monotonicity", "ball averages of sigma |Du|^2 on the half-space");
    mono_cmd->add_option("--resolution", m_res, "cells per direction")->capture_default_str();
    mono_cmd->add_option("--alpha", m_alpha, "coefficient outside E")->capture_default_str();
    mono_cmd->add_option("--ratio", m_ratio, "beta / alpha")->capture_default_str();
    mono_cmd->add_option("--seed", m_seed, "first seed of the random cubic data")->capture_default_str();
    mono_cmd->add_option("--samples", m_samples, "number of random data sets")->capture_default_str();
    mono_cmd->add_option("--rmin", m_rmin, "smallest radius")->capture_default_str();
    mono_cmd->add_option("--rmax", m_rmax, "largest radius")->capture_default_str();
    mono_cmd->add_option("--count", m_count, "number of radii")->capture_default_str();
    mono_cmd->add_option("--tol", m_tol, "relative CG residual")->capture_default_str();
    mono_cmd->callback([&] {
        action = [&] { return cmd_monotonicity(m_res, m_alpha, m_ratio, m_seed, m_samples, m_rmin, m_rmax, m_count, m_tol); };
    });

    ProblemOptions r_opts;
    double r_cs = 1.0;
    auto* rh_cmd = app.add_subcommand("reverse-holder", "reverse Hoelder ratios against the ledger constants");
    add_problem_options(rh_cmd, r_opts);
    rh_cmd->add_option("--cs", r_cs, "Sobolev constant C_S")->capture_default_str();
    rh_cmd->callback([&] { action = [&] { return cmd_reverse_holder(r_opts, r_cs); }; });

    std::string config_path;
    auto* min_cmd = app.add_subcommand("minimize", "alternating minimization of the penalized energy");
    min_cmd->add_option("--config", config_path, "key = value configuration file")->required();
    min_cmd->callback([&] { action = [&] { return cmd_minimize(config_path); }; });

    std::size_t rep_grid = 64;
    auto* report_cmd = app.add_subcommand("report", "regenerate every headline number");
    report_cmd->add_option("--grid", rep_grid, "minimizer grid")->capture_default_str();
    report_cmd->callback([&] { action = [&] { return cmd_report(rep_grid); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    Outcome outcome;
    try {
        outcome = action();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return detail::is_validation_error(e) ? 2 : 1;
    }

    const std::string summary_json = outcome.summary.dump(2) + "\n";
    const std::string summary_csv = outcome.csv.empty() ? detail::flatten_csv(outcome.summary) : outcome.csv;
    const std::string name = sub->get_name();
    outcome.artifacts.emplace_back(name + (format == "json" ? ".json" : ".csv"),
                                   format == "json" ? summary_json : summary_csv);
    out << (format == "json" ? summary_json : summary_csv);

    try {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        json manifest;
        manifest["subcommand"] = name;
        manifest["parameters"] = collect_parameters(sub);
        json paths = json::array();
        for (const auto& [file, bytes] : outcome.artifacts) {
            const auto path = (fs::path(out_dir) / file).string();
            io::write_file(path, bytes);
            paths.push_back(path);
        }
        manifest["artifact_paths"] = paths;
        manifest["versions"] = {{"tool", kToolVersion},
                                {"config_hash", io::crc32_hex(manifest["parameters"].dump() + outcome.extra_hash_input)}};
        manifest["wall_time"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        io::write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run(args, out, err);
}

}  // namespace tcone::cli
