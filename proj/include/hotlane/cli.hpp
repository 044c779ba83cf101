#pragma once

// Command layer of the `hotlane` tool. Each command writes its report to
// `out`, diagnostics to `err`, and returns the process exit status.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hotlane/config.hpp"
#include "hotlane/oracle.hpp"
#include "hotlane/report.hpp"

namespace hotlane::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitToleranceFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolverError = 3;

/// Oracle agreement threshold used by `verify`.
inline double verify_tolerance(int grid_n) { return std::max(5e-3, 4.0 / grid_n); }

inline int report_validation(const ValidationError& e, std::ostream& err) {
    err << "ValidationError: " << e.what() << '\n';
    return kExitUsage;
}

inline int cmd_equilibrium(const RunConfig& cfg, double tau, double rho, bool json, std::ostream& out,
                           std::ostream& err) {
    const DesignParams design{rho, tau, cfg.occupancy};
    try {
        design.validate();
    } catch (const ValidationError& e) {
        return report_validation(e, err);
    }

    DesignPointResult r;
    try {
        r = evaluate_design(design, cfg.population, cfg.bpr);
    } catch (const SolverError& e) {
        if (json) {
            out << nlohmann::json{{"rho", rho}, {"tau", tau}, {"error", std::string(to_string(e.kind()))},
                                  {"message", e.what()}}
                       .dump()
                << '\n';
        }
        err << e.what() << '\n';
        return kExitSolverError;
    }

    if (json) {
        out << to_json(r).dump() << '\n';
        return kExitOk;
    }
    const auto& o = *r.outcome;
    out << "design: rho=" << fmt12(rho) << " tau=" << fmt12(tau) << " occupancy=" << fmt12(cfg.occupancy) << '\n'
        << "regime: " << to_string(o.regime) << '\n'
        << "toll share: " << fmt12(o.shares.toll) << '\n'
        << "pool share: " << fmt12(o.shares.pool) << '\n'
        << "ordinary share: " << fmt12(o.shares.ordinary) << '\n'
        << "latency gap (min): " << fmt12(o.gap) << '\n'
        << "hot lane latency (min): " << fmt12(r.latency_hot) << '\n'
        << "ordinary lane latency (min): " << fmt12(r.latency_ordinary) << '\n'
        << "average travel time (min): " << fmt12(r.avg_time) << '\n'
        << "toll revenue ($/min): " << fmt12(r.revenue) << '\n'
        << "residual: " << fmt12(o.residual) << '\n'
        << "iterations: " << o.iterations << '\n';
    return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, double tau, double rho, int grid_n, std::ostream& out,
                      std::ostream& err) {
    const DesignParams design{rho, tau, cfg.occupancy};
    OracleConfig ocfg = cfg.oracle;
    ocfg.grid_n = grid_n;
    try {
        design.validate();
        ocfg.validate();
    } catch (const ValidationError& e) {
        return report_validation(e, err);
    }

    EquilibriumOutcome analytic;
    try {
        analytic = solve(design, cfg.population, cfg.bpr);
    } catch (const SolverError& e) {
        err << "solver: " << e.what() << '\n';
        return kExitSolverError;
    }

    OracleResult oracle;
    try {
        oracle = oracle_equilibrium(design, cfg.population, cfg.bpr, ocfg);
    } catch (const OracleNoConvergence& e) {
        const auto& s = e.last();
        out << "analytic: toll=" << fmt12(analytic.shares.toll) << " pool=" << fmt12(analytic.shares.pool)
            << " ordinary=" << fmt12(analytic.shares.ordinary) << '\n'
            << "oracle (last iterate): toll=" << fmt12(s.toll) << " pool=" << fmt12(s.pool)
            << " ordinary=" << fmt12(s.ordinary) << '\n'
            << "distance: " << fmt12(max_norm_distance(analytic.shares, s)) << '\n'
            << "result: ORACLE-NO-CONVERGENCE\n";
        err << "oracle: " << e.what() << '\n';
        return kExitSolverError;
    }

    const double distance = max_norm_distance(analytic.shares, oracle.shares);
    const double tolerance = verify_tolerance(grid_n);
    const bool pass = distance <= tolerance;
    out << "design: rho=" << fmt12(rho) << " tau=" << fmt12(tau) << " regime=" << to_string(analytic.regime) << '\n'
        << "analytic: toll=" << fmt12(analytic.shares.toll) << " pool=" << fmt12(analytic.shares.pool)
        << " ordinary=" << fmt12(analytic.shares.ordinary) << '\n'
        << "oracle:   toll=" << fmt12(oracle.shares.toll) << " pool=" << fmt12(oracle.shares.pool)
        << " ordinary=" << fmt12(oracle.shares.ordinary) << " (grid_n=" << grid_n
        << ", iterations=" << oracle.iterations << ")\n"
        << "distance: " << fmt12(distance) << '\n'
        << "tolerance: " << fmt12(tolerance) << '\n'
        << "result: " << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitOk : kExitToleranceFailure;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto grid = cfg.grid();
    const auto results = sweep(grid, cfg.population, cfg.bpr);
    write_sweep_csv(out, results);
    int failed = 0;
    for (const auto& r : results) {
        if (!r.ok()) {
            ++failed;
            err << "rho=" << fmt12(r.design.rho) << " tau=" << fmt12(r.design.tau) << ": " << r.error << '\n';
        }
    }
    return failed == 0 ? kExitOk : kExitSolverError;
}

inline int cmd_pareto(const RunConfig& cfg, bool per_rho, std::ostream& out, std::ostream& err) {
    const auto grid = cfg.grid();
    const auto results = sweep(grid, cfg.population, cfg.bpr);
    int status = kExitOk;
    for (const auto& r : results) {
        if (!r.ok()) {
            status = kExitSolverError;
            err << "rho=" << fmt12(r.design.rho) << " tau=" << fmt12(r.design.tau) << ": " << r.error << '\n';
        }
    }

    out << kSweepCsvHeader << ",front_id\n";
    try {
        write_front_rows(out, pareto_front(results), "global");
        if (per_rho) {
            for (double rho : cfg.rho_values) {
                std::vector<DesignPointResult> subset;
                for (const auto& r : results)
                    if (r.design.rho == rho) subset.push_back(r);
                write_front_rows(out, pareto_front(subset), fmt12(rho));
            }
        }
    } catch (const EmptyInput& e) {
        err << e.what() << '\n';
        return kExitSolverError;
    }
    return status;
}

inline int cmd_statics(const RunConfig& cfg, double tau, std::ostream& out, std::ostream& err) {
    if (!(tau > 0.0)) {
        err << "ValidationError: tau must be > 0\n";
        return kExitUsage;
    }
    const auto table = comparative_statics_scan(tau, cfg.rho_values, cfg.occupancy, cfg.population, cfg.bpr);
    write_statics_csv(out, table);
    int status = kExitOk;
    for (const auto& row : table.rows) {
        if (!row.outcome) {
            status = kExitSolverError;
            err << "rho=" << fmt12(row.rho) << ": " << row.error << '\n';
        }
    }
    return status;
}

/// Full command-line entry point.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"HOT-lane Wardrop equilibrium solver and design sweeps", "hotlane"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string config_path;
    bool use_i880 = false;
    bool dump = false;
    std::string out_path;
    auto* config_opt = app.add_option("--config", config_path, "Configuration file (key = value)");
    auto* preset_opt = app.add_flag("--i880-defaults", use_i880, "Use the built-in I-880 calibration");
    config_opt->excludes(preset_opt);
    app.add_flag("--dump-config", dump, "Print the effective configuration");
    app.add_option("--out", out_path, "Write CSV output to this file instead of stdout");

    double tau = 0.0;
    double rho = 0.0;
    bool json = false;
    int grid_n = OracleConfig{}.grid_n;
    bool per_rho = false;

    auto* eq = app.add_subcommand("equilibrium", "Solve one design point");
    eq->add_option("--tau", tau, "Toll price (dollars)")->required();
    eq->add_option("--rho", rho, "HOT capacity fraction")->required();
    eq->add_flag("--json", json, "Emit one JSON object");

    auto* verify = app.add_subcommand("verify", "Compare the solver with the brute-force oracle");
    verify->add_option("--tau", tau, "Toll price (dollars)")->required();
    verify->add_option("--rho", rho, "HOT capacity fraction")->required();
    verify->add_option("--grid-n", grid_n, "Oracle agents per axis");

    auto* sweep_cmd = app.add_subcommand("sweep", "Solve the whole (rho, tau) grid and write CSV");

    auto* pareto = app.add_subcommand("pareto", "Write the (T, R) Pareto front as CSV");
    pareto->add_flag("--per-rho", per_rho, "Also write one front per rho value");

    auto* statics = app.add_subcommand("statics", "Scan equilibria along rho at a fixed toll");
    statics->add_option("--tau", tau, "Toll price (dollars)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunConfig cfg;
    try {
        if (use_i880) {
            cfg = i880_defaults();
        } else if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else {
            err << "one of --config PATH or --i880-defaults is required\n";
            return kExitUsage;
        }
    } catch (const ParseError& e) {
        err << "ParseError: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        return report_validation(e, err);
    }

    if (dump) {
        dump_config(out, cfg);
        if (app.get_subcommands().empty()) return kExitOk;
    }
    if (app.get_subcommands().empty()) {
        err << app.help();
        return kExitUsage;
    }

    std::ofstream file;
    std::ostream* target = &out;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "cannot open output file '" << out_path << "'\n";
            return kExitUsage;
        }
        target = &file;
    }

    if (*eq) return cmd_equilibrium(cfg, tau, rho, json, *target, err);
    if (*verify) return cmd_verify(cfg, tau, rho, grid_n, *target, err);
    if (*sweep_cmd) return cmd_sweep(cfg, *target, err);
    if (*pareto) return cmd_pareto(cfg, per_rho, *target, err);
    if (*statics) return cmd_statics(cfg, tau, *target, err);
    return kExitUsage;
}

}  // namespace hotlane::cli
