// cli.hpp: command dispatch for the cooptrap executable
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure,
// 3 I/O failure.

#pragma once

#include "cooptrap/config.hpp"
#include "cooptrap/io.hpp"
#include "cooptrap/report.hpp"
#include "cooptrap/spectral.hpp"
#include "cooptrap/trapping.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace cooptrap::cli {

inline constexpr const char* kOutDirEnv = "COOPTRAP_OUT_DIR";

enum ExitCode : int { ok = 0, config_error = 1, numerical_error = 2, io_error = 3 };

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

namespace detail {

inline std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

// --out beats output.dir in the config, which beats the environment.
inline std::filesystem::path output_dir(const std::string& flag, const RunConfig& cfg, const EnvLookup& env) {
    if (!flag.empty()) return flag;
    if (cfg.output.dir) return *cfg.output.dir;
    if (auto e = env(kOutDirEnv)) return *e;
    return ".";
}

inline void write_out(const std::filesystem::path& p, const std::string& content, std::ostream& out) {
    write_file_atomic(p, content);
    out << "wrote " << p.string() << '\n';
}

inline void print_report(const TrappingReport& r, std::ostream& out) {
    out << "M=" << r.M << "  plateau |A| over [" << fmt(r.window.lo) << ", " << fmt(r.window.hi)
        << "]: measured " << fmt(r.plateau_measured) << " (min " << fmt(r.plateau_min) << ", max "
        << fmt(r.plateau_max) << "), predicted 1-1/M = " << fmt(r.plateau_predicted) << ", tolerance "
        << fmt(r.tolerance) << ": " << (r.verdict ? "pass" : "fail") << '\n';
    out << "     condition_value " << (std::isfinite(r.condition_value) ? fmt(r.condition_value) : std::string("n/a"))
        << (r.condition_diagnostic.empty() ? "" : "  (" + r.condition_diagnostic + ")") << '\n';
}

inline int cmd_simulate(const RunConfig& cfg, const std::string& out_flag, const EnvLookup& env, std::ostream& out) {
    const TrappingRun run = run_trapping(cfg.ensemble, cfg.bath, cfg.sim);
    print_report(run.report, out);
    const auto dir = output_dir(out_flag, cfg, env);
    if (cfg.output.csv) write_out(dir / (cfg.output.prefix + "_series.csv"), series_csv(run.series), out);
    if (cfg.output.json) write_out(dir / (cfg.output.prefix + "_summary.json"), to_json(run.report).dump(2) + "\n", out);
    return ok;
}

inline int cmd_poles(const RunConfig& cfg, const std::string& out_flag, const EnvLookup& env, std::ostream& out) {
    if (!has_closed_form(cfg.bath)) throw ConfigError("no closed form; poles require built-in bath");
    const PoleSet ps = find_bound_states(cfg.ensemble, cfg.bath);
    const AsymptoticPrediction pred = predict_asymptotics(ps, cfg.ensemble);
    const TrappingCondition tc = trapping_condition(ps, cfg.sim.threshold);
    const nlohmann::json j = to_json(ps, pred);
    out << "M=" << cfg.ensemble.M << "  bound states: " << j["bound_energies"].size() << '\n';
    for (std::size_t i = 0; i < j["bound_energies"].size(); ++i)
        out << "  E = " << fmt(j["bound_energies"][i].get<double>(), 12)
            << "  residue = " << fmt(j["residues"][i]["re"].get<double>(), 8) << '\n';
    out << "condition_value " << fmt(j["condition_value"].get<double>()) << "  dark_weight " << fmt(pred.dark_weight)
        << "  plateau_band [" << fmt(pred.plateau_band.lo) << ", " << fmt(pred.plateau_band.hi) << "]\n";
    out << "trapping condition: " << tc.diagnostic << '\n';
    if (cfg.output.json)
        write_out(output_dir(out_flag, cfg, env) / (cfg.output.prefix + "_poles.json"), j.dump(2) + "\n", out);
    return ok;
}

inline void write_sweep(const std::vector<TrappingRun>& runs, const RunConfig& cfg, const std::filesystem::path& dir,
                        const std::string& stem, bool per_m_series, std::ostream& out) {
    std::vector<TrappingReport> reports;
    for (const auto& r : runs) reports.push_back(r.report);
    if (cfg.output.csv) {
        if (per_m_series)
            for (const auto& r : runs)
                write_out(dir / (stem + "series_M" + std::to_string(r.report.M) + ".csv"), series_csv(r.series), out);
        write_out(dir / (stem + "summary.csv"), summary_csv(reports), out);
        write_out(dir / (stem + "abs_A.csv"), combined_abs_csv(runs), out);
    }
    if (cfg.output.json) write_out(dir / (stem + "summary.json"), to_json(reports).dump(2) + "\n", out);
}

inline int cmd_sweep(const RunConfig& cfg, const std::string& out_flag, const EnvLookup& env, std::ostream& out) {
    const auto runs = sweep_M_runs(cfg.ensemble, cfg.bath, cfg.Ms, cfg.sim);
    for (const auto& r : runs) print_report(r.report, out);
    write_sweep(runs, cfg, output_dir(out_flag, cfg, env), cfg.output.prefix + "_sweep_", false, out);
    return ok;
}

inline int cmd_reproduce(const std::string& id, const std::vector<int>& Ms, const std::string& out_flag,
                         const EnvLookup& env, std::ostream& out) {
    RunConfig cfg = preset(id);
    if (!Ms.empty()) {
        for (int m : Ms)
            if (m < 1) throw ConfigError("every M must be >= 1 (got " + std::to_string(m) + ")");
        cfg.Ms = Ms;
    }
    const auto runs = sweep_M_runs(cfg.ensemble, cfg.bath, cfg.Ms, cfg.sim);
    for (const auto& r : runs) print_report(r.report, out);
    write_sweep(runs, cfg, output_dir(out_flag, cfg, env) / id, "", true, out);
    return ok;
}

} // namespace detail

// Runs one invocation. argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr,
               const EnvLookup& env = process_env) {
    CLI::App app{"Dark-state population trapping of emitter ensembles coupled to a bosonic bath"};
    app.require_subcommand(1);
    std::string config_path, out_dir, figure;
    std::vector<int> Ms;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, std::string("output directory (default: output.dir, then $") + kOutDirEnv + ", then .)");
    };
    auto* sim = app.add_subcommand("simulate", "propagate one configuration and write its time series");
    auto* poles = app.add_subcommand("poles", "locate bound states of the continuum model");
    auto* sweep = app.add_subcommand("sweep", "run the trapping check across ensemble.Ms");
    auto* repro = app.add_subcommand("reproduce", "run a bundled figure preset");
    add_common(sim);
    add_common(poles);
    add_common(sweep);
    repro->add_option("figure", figure, "fig2 or fig4")->required();
    repro->add_option("--out", out_dir, std::string("output directory (default: $") + kOutDirEnv + ", then .)");
    repro->add_option("--Ms", Ms, "override the preset emitter counts")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    try {
        if (*repro) return detail::cmd_reproduce(figure, Ms, out_dir, env, out);
        const RunConfig cfg = load_config(config_path);
        if (*sim) return detail::cmd_simulate(cfg, out_dir, env, out);
        if (*poles) return detail::cmd_poles(cfg, out_dir, env, out);
        return detail::cmd_sweep(cfg, out_dir, env, out);
    } catch (const ConfigError& e) {
        err << "config error:\n";
        for (const auto& s : e.issues()) err << "  " << s << '\n';
        return config_error;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_error;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_error;
    }
}

} // namespace cooptrap::cli
