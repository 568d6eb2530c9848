// config.hpp: strict JSON run configuration and bundled figure presets

#pragma once

#include "cooptrap/bath.hpp"
#include "cooptrap/errors.hpp"
#include "cooptrap/hamiltonian.hpp"
#include "cooptrap/trapping.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cooptrap {

struct OutputConfig {
    std::optional<std::string> dir; // unset: CLI flag or environment decides
    std::string prefix{"run"};
    bool csv{true};
    bool json{true};
};

struct RunConfig {
    std::string bath_type;
    BathSpec bath;
    EnsembleSpec ensemble;
    std::vector<int> Ms; // sweep list; defaults to {ensemble.M}
    SimParams sim;
    OutputConfig output;
};

namespace detail {

using nlohmann::json;

class Reader {
public:
    std::vector<std::string> issues;

    void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || it.key() == a;
            if (!ok) issues.push_back("unknown key '" + qualified(where, it.key()) + "'");
        }
    }

    bool object_at(const json& parent, const char* key, const std::string& where, bool required) {
        if (!parent.contains(key)) {
            if (required) issues.push_back("missing section '" + qualified(where, key) + "'");
            return false;
        }
        if (!parent[key].is_object()) {
            issues.push_back("'" + qualified(where, key) + "' must be an object");
            return false;
        }
        return true;
    }

    std::optional<double> number(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj[key];
        if (!v.is_number()) {
            issues.push_back("'" + qualified(where, key) + "' must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    double number_or(const json& obj, const char* key, const std::string& where, double fallback) {
        return number(obj, key, where).value_or(fallback);
    }

    std::optional<long long> integer(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj[key];
        if (!v.is_number_integer()) {
            issues.push_back("'" + qualified(where, key) + "' must be an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<bool> boolean(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        if (!obj[key].is_boolean()) {
            issues.push_back("'" + qualified(where, key) + "' must be true or false");
            return std::nullopt;
        }
        return obj[key].get<bool>();
    }

    std::optional<std::string> string(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        if (!obj[key].is_string()) {
            issues.push_back("'" + qualified(where, key) + "' must be a string");
            return std::nullopt;
        }
        return obj[key].get<std::string>();
    }

    std::optional<std::vector<double>> numbers(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj[key];
        bool ok = v.is_array();
        if (ok)
            for (const auto& e : v) ok = ok && e.is_number();
        if (!ok) {
            issues.push_back("'" + qualified(where, key) + "' must be an array of numbers");
            return std::nullopt;
        }
        return v.get<std::vector<double>>();
    }

    std::optional<std::vector<int>> integers(const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj[key];
        bool ok = v.is_array() && !v.empty();
        if (ok)
            for (const auto& e : v) ok = ok && e.is_number_integer();
        if (!ok) {
            issues.push_back("'" + qualified(where, key) + "' must be a non-empty array of integers");
            return std::nullopt;
        }
        return v.get<std::vector<int>>();
    }

private:
    static std::string qualified(const std::string& where, const std::string& key) {
        return where.empty() ? key : where + "." + key;
    }
};

inline std::string parse_error_location(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline std::optional<BathSpec> read_bath(Reader& rd, const json& b, const std::filesystem::path& base_dir,
                                         std::string& type_out) {
    const auto type = rd.string(b, "type", "bath");
    if (!type) {
        if (!b.contains("type")) rd.issues.emplace_back("missing key 'bath.type'");
        return std::nullopt;
    }
    type_out = *type;
    if (*type == "coupled_cavity") {
        rd.only_keys(b, "bath", {"type", "omega0", "J", "g0"});
        CoupledCavity cc;
        cc.omega0 = rd.number_or(b, "omega0", "bath", 0.0);
        cc.J = rd.number_or(b, "J", "bath", 1.0);
        const auto g0 = rd.number(b, "g0", "bath");
        if (!g0 && !b.contains("g0")) rd.issues.emplace_back("missing key 'bath.g0'");
        cc.g0 = g0.value_or(0.0);
        return cc;
    }
    if (*type == "photonic_crystal") {
        rd.only_keys(b, "bath", {"type", "omega_c", "beta", "omega_max"});
        PhotonicCrystalBandEdge pc;
        pc.omega_c = rd.number_or(b, "omega_c", "bath", 0.0);
        pc.beta = rd.number_or(b, "beta", "bath", 1.0);
        pc.omega_max = rd.number_or(b, "omega_max", "bath", pc.omega_c + 200.0 * pc.beta);
        return pc;
    }
    if (*type == "custom") {
        rd.only_keys(b, "bath", {"type", "csv", "omega", "J"});
        const auto csv = rd.string(b, "csv", "bath");
        const auto om = rd.numbers(b, "omega", "bath");
        const auto jv = rd.numbers(b, "J", "bath");
        const bool inline_table = b.contains("omega") || b.contains("J");
        if (b.contains("csv") && inline_table) {
            rd.issues.emplace_back("bath: give either 'csv' or inline 'omega'/'J' arrays, not both");
            return std::nullopt;
        }
        if (csv) {
            std::filesystem::path p(*csv);
            if (p.is_relative()) p = base_dir / p;
            try {
                return load_spectral_density_csv(p.string());
            } catch (const ConfigError& e) {
                for (const auto& s : e.issues()) rd.issues.push_back("bath.csv: " + s);
                return std::nullopt;
            }
        }
        if (!inline_table && !b.contains("csv")) {
            rd.issues.emplace_back("custom bath needs 'csv' or inline 'omega' and 'J' arrays");
            return std::nullopt;
        }
        if (!om || !jv) {
            if (!b.contains("omega")) rd.issues.emplace_back("missing key 'bath.omega'");
            if (!b.contains("J")) rd.issues.emplace_back("missing key 'bath.J'");
            return std::nullopt;
        }
        return CustomSpectralDensity::tabulated(*om, *jv);
    }
    rd.issues.push_back("bath.type must be one of coupled_cavity, photonic_crystal, custom (got '" + *type + "')");
    return std::nullopt;
}

// Defaults that keep the run below half the grid revival time.
inline void fill_simulation_defaults(SimParams& p, const BathSpec& spec, bool has_n_modes, bool has_t_max,
                                     bool has_n_samples, bool has_tolerance) {
    const bool cavity = std::holds_alternative<CoupledCavity>(spec);
    if (!has_n_modes) p.n_modes = cavity ? 2048 : 4096;
    if (!has_tolerance) p.tolerance = cavity ? 0.02 : 0.05;
    if (!has_n_samples) p.n_samples = cavity ? 801 : 601;
    if (!has_t_max) {
        const double t_rev = discretize(spec, p.n_modes).revival_time;
        p.t_max = 0.45 * t_rev;
        if (cavity) p.t_max = std::min(p.t_max, 400.0 / std::get<CoupledCavity>(spec).J);
    }
}

} // namespace detail

// Parse and validate a configuration document. Relative CSV paths resolve
// against base_dir. Every problem found is reported in one ConfigError.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error near " + detail::parse_error_location(text, e.byte) + ": " +
                          std::string(e.what()).substr(std::string(e.what()).find(':') + 2));
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    detail::Reader rd;
    RunConfig cfg;
    rd.only_keys(doc, "", {"bath", "ensemble", "simulation", "output"});

    std::optional<BathSpec> bath;
    if (rd.object_at(doc, "bath", "", true)) {
        bath = detail::read_bath(rd, doc["bath"], base_dir, cfg.bath_type);
        if (bath)
            for (const auto& s : validation_issues(*bath)) rd.issues.push_back("bath: " + s);
    }

    if (rd.object_at(doc, "ensemble", "", true)) {
        const json& e = doc["ensemble"];
        rd.only_keys(e, "ensemble", {"M", "Omega", "detuning", "j0", "Ms"});
        const auto M = rd.integer(e, "M", "ensemble");
        const auto Ms = rd.integers(e, "Ms", "ensemble");
        if (!e.contains("M") && !e.contains("Ms")) rd.issues.emplace_back("missing key 'ensemble.M'");
        cfg.ensemble.M = static_cast<int>(M.value_or(Ms && !Ms->empty() ? *std::min_element(Ms->begin(), Ms->end()) : 1));
        cfg.ensemble.j0 = static_cast<int>(rd.integer(e, "j0", "ensemble").value_or(1));
        const auto Omega = rd.number(e, "Omega", "ensemble");
        const auto det = rd.number(e, "detuning", "ensemble");
        if (e.contains("Omega") && e.contains("detuning"))
            rd.issues.emplace_back("ensemble: 'Omega' and 'detuning' are mutually exclusive (ambiguous emitter frequency)");
        else if (!e.contains("Omega") && !e.contains("detuning"))
            rd.issues.emplace_back("ensemble: one of 'Omega' or 'detuning' is required");
        if (Omega) cfg.ensemble.Omega = *Omega;
        if (det) cfg.ensemble.Omega = (bath ? reference_frequency(*bath) : 0.0) + *det;

        if (cfg.ensemble.M < 1) {
            rd.issues.push_back("M must be >= 1 (got " + std::to_string(cfg.ensemble.M) + ")");
        } else if (cfg.ensemble.j0 < 1 || cfg.ensemble.j0 > cfg.ensemble.M) {
            rd.issues.push_back("j0 must lie in [1, M] (got " + std::to_string(cfg.ensemble.j0) + ")");
        }
        if (Ms) {
            for (int m : *Ms)
                if (m < 1) rd.issues.push_back("every entry of ensemble.Ms must be >= 1 (got " + std::to_string(m) + ")");
            std::set<int> uniq(Ms->begin(), Ms->end());
            cfg.Ms.assign(uniq.begin(), uniq.end());
        } else {
            cfg.Ms = {cfg.ensemble.M};
        }
    }

    bool has_n_modes = false, has_t_max = false, has_n_samples = false, has_tolerance = false;
    if (rd.object_at(doc, "simulation", "", false)) {
        const json& s = doc["simulation"];
        const std::string w = "simulation";
        rd.only_keys(s, w, {"n_modes", "t_max", "n_samples", "times", "window", "tolerance", "threshold",
                            "norm_tolerance", "allow_revivals"});
        if (auto n = rd.integer(s, "n_modes", w)) {
            has_n_modes = true;
            if (*n < 2) rd.issues.emplace_back("simulation.n_modes must be >= 2");
            else cfg.sim.n_modes = static_cast<std::size_t>(*n);
        }
        if (auto t = rd.number(s, "t_max", w)) {
            has_t_max = true;
            if (!(*t >= 0.0) || !std::isfinite(*t)) rd.issues.emplace_back("simulation.t_max must be >= 0");
            cfg.sim.t_max = *t;
        }
        if (auto n = rd.integer(s, "n_samples", w)) {
            has_n_samples = true;
            if (*n < 1) rd.issues.emplace_back("simulation.n_samples must be >= 1");
            else cfg.sim.n_samples = static_cast<std::size_t>(*n);
        }
        if (auto t = rd.numbers(s, "times", w)) {
            bool ok = !t->empty();
            for (std::size_t i = 0; ok && i < t->size(); ++i)
                ok = std::isfinite((*t)[i]) && (*t)[i] >= 0.0 && (i == 0 || (*t)[i] > (*t)[i - 1]);
            if (!ok) rd.issues.emplace_back("simulation.times must be a non-empty, strictly increasing list of t >= 0");
            if (has_n_samples && ok && cfg.sim.n_samples != t->size())
                rd.issues.emplace_back("simulation.n_samples disagrees with the length of simulation.times");
            cfg.sim.times = *t;
            has_t_max = true;
        }
        if (auto win = rd.numbers(s, "window", w)) {
            if (win->size() != 2 || !((*win)[0] <= (*win)[1]))
                rd.issues.emplace_back("simulation.window must be [t_lo, t_hi] with t_lo <= t_hi");
            else cfg.sim.window = Interval{(*win)[0], (*win)[1]};
        }
        if (auto tol = rd.number(s, "tolerance", w)) {
            has_tolerance = true;
            if (!(*tol > 0.0)) rd.issues.emplace_back("simulation.tolerance must be > 0");
            cfg.sim.tolerance = *tol;
        }
        if (auto th = rd.number(s, "threshold", w)) {
            if (!(*th > 0.0)) rd.issues.emplace_back("simulation.threshold must be > 0");
            cfg.sim.threshold = *th;
        }
        if (auto nt = rd.number(s, "norm_tolerance", w)) {
            if (!(*nt > 0.0)) rd.issues.emplace_back("simulation.norm_tolerance must be > 0");
            cfg.sim.norm_tolerance = *nt;
        }
        if (auto ar = rd.boolean(s, "allow_revivals", w)) cfg.sim.allow_revivals = *ar;
    }

    if (rd.object_at(doc, "output", "", false)) {
        const json& o = doc["output"];
        rd.only_keys(o, "output", {"dir", "prefix", "formats"});
        cfg.output.dir = rd.string(o, "dir", "output");
        if (auto p = rd.string(o, "prefix", "output")) {
            if (p->empty() || p->find('/') != std::string::npos)
                rd.issues.emplace_back("output.prefix must be a non-empty file name stem");
            cfg.output.prefix = *p;
        }
        if (o.contains("formats")) {
            const json& f = o["formats"];
            bool ok = f.is_array() && !f.empty();
            cfg.output.csv = cfg.output.json = false;
            if (ok) {
                for (const auto& e : f) {
                    if (e == "csv") cfg.output.csv = true;
                    else if (e == "json") cfg.output.json = true;
                    else ok = false;
                }
            }
            if (!ok) rd.issues.emplace_back("output.formats must be a non-empty array drawn from \"csv\", \"json\"");
        }
    }

    if (!rd.issues.empty()) throw ConfigError(std::move(rd.issues));
    cfg.bath = *bath;
    detail::fill_simulation_defaults(cfg.sim, cfg.bath, has_n_modes, has_t_max, has_n_samples, has_tolerance);
    if (cfg.sim.window && !cfg.sim.times && cfg.sim.window->lo > cfg.sim.t_max)
        throw ConfigError("simulation.window starts after t_max");
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

// Bundled figure presets, in units of J (fig2) and beta (fig4).
inline const char* preset_text(const std::string& id) {
    if (id == "fig2") return R"({
  "bath": {"type": "coupled_cavity", "omega0": 0.0, "J": 1.0, "g0": 0.2},
  "ensemble": {"Ms": [2, 3, 4, 5], "detuning": 0.0, "j0": 1},
  "simulation": {"n_modes": 2048, "t_max": 400.0, "n_samples": 801, "window": [260.0, 390.0], "tolerance": 0.02},
  "output": {"prefix": "fig2"}
})";
    if (id == "fig4") return R"({
  "bath": {"type": "photonic_crystal", "omega_c": 0.0, "beta": 1.0, "omega_max": 200.0},
  "ensemble": {"Ms": [2, 3, 4], "detuning": 6.5, "j0": 1},
  "simulation": {"n_modes": 4096, "t_max": 60.0, "n_samples": 601, "window": [40.0, 60.0], "tolerance": 0.05},
  "output": {"prefix": "fig4"}
})";
    return nullptr;
}

inline RunConfig preset(const std::string& id) {
    const char* text = preset_text(id);
    if (!text) throw ConfigError("unknown figure id '" + id + "' (expected fig2 or fig4)");
    return parse_config(text);
}

} // namespace cooptrap
