// report.hpp: JSON and CSV serialization of pole sets and trapping reports

#pragma once

#include "cooptrap/spectral.hpp"
#include "cooptrap/trapping.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace cooptrap {

namespace detail {

// NaN is not representable in JSON.
inline nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// A decoupled bath has no band, so nothing is listed as a bound state; the
// free-atom pole at Omega is reported separately and still enters plateau_band.
inline nlohmann::json to_json(const PoleSet& poles, const AsymptoticPrediction& pred) {
    nlohmann::json j;
    auto res = nlohmann::json::array();
    if (poles.decoupled) {
        j["bound_energies"] = nlohmann::json::array();
        j["condition_value"] = 0.0;
        j["G_residuals"] = nlohmann::json::array();
        if (!poles.bound_energies.empty())
            j["free_atom_pole"] = {{"energy", poles.bound_energies.front()},
                                   {"residue", {{"re", poles.residues.front().real()}, {"im", poles.residues.front().imag()}}}};
    } else {
        j["bound_energies"] = poles.bound_energies;
        for (const auto& r : poles.residues) res.push_back({{"re", r.real()}, {"im", r.imag()}});
        j["condition_value"] = poles.condition_value;
        j["G_residuals"] = poles.G_residuals;
    }
    j["residues"] = std::move(res);
    j["dark_weight"] = pred.dark_weight;
    j["plateau_band"] = {pred.plateau_band.lo, pred.plateau_band.hi};
    j["decoupled"] = poles.decoupled;
    return j;
}

inline nlohmann::json to_json(const TrappingReport& r) {
    nlohmann::json j;
    j["M"] = r.M;
    j["plateau_predicted"] = r.plateau_predicted;
    j["plateau_measured"] = r.plateau_measured;
    j["plateau_min"] = r.plateau_min;
    j["plateau_max"] = r.plateau_max;
    j["window"] = {r.window.lo, r.window.hi};
    j["condition_value"] = detail::number_or_null(r.condition_value);
    j["condition_satisfied"] = r.condition_satisfied;
    j["condition_diagnostic"] = r.condition_diagnostic;
    if (r.prediction) {
        j["dark_weight"] = r.prediction->dark_weight;
        j["plateau_band"] = {r.prediction->plateau_band.lo, r.prediction->plateau_band.hi};
    }
    j["late_field_population"] = r.late_field_population;
    j["max_norm_drift"] = r.max_norm_drift;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.verdict ? "pass" : "fail";
    return j;
}

inline nlohmann::json to_json(const std::vector<TrappingReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

// M, predicted, measured, min, max, condition_value, verdict
inline std::string summary_csv(const std::vector<TrappingReport>& reports) {
    std::ostringstream os;
    os << "M,predicted,measured,min,max,condition_value,verdict\n";
    for (const auto& r : reports) {
        os << r.M << ',' << detail::fmt17(r.plateau_predicted) << ',' << detail::fmt17(r.plateau_measured) << ','
           << detail::fmt17(r.plateau_min) << ',' << detail::fmt17(r.plateau_max) << ','
           << (std::isfinite(r.condition_value) ? detail::fmt17(r.condition_value) : std::string("nan")) << ','
           << (r.verdict ? "pass" : "fail") << '\n';
    }
    return os.str();
}

inline std::string series_csv(const TimeSeries& ts) {
    std::ostringstream os;
    write_csv(ts, os);
    return os.str();
}

// Plot-ready table: t followed by |A_j0(t)| for every run (all on one time grid).
inline std::string combined_abs_csv(const std::vector<TrappingRun>& runs) {
    std::ostringstream os;
    os << 't';
    for (const auto& r : runs) os << ",abs_A_M" << r.report.M;
    os << '\n';
    if (runs.empty()) return os.str();
    const auto& t = runs.front().series.times;
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << detail::fmt17(t[i]);
        for (const auto& r : runs) os << ',' << detail::fmt17(std::abs(r.series.A_j0[i]));
        os << '\n';
    }
    return os.str();
}

} // namespace cooptrap
