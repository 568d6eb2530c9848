// trapping.hpp: long-time plateaus, M sweeps and verdicts against |A(inf)| = 1 - 1/M

#pragma once

#include "cooptrap/dynamics.hpp"
#include "cooptrap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cooptrap {

struct PlateauStats {
    double mean{0.0};
    double min{0.0};
    double max{0.0};
    std::size_t samples{0};
};

// Time average of |A_j0(t)| over samples with t in [window.lo, window.hi].
inline PlateauStats measure_plateau(const TimeSeries& ts, Interval window) {
    PlateauStats st;
    st.min = std::numeric_limits<double>::infinity();
    st.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!window.contains(ts.times[i])) continue;
        const double a = std::abs(ts.A_j0[i]);
        sum += a;
        st.min = std::min(st.min, a);
        st.max = std::max(st.max, a);
        ++st.samples;
    }
    if (st.samples == 0) {
        std::ostringstream os;
        os << "plateau window [" << window.lo << ", " << window.hi << "] contains no samples";
        throw ConfigError(os.str());
    }
    st.mean = sum / static_cast<double>(st.samples);
    return st;
}

// Mean of a per-sample quantity over the same window.
inline double window_mean(const std::vector<double>& times, const std::vector<double>& values, Interval window) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!window.contains(times[i])) continue;
        sum += values[i];
        ++n;
    }
    return n ? sum / static_cast<double>(n) : std::nan("");
}

struct SimParams {
    std::size_t n_modes{2048};
    double t_max{400.0};
    std::size_t n_samples{801};
    std::optional<std::vector<double>> times;  // explicit grid overrides t_max/n_samples
    std::optional<Interval> window;            // default: final third of the span
    double tolerance{0.02};
    double threshold{0.05};
    double norm_tolerance{1e-9}; // initial-state normalization check
    bool allow_revivals{false};

    std::vector<double> time_grid() const { return times ? *times : uniform_times(t_max, n_samples); }

    Interval plateau_window() const {
        if (window) return *window;
        const auto t = time_grid();
        const double hi = t.empty() ? 0.0 : t.back();
        return {2.0 * hi / 3.0, hi};
    }
};

// Finite grids emulate the continuum only up to about half the revival time.
inline void check_revival_guard(const DiscretizedBath& bath, const SimParams& p) {
    if (p.allow_revivals) return;
    const auto t = p.time_grid();
    const double t_end = t.empty() ? 0.0 : *std::max_element(t.begin(), t.end());
    if (t_end >= 0.5 * bath.revival_time) {
        std::ostringstream os;
        os << "simulated span " << t_end << " reaches half the discretization revival time " << bath.revival_time
           << "; increase n_modes or shorten t_max";
        throw ConfigError(os.str());
    }
}

struct TrappingReport {
    int M{1};
    double plateau_predicted{0.0};
    double plateau_measured{0.0};
    double plateau_min{0.0};
    double plateau_max{0.0};
    Interval window;
    double condition_value{std::nan("")};
    bool condition_satisfied{false};
    std::string condition_diagnostic;
    std::optional<AsymptoticPrediction> prediction;
    double late_field_population{0.0};
    double max_norm_drift{0.0};
    double tolerance{0.02};
    bool verdict{false};
};

struct TrappingRun {
    TrappingReport report;
    TimeSeries series;
};

// One simulation + plateau measurement + pole analysis for a single M.
inline TrappingRun run_trapping(const EnsembleSpec& ens, const BathSpec& spec, const SimParams& p) {
    validate(ens);
    const DiscretizedBath bath = discretize(spec, p.n_modes);
    check_revival_guard(bath, p);
    const auto times = p.time_grid();
    const Interval window = p.plateau_window();

    const EigenSystem eig = eigendecompose_ensemble(ens, bath);
    TrappingRun run;
    PropagateOptions po;
    po.norm_tolerance = p.norm_tolerance;
    run.series = propagate(eig, SingleExcitationState::excited(ens, bath.size()), times, po);

    auto& r = run.report;
    r.M = ens.M;
    r.plateau_predicted = 1.0 - 1.0 / static_cast<double>(ens.M);
    const PlateauStats st = measure_plateau(run.series, window);
    r.plateau_measured = st.mean;
    r.plateau_min = st.min;
    r.plateau_max = st.max;
    r.window = window;
    r.late_field_population = window_mean(times, *run.series.field_population, window);
    r.max_norm_drift = run.series.max_norm_drift();
    r.tolerance = p.tolerance;

    if (has_closed_form(spec)) {
        const PoleSet poles = find_bound_states(ens, spec);
        const TrappingCondition tc = trapping_condition(poles, p.threshold);
        r.condition_value = tc.condition_value;
        r.condition_satisfied = tc.satisfied;
        r.condition_diagnostic = tc.diagnostic;
        r.prediction = predict_asymptotics(poles, ens);
    } else {
        r.condition_diagnostic = "pole analysis unavailable for a custom spectral density";
    }
    r.verdict = std::abs(r.plateau_measured - r.plateau_predicted) < p.tolerance;
    return run;
}

inline std::vector<TrappingRun> sweep_M_runs(const EnsembleSpec& ens_template, const BathSpec& spec,
                                             std::vector<int> Ms, const SimParams& p) {
    for (int m : Ms)
        if (m < 1) throw ConfigError("every M in the sweep must be >= 1 (got " + std::to_string(m) + ")");
    std::sort(Ms.begin(), Ms.end());
    std::vector<TrappingRun> out;
    out.reserve(Ms.size());
    for (int m : Ms) {
        EnsembleSpec e = ens_template;
        e.M = m;
        e.j0 = std::clamp(e.j0, 1, m);
        out.push_back(run_trapping(e, spec, p));
    }
    return out;
}

inline std::vector<TrappingReport> sweep_M(const EnsembleSpec& ens_template, const BathSpec& spec,
                                           const std::vector<int>& Ms, const SimParams& p) {
    std::vector<TrappingReport> out;
    for (auto& r : sweep_M_runs(ens_template, spec, Ms, p)) out.push_back(std::move(r.report));
    return out;
}

} // namespace cooptrap
