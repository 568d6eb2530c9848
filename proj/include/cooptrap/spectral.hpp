// spectral.hpp: Laplace-domain kernels F(s), G(s), bound-state poles and residues
//
// G(s) = s + i Omega + i M f(s),  F(s) = (s + i Omega) G(s).
// On the imaginary axis s = -iE, G(-iE) = -i (E - Omega - M Sigma(E)); real
// roots outside the band are photon-atom bound states, each contributing
// exp(-i E t) / (M G'(s)) to the excited-emitter amplitude.

#pragma once

#include "cooptrap/bath.hpp"
#include "cooptrap/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace cooptrap {

inline constexpr cplx I{0.0, 1.0};

inline cplx eval_G(const EnsembleSpec& ens, const BathSpec& spec, cplx s) {
    return s + I * ens.Omega + I * static_cast<double>(ens.M) * self_energy_closed_form(spec, s);
}

// Finite-grid fallback.
inline cplx eval_G(const EnsembleSpec& ens, const DiscretizedBath& bath, cplx s) {
    return s + I * ens.Omega + I * static_cast<double>(ens.M) * self_energy_discrete(bath, s);
}

inline cplx eval_F(const EnsembleSpec& ens, const BathSpec& spec, cplx s) {
    return (s + I * ens.Omega) * eval_G(ens, spec, s);
}

inline cplx eval_F(const EnsembleSpec& ens, const DiscretizedBath& bath, cplx s) {
    return (s + I * ens.Omega) * eval_G(ens, bath, s);
}

enum class DerivativeMode { analytic, finite_difference };

// G'(s) = 1 + i M f'(s).
inline cplx eval_G_derivative(const EnsembleSpec& ens, const BathSpec& spec, cplx s,
                              DerivativeMode mode = DerivativeMode::analytic, double fd_step = 0.0) {
    if (mode == DerivativeMode::analytic)
        return 1.0 + I * static_cast<double>(ens.M) * self_energy_closed_form_derivative(spec, s);
    // Central difference along the real-energy direction: ds = -i dE.
    const double h = fd_step > 0.0 ? fd_step : 1e-6 * energy_scale(spec);
    const cplx up = eval_G(ens, spec, s - I * h);
    const cplx dn = eval_G(ens, spec, s + I * h);
    return I * (up - dn) / (2.0 * h);
}

struct PoleSet {
    std::vector<double> bound_energies;
    std::vector<cplx> residues;           // 1 / (M G'(-i E_m))
    std::vector<double> G_residuals;      // |G(-i E_m)|
    double condition_value{0.0};          // max_m |residue_m|
    bool decoupled{false};                // f == 0: the free-emitter pole at Omega
};

struct PoleSearchOptions {
    double step_rel{0.01};      // scan step, fraction of the band width
    double range_rel{10.0};     // scan range, multiples of the band width
    DerivativeMode derivative{DerivativeMode::analytic};
    double fd_step_rel{1e-6};   // finite-difference step, fraction of the energy scale
};

namespace detail {

inline bool is_decoupled(const BathSpec& spec) {
    if (const auto* cc = std::get_if<CoupledCavity>(&spec)) return cc->g0 == 0.0;
    return false;
}

// h(E) = E - Omega - M Sigma(E), real for E outside the band, increasing in E.
inline double dressed_equation(const EnsembleSpec& ens, const BathSpec& spec, double E) {
    return E - ens.Omega - static_cast<double>(ens.M) * self_energy_at_energy(spec, cplx(E, 0.0)).real();
}

// Bisection on an interval whose `edge` end sits on the band edge (never evaluated).
inline double bisect_root(const EnsembleSpec& ens, const BathSpec& spec, double lo, double hi, double edge) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double h = dressed_equation(ens, spec, mid);
        if (h == 0.0) return mid;
        if (h < 0.0) lo = mid; else hi = mid;
    }
    const double root = 0.5 * (lo + hi);
    const double ulp_scale = std::max({std::abs(edge), std::abs(root), 1e-300});
    if (std::abs(root - edge) <= 8.0 * std::numeric_limits<double>::epsilon() * ulp_scale) {
        std::ostringstream os;
        os << "edge-degenerate, no isolated pole (root collapses onto band edge " << edge << ")";
        throw NumericalError(os.str());
    }
    return root;
}

} // namespace detail

inline PoleSet find_bound_states(const EnsembleSpec& ens, const BathSpec& spec, const PoleSearchOptions& opt = {}) {
    validate(ens);
    validate(spec);
    if (!has_closed_form(spec)) throw ConfigError("no closed form; poles require built-in bath");

    PoleSet ps;
    const double m = static_cast<double>(ens.M);
    if (detail::is_decoupled(spec)) {
        // G(s) = s + i Omega: the bare emitter level with G' = 1.
        ps.decoupled = true;
        ps.bound_energies.push_back(ens.Omega);
        ps.residues.emplace_back(1.0 / m, 0.0);
        ps.G_residuals.push_back(0.0);
        ps.condition_value = 1.0 / m;
        return ps;
    }

    const Interval band = band_support(spec);
    const double width = band.width();
    const double step = opt.step_rel * width;
    const bool has_upper = std::holds_alternative<CoupledCavity>(spec);

    auto scan = [&](double edge, int dir) {
        // Past the band edge h starts at -dir*inf and rises monotonically (for dir=+1) / falls (dir=-1).
        const double range = std::max(opt.range_rel * width, std::abs(ens.Omega - edge) + opt.range_rel * width);
        double prev = edge;
        const auto n_steps = static_cast<long>(std::ceil(range / step));
        for (long i = 1; i <= n_steps; ++i) {
            const double cur = edge + dir * step * static_cast<double>(i);
            const double h = detail::dressed_equation(ens, spec, cur);
            if (dir * h >= 0.0) {
                const double lo = dir > 0 ? prev : cur;
                const double hi = dir > 0 ? cur : prev;
                const double E = (h == 0.0) ? cur : detail::bisect_root(ens, spec, lo, hi, edge);
                ps.bound_energies.push_back(E);
                return;
            }
            prev = cur;
        }
    };
    scan(band.lo, -1);
    if (has_upper) scan(band.hi, +1);
    std::sort(ps.bound_energies.begin(), ps.bound_energies.end());

    for (double E : ps.bound_energies) {
        const cplx s(0.0, -E);
        const cplx dG = eval_G_derivative(ens, spec, s, opt.derivative, opt.fd_step_rel * energy_scale(spec));
        const cplx res = 1.0 / (m * dG);
        ps.residues.push_back(res);
        ps.G_residuals.push_back(std::abs(eval_G(ens, spec, s)));
        ps.condition_value = std::max(ps.condition_value, std::abs(res));
    }
    return ps;
}

struct PoleTerm {
    double energy;
    cplx residue;
};

struct AsymptoticPrediction {
    double dark_weight{0.0};
    std::vector<PoleTerm> pole_terms;
    Interval plateau_band;
};

inline AsymptoticPrediction predict_asymptotics(const PoleSet& poles, const EnsembleSpec& ens) {
    AsymptoticPrediction p;
    const double m = static_cast<double>(ens.M);
    p.dark_weight = (m - 1.0) / m;
    double spread = 0.0;
    for (std::size_t i = 0; i < poles.bound_energies.size(); ++i) {
        // The decoupled pole sits at Omega and adds coherently to the dark term.
        p.pole_terms.push_back({poles.bound_energies[i], poles.residues[i]});
        spread += std::abs(poles.residues[i]);
    }
    p.plateau_band = {std::max(0.0, p.dark_weight - spread), p.dark_weight + spread};
    return p;
}

// ((M-1)/M) exp(-i Omega t) + sum_m residue_m exp(-i E_m t); the scattering part is dropped.
inline cplx asymptotic_amplitude(const PoleSet& poles, const EnsembleSpec& ens, double t) {
    const double m = static_cast<double>(ens.M);
    cplx a = ((m - 1.0) / m) * std::polar(1.0, -ens.Omega * t);
    for (std::size_t i = 0; i < poles.bound_energies.size(); ++i)
        a += poles.residues[i] * std::polar(1.0, -poles.bound_energies[i] * t);
    return a;
}

struct TrappingCondition {
    bool satisfied{true};
    double condition_value{0.0};
    double threshold{0.05};
    std::string diagnostic;
};

// |1 / (M G'(x_m))| << 1, with "<<" read as "< threshold".
inline TrappingCondition trapping_condition(const PoleSet& poles, double threshold = 0.05) {
    TrappingCondition tc;
    tc.threshold = threshold;
    tc.condition_value = poles.condition_value;
    tc.satisfied = poles.condition_value < threshold;
    std::ostringstream os;
    if (poles.bound_energies.empty()) {
        os << "no bound states";
    } else {
        os << poles.bound_energies.size() << " pole(s)";
        if (poles.decoupled) os << " (decoupled bath: bare level at Omega)";
        os << ", max |1/(M G')| = " << poles.condition_value << (tc.satisfied ? " < " : " >= ") << threshold;
    }
    tc.diagnostic = os.str();
    return tc;
}

} // namespace cooptrap
