// bath.hpp: bosonic bath models, mode discretization and the self-energy kernel
//
// Conventions: energies are real, the Laplace variable s enters through
// z = i*s, so that s = -iE corresponds to the real energy E. The self-energy
// is f(s) = sum_k V_k^2 / (i s - w_k), i.e. the Cauchy transform of the
// spectral density J(w) = sum_k V_k^2 delta(w - w_k) evaluated at z = i s.

#pragma once

#include "cooptrap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace cooptrap {

using cplx = std::complex<double>;

struct Interval {
    double lo{0.0};
    double hi{0.0};

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

// 1D coupled-cavity array: w_k = omega0 - 2 J cos k, V_k = g0 (per unit mode density).
struct CoupledCavity {
    double omega0{0.0};
    double J{1.0};
    double g0{0.2};
};

// Isotropic photonic-crystal band edge: J(w) = (beta^{3/2}/pi) / sqrt(w - omega_c)
// above the edge, truncated at omega_max.
struct PhotonicCrystalBandEdge {
    double omega_c{0.0};
    double beta{1.0};
    double omega_max{200.0};
};

// User supplied J(w) >= 0 on [omega_min, omega_max]; either tabulated
// (linear interpolation) or a callable.
struct CustomSpectralDensity {
    double omega_min{0.0};
    double omega_max{1.0};
    std::vector<double> table_omega;
    std::vector<double> table_density;
    std::function<double(double)> density;

    static CustomSpectralDensity tabulated(std::vector<double> omega, std::vector<double> values) {
        CustomSpectralDensity c;
        if (!omega.empty()) {
            c.omega_min = omega.front();
            c.omega_max = omega.back();
        }
        c.table_omega = std::move(omega);
        c.table_density = std::move(values);
        return c;
    }

    static CustomSpectralDensity callable(double lo, double hi, std::function<double(double)> fn) {
        CustomSpectralDensity c;
        c.omega_min = lo;
        c.omega_max = hi;
        c.density = std::move(fn);
        return c;
    }

    double operator()(double w) const {
        if (w < omega_min || w > omega_max) return 0.0;
        if (density) return density(w);
        if (table_omega.empty()) return 0.0;
        auto it = std::upper_bound(table_omega.begin(), table_omega.end(), w);
        if (it == table_omega.end()) return table_density.back();
        if (it == table_omega.begin()) return table_density.front();
        const auto i = static_cast<std::size_t>(it - table_omega.begin());
        const double t = (w - table_omega[i - 1]) / (table_omega[i] - table_omega[i - 1]);
        return (1.0 - t) * table_density[i - 1] + t * table_density[i];
    }
};

using BathSpec = std::variant<CoupledCavity, PhotonicCrystalBandEdge, CustomSpectralDensity>;

// Finite mode grid standing in for the continuum. Frequencies are sorted
// non-decreasing; the cavity ring grid contains exact +-k degeneracies.
struct DiscretizedBath {
    std::vector<double> mode_freqs;
    std::vector<double> couplings;
    Interval band_support;
    // Time after which the finite grid produces artificial recurrences.
    double revival_time{0.0};

    std::size_t size() const noexcept { return mode_freqs.size(); }

    double total_coupling_squared() const noexcept {
        double s = 0.0;
        for (double v : couplings) s += v * v;
        return s;
    }
};

// ------------------------------ validation -------------------------------

inline std::vector<std::string> validation_issues(const BathSpec& spec) {
    std::vector<std::string> issues;
    std::visit([&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) {
            if (!std::isfinite(b.omega0)) issues.emplace_back("omega0 must be finite");
            if (!(b.J > 0.0) || !std::isfinite(b.J)) issues.emplace_back("J must be > 0");
            if (!(b.g0 >= 0.0) || !std::isfinite(b.g0)) issues.emplace_back("g0 must be >= 0");
        } else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) {
            if (!std::isfinite(b.omega_c)) issues.emplace_back("omega_c must be finite");
            if (!(b.beta > 0.0) || !std::isfinite(b.beta)) issues.emplace_back("beta must be > 0");
            if (!(b.omega_max > b.omega_c) || !std::isfinite(b.omega_max))
                issues.emplace_back("omega_max must be finite and > omega_c (cutoff above band edge)");
        } else {
            if (!std::isfinite(b.omega_min) || !std::isfinite(b.omega_max) || !(b.omega_max > b.omega_min))
                issues.emplace_back("custom spectral density needs finite support with omega_max > omega_min");
            if (!b.density) {
                if (b.table_omega.size() < 2 || b.table_omega.size() != b.table_density.size()) {
                    issues.emplace_back("tabulated spectral density needs >= 2 (omega, J) pairs of equal length");
                } else {
                    for (std::size_t i = 1; i < b.table_omega.size(); ++i) {
                        if (!(b.table_omega[i] > b.table_omega[i - 1])) {
                            issues.emplace_back("tabulated omega must be strictly ascending (row " +
                                                std::to_string(i + 1) + ")");
                            break;
                        }
                    }
                    for (std::size_t i = 0; i < b.table_density.size(); ++i) {
                        if (!(b.table_density[i] >= 0.0)) {
                            issues.emplace_back("tabulated J(omega) must be >= 0 (row " +
                                                std::to_string(i + 1) + ")");
                            break;
                        }
                    }
                }
            }
        }
    }, spec);
    return issues;
}

inline void validate(const BathSpec& spec) {
    auto issues = validation_issues(spec);
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

// ------------------------------ basic queries ----------------------------

inline Interval band_support(const BathSpec& spec) {
    return std::visit([](const auto& b) -> Interval {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) {
            return {b.omega0 - 2.0 * b.J, b.omega0 + 2.0 * b.J};
        } else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) {
            return {b.omega_c, b.omega_max};
        } else {
            return {b.omega_min, b.omega_max};
        }
    }, spec);
}

// Natural energy unit of the bath: J, beta, or the support width.
inline double energy_scale(const BathSpec& spec) {
    return std::visit([](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) return b.J;
        else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) return b.beta;
        else return b.omega_max - b.omega_min;
    }, spec);
}

// Frequency that detunings are measured from: band centre, band edge, lower support bound.
inline double reference_frequency(const BathSpec& spec) {
    return std::visit([](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) return b.omega0;
        else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) return b.omega_c;
        else return b.omega_min;
    }, spec);
}

inline bool has_closed_form(const BathSpec& spec) {
    return !std::holds_alternative<CustomSpectralDensity>(spec);
}

inline double spectral_density(const BathSpec& spec, double omega) {
    return std::visit([omega](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) {
            const double x = omega - b.omega0;
            const double r = 4.0 * b.J * b.J - x * x;
            if (r <= 0.0) return 0.0;
            return b.g0 * b.g0 / (std::numbers::pi * std::sqrt(r));
        } else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) {
            if (omega <= b.omega_c || omega > b.omega_max) return 0.0;
            return std::pow(b.beta, 1.5) / (std::numbers::pi * std::sqrt(omega - b.omega_c));
        } else {
            return b(omega);
        }
    }, spec);
}

namespace detail {

// Exact integral of the photonic-crystal density over [a, b] (both >= omega_c).
inline double band_edge_weight(const PhotonicCrystalBandEdge& b, double lo, double hi) {
    return 2.0 * std::pow(b.beta, 1.5) / std::numbers::pi *
           (std::sqrt(hi - b.omega_c) - std::sqrt(lo - b.omega_c));
}

// Density-weighted mean frequency of the bin: with x = w - omega_c,
// int x^{1/2} / int x^{-1/2} = (a + sqrt(ab) + b) / 3.
inline double band_edge_centroid(const PhotonicCrystalBandEdge& b, double lo, double hi) {
    const double x0 = lo - b.omega_c, x1 = hi - b.omega_c;
    return b.omega_c + (x0 + std::sqrt(x0 * x1) + x1) / 3.0;
}

} // namespace detail

// ------------------------------ discretization ---------------------------

inline DiscretizedBath discretize(const BathSpec& spec, std::size_t n_modes) {
    validate(spec);
    if (n_modes < 2) throw ConfigError("n_modes must be >= 2 (got " + std::to_string(n_modes) + ")");

    DiscretizedBath out;
    out.band_support = band_support(spec);
    out.mode_freqs.resize(n_modes);
    out.couplings.resize(n_modes);
    const double n = static_cast<double>(n_modes);

    if (const auto* cc = std::get_if<CoupledCavity>(&spec)) {
        // Ring of N cavities: k_n = -pi + 2 pi n / N, n = 1..N.
        for (std::size_t i = 0; i < n_modes; ++i) {
            const double k = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i + 1) / n;
            out.mode_freqs[i] = cc->omega0 - 2.0 * cc->J * std::cos(k);
        }
        std::sort(out.mode_freqs.begin(), out.mode_freqs.end());
        std::fill(out.couplings.begin(), out.couplings.end(), cc->g0 / std::sqrt(n));
        // Fastest group velocity is 2J; a wavepacket circles the ring after N/(2J).
        out.revival_time = n / (2.0 * cc->J);
        return out;
    }

    const Interval sup = out.band_support;
    const double dw = sup.width() / n;
    for (std::size_t i = 0; i < n_modes; ++i) {
        const double lo = sup.lo + dw * static_cast<double>(i);
        const double hi = (i + 1 == n_modes) ? sup.hi : lo + dw;
        const double mid = 0.5 * (lo + hi);
        out.mode_freqs[i] = mid;
        double weight = 0.0;
        if (const auto* pc = std::get_if<PhotonicCrystalBandEdge>(&spec)) {
            // Bin-integrated weight placed at the bin's density centroid: the
            // 1/sqrt edge singularity defeats plain midpoint sampling.
            weight = detail::band_edge_weight(*pc, lo, hi);
            out.mode_freqs[i] = detail::band_edge_centroid(*pc, lo, hi);
        } else {
            const double j = spectral_density(spec, mid);
            if (!(j >= 0.0) || !std::isfinite(j)) {
                std::ostringstream os;
                os << "spectral density sample J(" << mid << ") = " << j << " is negative or not finite";
                throw ConfigError(os.str());
            }
            weight = j * (hi - lo);
        }
        out.couplings[i] = std::sqrt(weight);
    }
    out.revival_time = 2.0 * std::numbers::pi / dw;
    return out;
}

// ------------------------------ self-energy ------------------------------

// f(s) = sum_k V_k^2 / (i s - w_k), exact finite sum.
inline cplx self_energy_discrete(const DiscretizedBath& bath, cplx s) {
    const cplx z = cplx(0.0, 1.0) * s;
    cplx acc = 0.0;
    for (std::size_t k = 0; k < bath.size(); ++k) {
        const cplx d = z - bath.mode_freqs[k];
        if (d == cplx(0.0, 0.0)) {
            std::ostringstream os;
            os << "self-energy pole on the grid: i*s coincides with mode " << k << " (w = "
               << bath.mode_freqs[k] << ")";
            throw NumericalError(os.str());
        }
        acc += bath.couplings[k] * bath.couplings[k] / d;
    }
    return acc;
}

// Self-energy as a function of the complex energy z = i s (first Riemann sheet).
inline cplx self_energy_at_energy(const BathSpec& spec, cplx z) {
    return std::visit([z](const auto& b) -> cplx {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) {
            if (b.g0 == 0.0) return cplx(0.0);
            const cplx w = z - b.omega0;
            if (z.imag() == 0.0 && std::abs(w.real()) <= 2.0 * b.J) {
                throw NumericalError("coupled-cavity self-energy evaluated on the band branch cut");
            }
            // Product of principal roots: analytic off [-2J, 2J], ~ g0^2 / w at infinity.
            return b.g0 * b.g0 / (std::sqrt(w - 2.0 * b.J) * std::sqrt(w + 2.0 * b.J));
        } else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) {
            if (z.imag() == 0.0 && z.real() >= b.omega_c) {
                throw NumericalError("band-edge self-energy evaluated on the branch cut w >= omega_c");
            }
            return -std::pow(b.beta, 1.5) / std::sqrt(cplx(b.omega_c) - z);
        } else {
            throw ConfigError("no closed form for a custom spectral density");
        }
    }, spec);
}

// d(self-energy)/dz at complex energy z.
inline cplx self_energy_energy_derivative(const BathSpec& spec, cplx z) {
    const cplx sigma = self_energy_at_energy(spec, z);
    return std::visit([&](const auto& b) -> cplx {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, CoupledCavity>) {
            if (b.g0 == 0.0) return cplx(0.0);
            const cplx w = z - b.omega0;
            return -sigma * w / ((w - 2.0 * b.J) * (w + 2.0 * b.J));
        } else if constexpr (std::is_same_v<T, PhotonicCrystalBandEdge>) {
            return 0.5 * sigma / (cplx(b.omega_c) - z);
        } else {
            return cplx(0.0);
        }
    }, spec);
}

// Continuum f(s). The band-edge form omits the cutoff correction of order
// beta^{3/2} / sqrt(omega_max - omega_c).
inline cplx self_energy_closed_form(const BathSpec& spec, cplx s) {
    validate(spec);
    return self_energy_at_energy(spec, cplx(0.0, 1.0) * s);
}

// df/ds = i * Sigma'(i s).
inline cplx self_energy_closed_form_derivative(const BathSpec& spec, cplx s) {
    return cplx(0.0, 1.0) * self_energy_energy_derivative(spec, cplx(0.0, 1.0) * s);
}

// ------------------------------ CSV ingestion ----------------------------

// Two-column CSV (omega, J). A non-numeric first line is treated as a header.
inline CustomSpectralDensity load_spectral_density_csv(std::istream& in, const std::string& label = "<stream>") {
    std::vector<double> omega, values;
    std::vector<std::string> issues;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double w = 0.0, j = 0.0;
        if (!(row >> w >> j)) {
            if (omega.empty() && issues.empty()) continue; // header
            issues.push_back(label + ":" + std::to_string(lineno) + ": expected two numbers");
            continue;
        }
        omega.push_back(w);
        values.push_back(j);
    }
    auto spec = CustomSpectralDensity::tabulated(std::move(omega), std::move(values));
    auto more = validation_issues(BathSpec{spec});
    for (auto& m : more) issues.push_back(label + ": " + m);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return spec;
}

inline CustomSpectralDensity load_spectral_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spectral density file '" + path + "'");
    return load_spectral_density_csv(in, path);
}

} // namespace cooptrap
