// dynamics.hpp: exact spectral time propagation in the single-excitation sector

#pragma once

#include "cooptrap/eigensystem.hpp"
#include "cooptrap/hamiltonian.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace cooptrap {

struct TimeSeries {
    std::vector<double> times;
    std::vector<cplx> A_j0;
    std::vector<double> norm;
    std::optional<std::vector<Eigen::VectorXcd>> all_atom_amps;
    std::optional<std::vector<double>> field_population;

    std::size_t size() const noexcept { return times.size(); }

    double max_norm_drift() const {
        double d = 0.0;
        for (double n : norm) d = std::max(d, std::abs(n - 1.0));
        return d;
    }
};

struct PropagateOptions {
    // Emitter whose amplitude is reported; -1 picks the largest |A_j(0)|.
    Eigen::Index observed_atom{-1};
    bool record_all_atoms{false};
    double norm_tolerance{1e-9};
    // Upper bound on dim * (times per chunk) held in memory at once.
    Eigen::Index chunk_elements{1 << 22};
};

inline std::vector<double> uniform_times(double t_max, std::size_t n_samples) {
    std::vector<double> t(n_samples, 0.0);
    if (n_samples > 1) {
        for (std::size_t i = 0; i < n_samples; ++i)
            t[i] = t_max * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    }
    return t;
}

// psi(t) = U exp(-i L t) U^T psi(0) for a single t.
inline Eigen::VectorXcd evolve_state(const EigenSystem& eig, const Eigen::VectorXcd& psi0, double t) {
    if (psi0.size() != eig.dim()) throw std::invalid_argument("evolve_state: basis mismatch");
    const Eigen::VectorXcd c = eig.vectors.transpose().cast<cplx>() * psi0;
    Eigen::VectorXcd phased(c.size());
    for (Eigen::Index n = 0; n < c.size(); ++n) phased[n] = c[n] * std::polar(1.0, -eig.values[n] * t);
    return eig.vectors.cast<cplx>() * phased;
}

inline TimeSeries propagate(const EigenSystem& eig, const SingleExcitationState& psi0,
                            const std::vector<double>& times, const PropagateOptions& opt = {}) {
    const Eigen::Index atoms = psi0.atom_amps.size();
    const Eigen::Index dim = atoms + psi0.field_amps.size();
    if (dim != eig.dim() || atoms != eig.atoms) {
        std::ostringstream os;
        os << "propagate: basis mismatch (state has " << atoms << " emitters + " << psi0.field_amps.size()
           << " modes, eigensystem is " << to_string(eig.basis) << " with dim " << eig.dim() << ")";
        throw std::invalid_argument(os.str());
    }
    const double n0 = psi0.norm_squared();
    if (std::abs(n0 - 1.0) > opt.norm_tolerance) {
        std::ostringstream os;
        os << "propagate: initial state not normalized (|psi|^2 = " << n0 << ")";
        throw std::invalid_argument(os.str());
    }
    Eigen::Index observed = opt.observed_atom;
    if (observed < 0) psi0.atom_amps.cwiseAbs().maxCoeff(&observed);
    if (observed >= atoms) throw std::invalid_argument("propagate: observed emitter out of range");

    const Eigen::VectorXcd psi = psi0.stacked();
    const Eigen::VectorXd c_re = eig.vectors.transpose() * psi.real();
    const Eigen::VectorXd c_im = eig.vectors.transpose() * psi.imag();

    TimeSeries ts;
    ts.times = times;
    ts.A_j0.resize(times.size());
    ts.norm.resize(times.size());
    ts.field_population.emplace(times.size());
    if (opt.record_all_atoms) ts.all_atom_amps.emplace(times.size());

    const Eigen::Index n_times = static_cast<Eigen::Index>(times.size());
    const Eigen::Index chunk = std::max<Eigen::Index>(1, opt.chunk_elements / std::max<Eigen::Index>(dim, 1));
    Eigen::MatrixXd P_re, P_im, S_re, S_im;
    for (Eigen::Index t0 = 0; t0 < n_times; t0 += chunk) {
        const Eigen::Index nt = std::min(chunk, n_times - t0);
        P_re.resize(dim, nt);
        P_im.resize(dim, nt);
        for (Eigen::Index j = 0; j < nt; ++j) {
            const double t = times[static_cast<std::size_t>(t0 + j)];
            for (Eigen::Index n = 0; n < dim; ++n) {
                const double ph = -eig.values[n] * t;
                const double cs = std::cos(ph), sn = std::sin(ph);
                P_re(n, j) = c_re[n] * cs - c_im[n] * sn;
                P_im(n, j) = c_re[n] * sn + c_im[n] * cs;
            }
        }
        S_re.noalias() = eig.vectors * P_re;
        S_im.noalias() = eig.vectors * P_im;
        for (Eigen::Index j = 0; j < nt; ++j) {
            const auto i = static_cast<std::size_t>(t0 + j);
            const double atom_pop = S_re.col(j).head(atoms).squaredNorm() + S_im.col(j).head(atoms).squaredNorm();
            const double field_pop = S_re.col(j).tail(dim - atoms).squaredNorm() +
                                     S_im.col(j).tail(dim - atoms).squaredNorm();
            ts.A_j0[i] = cplx(S_re(observed, j), S_im(observed, j));
            ts.norm[i] = atom_pop + field_pop;
            (*ts.field_population)[i] = field_pop;
            if (opt.record_all_atoms) {
                Eigen::VectorXcd a(atoms);
                for (Eigen::Index k = 0; k < atoms; ++k) a[k] = cplx(S_re(k, j), S_im(k, j));
                (*ts.all_atom_amps)[i] = std::move(a);
            }
        }
    }
    return ts;
}

// B(t) = sum_m w_m exp(-i l_m t) from eigenvalues and head weights only.
inline std::vector<cplx> survival_amplitude(const ArrowheadSpectrum& sp, const std::vector<double>& times) {
    std::vector<cplx> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        double re = 0.0, im = 0.0;
        for (Eigen::Index m = 0; m < sp.values.size(); ++m) {
            const double ph = -sp.values[m] * times[i];
            re += sp.head_weights[m] * std::cos(ph);
            im += sp.head_weights[m] * std::sin(ph);
        }
        out[i] = cplx(re, im);
    }
    return out;
}

// A_j0(t) = ((M-1)/M) exp(-i Omega t) + B(t)/M with B the bright-mode survival
// amplitude of the reduced problem; the remaining emitters carry (B - exp(-i Omega t))/M
// and the field amplitudes are those of the reduced problem scaled by 1/sqrt(M).
inline TimeSeries amplitude_via_bright_dark(const EnsembleSpec& ens, const DiscretizedBath& bath,
                                            const std::vector<double>& times, bool record_all_atoms = false) {
    validate(ens);
    const EigenSystem reduced = eigendecompose(build_reduced_hamiltonian(ens, bath));
    SingleExcitationState bright;
    bright.atom_amps = Eigen::VectorXcd::Ones(1);
    bright.field_amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(bath.size()));
    const TimeSeries rb = propagate(reduced, bright, times);

    const double m = static_cast<double>(ens.M);
    const double dark = (m - 1.0) / m;
    TimeSeries ts;
    ts.times = times;
    ts.A_j0.resize(times.size());
    ts.norm.resize(times.size());
    ts.field_population.emplace(times.size());
    if (record_all_atoms) ts.all_atom_amps.emplace(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const cplx free_phase = std::polar(1.0, -ens.Omega * times[i]);
        const cplx B = rb.A_j0[i];
        const cplx a0 = dark * free_phase + B / m;
        const cplx other = (B - free_phase) / m;
        const double field = (*rb.field_population)[i] / m;
        ts.A_j0[i] = a0;
        (*ts.field_population)[i] = field;
        ts.norm[i] = std::norm(a0) + (m - 1.0) * std::norm(other) + field;
        if (record_all_atoms) {
            Eigen::VectorXcd a = Eigen::VectorXcd::Constant(ens.M, other);
            a[ens.excited_index()] = a0;
            (*ts.all_atom_amps)[i] = std::move(a);
        }
    }
    return ts;
}

// t, re_A, im_A, abs_A, norm, field_pop with 17 significant digits.
inline void write_csv(const TimeSeries& ts, std::ostream& os) {
    os << "t,re_A,im_A,abs_A,norm,field_pop\n";
    char buf[256];
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double fp = ts.field_population ? (*ts.field_population)[i] : std::nan("");
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ts.times[i], ts.A_j0[i].real(),
                      ts.A_j0[i].imag(), std::abs(ts.A_j0[i]), ts.norm[i], fp);
        os << buf;
    }
}

} // namespace cooptrap
