// hamiltonian.hpp: single-excitation sector of M identical emitters + discretized bath

#pragma once

#include "cooptrap/arrowhead.hpp"
#include "cooptrap/bath.hpp"
#include "cooptrap/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace cooptrap {

struct EnsembleSpec {
    int M{1};
    double Omega{0.0};
    int j0{1}; // 1-based index of the initially excited emitter

    std::size_t atoms() const noexcept { return static_cast<std::size_t>(M); }
    Eigen::Index excited_index() const noexcept { return static_cast<Eigen::Index>(j0 - 1); }
};

inline std::vector<std::string> validation_issues(const EnsembleSpec& e) {
    std::vector<std::string> issues;
    if (e.M < 1) issues.emplace_back("M must be >= 1 (got " + std::to_string(e.M) + ")");
    if (!std::isfinite(e.Omega)) issues.emplace_back("Omega must be finite");
    if (e.j0 < 1 || (e.M >= 1 && e.j0 > e.M))
        issues.emplace_back("j0 must lie in [1, M] (got " + std::to_string(e.j0) + ")");
    return issues;
}

inline void validate(const EnsembleSpec& e) {
    auto issues = validation_issues(e);
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

// Amplitudes A_j on |..e_j..,0> and C_k on |g..g,1_k>.
struct SingleExcitationState {
    Eigen::VectorXcd atom_amps;
    Eigen::VectorXcd field_amps;

    static SingleExcitationState excited(const EnsembleSpec& ens, std::size_t n_modes) {
        validate(ens);
        SingleExcitationState s;
        s.atom_amps = Eigen::VectorXcd::Zero(ens.M);
        s.field_amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_modes));
        s.atom_amps[ens.excited_index()] = 1.0;
        return s;
    }

    double norm_squared() const { return atom_amps.squaredNorm() + field_amps.squaredNorm(); }

    Eigen::VectorXcd stacked() const {
        Eigen::VectorXcd v(atom_amps.size() + field_amps.size());
        v << atom_amps, field_amps;
        return v;
    }
};

inline void check_bath(const DiscretizedBath& bath) {
    if (bath.mode_freqs.size() != bath.couplings.size())
        throw std::invalid_argument("discretized bath: frequency/coupling length mismatch");
}

// Row/column order: emitters 0..M-1, then modes M..M+N-1.
inline Eigen::MatrixXd build_full_hamiltonian(const EnsembleSpec& ens, const DiscretizedBath& bath) {
    validate(ens);
    check_bath(bath);
    const Eigen::Index M = ens.M;
    const auto N = static_cast<Eigen::Index>(bath.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M + N, M + N);
    for (Eigen::Index j = 0; j < M; ++j) H(j, j) = ens.Omega;
    for (Eigen::Index k = 0; k < N; ++k) {
        const double wk = bath.mode_freqs[static_cast<std::size_t>(k)];
        const double vk = bath.couplings[static_cast<std::size_t>(k)];
        H(M + k, M + k) = wk;
        for (Eigen::Index j = 0; j < M; ++j) {
            H(j, M + k) = vk;
            H(M + k, j) = vk;
        }
    }
    return H;
}

// Bright mode (1/sqrt(M)) sum_j |e_j> coupled to every bath mode with sqrt(M) V_k.
inline ArrowheadMatrix build_reduced_hamiltonian(const EnsembleSpec& ens, const DiscretizedBath& bath) {
    validate(ens);
    check_bath(bath);
    const auto N = static_cast<Eigen::Index>(bath.size());
    const double enhance = std::sqrt(static_cast<double>(ens.M));
    ArrowheadMatrix A;
    A.head = ens.Omega;
    A.diag.resize(N);
    A.couplings.resize(N);
    for (Eigen::Index k = 0; k < N; ++k) {
        A.diag[k] = bath.mode_freqs[static_cast<std::size_t>(k)];
        A.couplings[k] = enhance * bath.couplings[static_cast<std::size_t>(k)];
    }
    return A;
}

} // namespace cooptrap
