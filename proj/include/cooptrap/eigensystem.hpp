// eigensystem.hpp: eigendecompositions of the single-excitation Hamiltonian

#pragma once

#include "cooptrap/arrowhead.hpp"
#include "cooptrap/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace cooptrap {

enum class Basis { full, reduced };

inline const char* to_string(Basis b) { return b == Basis::full ? "full" : "reduced"; }

// H = U diag(values) U^T with U real orthogonal. The first `atoms` rows of U
// are emitter amplitudes (M for the full basis, 1 bright mode for the reduced one).
struct EigenSystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Basis basis{Basis::full};
    Eigen::Index atoms{1};

    Eigen::Index dim() const noexcept { return values.size(); }

    double orthonormality_error() const {
        const Eigen::MatrixXd G = vectors.transpose() * vectors;
        return (G - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
    }

    Eigen::MatrixXd reconstruct() const {
        return vectors * values.asDiagonal() * vectors.transpose();
    }
};

// Dense symmetric solver. Used as the general path and as the test oracle.
inline EigenSystem eigendecompose(const Eigen::MatrixXd& H, Basis basis = Basis::full, Eigen::Index atoms = 1) {
    if (H.rows() != H.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
    const double scale = std::max(H.cwiseAbs().maxCoeff(), 1e-300);
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
        throw std::invalid_argument("eigendecompose: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecompose: dense eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors(), basis, atoms};
}

inline EigenSystem eigendecompose(const ArrowheadMatrix& A, const ArrowheadOptions& opt = {}) {
    auto sp = solve_arrowhead(A, true, opt);
    return {std::move(sp.values), std::move(sp.vectors), Basis::reduced, 1};
}

// Full (M + N) eigensystem assembled from the bright-mode arrowhead problem and
// an explicit orthonormal basis of the (M-1)-dimensional dark space at Omega.
inline EigenSystem eigendecompose_ensemble(const EnsembleSpec& ens, const DiscretizedBath& bath,
                                           const ArrowheadOptions& opt = {}) {
    const ArrowheadMatrix A = build_reduced_hamiltonian(ens, bath);
    const auto sp = solve_arrowhead(A, true, opt);
    const Eigen::Index M = ens.M;
    const Eigen::Index N = A.diag.size();
    const Eigen::Index dim = M + N;
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));

    Eigen::VectorXd values(dim);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(dim, dim);

    // Merge the bright spectrum (ascending) with the M-1 dark levels at Omega.
    Eigen::Index col = 0, b = 0;
    Eigen::Index dark_left = M - 1;
    auto put_dark = [&](Eigen::Index k) {
        // Helmert vector: (1,..,1,-k,0..)/sqrt(k(k+1)), k = 1..M-1.
        const double c = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
        for (Eigen::Index j = 0; j < k; ++j) U(j, col) = c;
        U(k, col) = -static_cast<double>(k) * c;
        values[col++] = ens.Omega;
    };
    while (b < sp.values.size() || dark_left > 0) {
        const bool take_dark = dark_left > 0 && (b >= sp.values.size() || ens.Omega <= sp.values[b]);
        if (take_dark) {
            put_dark(M - dark_left);
            --dark_left;
        } else {
            const double head = sp.vectors(0, b) * inv_sqrt_m;
            for (Eigen::Index j = 0; j < M; ++j) U(j, col) = head;
            U.block(M, col, N, 1) = sp.vectors.block(1, b, N, 1);
            values[col++] = sp.values[b];
            ++b;
        }
    }
    return {std::move(values), std::move(U), Basis::full, M};
}

} // namespace cooptrap
