#include "cooptrap/arrowhead.hpp"
#include "cooptrap/bath.hpp"
#include "cooptrap/eigensystem.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cooptrap;

namespace {

ArrowheadMatrix random_arrowhead(std::mt19937_64& rng, std::size_t n) {
    const auto b = oracle::random_bath(rng, n);
    ArrowheadMatrix A;
    A.head = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    A.diag = Eigen::Map<const Eigen::VectorXd>(b.freqs.data(), static_cast<Eigen::Index>(n));
    A.couplings = Eigen::Map<const Eigen::VectorXd>(b.couplings.data(), static_cast<Eigen::Index>(n));
    return A;
}

ArrowheadMatrix from_bath(const DiscretizedBath& b, double head, double scale = 1.0) {
    ArrowheadMatrix A;
    A.head = head;
    A.diag = Eigen::Map<const Eigen::VectorXd>(b.mode_freqs.data(), static_cast<Eigen::Index>(b.size()));
    A.couplings = scale * Eigen::Map<const Eigen::VectorXd>(b.couplings.data(), static_cast<Eigen::Index>(b.size()));
    return A;
}

void expect_valid_decomposition(const ArrowheadMatrix& A, const EigenSystem& es) {
    const Eigen::MatrixXd H = A.to_dense();
    const double hn = H.norm();
    EXPECT_LT(es.orthonormality_error(), 1e-12);
    EXPECT_LT((H - es.reconstruct()).norm(), 1e-10 * hn);
    for (Eigen::Index i = 1; i < es.dim(); ++i) EXPECT_LE(es.values[i - 1], es.values[i]);
}

} // namespace

TEST(Arrowhead, TwoByTwo) {
    ArrowheadMatrix A{0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)};
    const auto es = eigendecompose(A);
    EXPECT_NEAR(es.values[0], -1.0, 1e-15);
    EXPECT_NEAR(es.values[1], 1.0, 1e-15);
    expect_valid_decomposition(A, es);
}

TEST(Arrowhead, StrictInterlacingAgainstDenseSolver) {
    std::mt19937_64 rng(42);
    const auto A = random_arrowhead(rng, 16);
    const auto es = eigendecompose(A);
    const auto dense = eigendecompose(A.to_dense(), Basis::reduced);
    EXPECT_LT((es.values - dense.values).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(es.values[0], A.diag[0]);
    for (Eigen::Index k = 0; k + 1 < A.diag.size(); ++k) {
        EXPECT_GT(es.values[k + 1], A.diag[k]);
        EXPECT_LT(es.values[k + 1], A.diag[k + 1]);
    }
    EXPECT_GT(es.values[16], A.diag[15]);
    expect_valid_decomposition(A, es);
}

TEST(Arrowhead, RandomInstancesReconstruct) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 2 + rng() % 255;
        const auto A = random_arrowhead(rng, n);
        expect_valid_decomposition(A, eigendecompose(A));
    }
}

TEST(Arrowhead, CoupledCavityGridWithDegeneratePairs) {
    // The ring grid has w(k) = w(-k) exactly; pairs are merged before the solve.
    const auto b = discretize(CoupledCavity{0.0, 1.0, 0.2}, 1024);
    const auto A = from_bath(b, 0.0, std::sqrt(3.0));
    const auto es = eigendecompose(A);
    expect_valid_decomposition(A, es);
    const auto dense = eigendecompose(A.to_dense(), Basis::reduced);
    EXPECT_LT((es.values - dense.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Arrowhead, BandEdgeGridCrowdedRoots) {
    const auto b = discretize(PhotonicCrystalBandEdge{0.0, 1.0, 200.0}, 1024);
    const auto A = from_bath(b, 6.5, std::sqrt(2.0));
    const auto es = eigendecompose(A);
    expect_valid_decomposition(A, es);
}

TEST(Arrowhead, ZeroCouplingsDeflate) {
    ArrowheadMatrix A;
    A.head = 0.3;
    A.diag = Eigen::Vector4d(-1.0, 0.0, 0.5, 2.0);
    A.couplings = Eigen::Vector4d(0.2, 0.0, 0.0, 0.4);
    const auto es = eigendecompose(A);
    expect_valid_decomposition(A, es);
    // Decoupled modes are eigenvalues with unit vectors.
    int hits = 0;
    for (Eigen::Index m = 0; m < es.dim(); ++m) {
        if (std::abs(es.values[m]) < 1e-15 || std::abs(es.values[m] - 0.5) < 1e-15) {
            EXPECT_NEAR(es.vectors.col(m).cwiseAbs().maxCoeff(), 1.0, 1e-15);
            ++hits;
        }
    }
    EXPECT_EQ(hits, 2);
}

TEST(Arrowhead, AllCouplingsZero) {
    ArrowheadMatrix A{0.25, Eigen::Vector3d(-1.0, 0.0, 1.0), Eigen::Vector3d::Zero()};
    const auto es = eigendecompose(A);
    EXPECT_NEAR(es.values[2], 0.25, 0.0);
    expect_valid_decomposition(A, es);
}

TEST(Arrowhead, NearDegenerateAndNegativeCouplings) {
    ArrowheadMatrix A;
    A.head = 0.0;
    A.diag = Eigen::VectorXd(5);
    A.diag << -1.0, 0.2, 0.2 + 1e-15, 0.2 + 2e-15, 1.0;
    A.couplings = Eigen::VectorXd(5);
    A.couplings << 0.3, -0.1, 0.2, 0.05, -0.4;
    const auto es = eigendecompose(A);
    expect_valid_decomposition(A, es);
    const auto dense = eigendecompose(A.to_dense(), Basis::reduced);
    EXPECT_LT((es.values - dense.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Arrowhead, UnsortedInput) {
    ArrowheadMatrix A;
    A.head = 0.1;
    A.diag = Eigen::Vector3d(1.0, -1.0, 0.0);
    A.couplings = Eigen::Vector3d(0.3, 0.2, 0.1);
    expect_valid_decomposition(A, eigendecompose(A));
}

TEST(Arrowhead, ValuesOnlyModeAndHeadWeights) {
    std::mt19937_64 rng(3);
    const auto A = random_arrowhead(rng, 64);
    const auto full = solve_arrowhead(A, true);
    const auto light = solve_arrowhead(A, false);
    EXPECT_EQ(light.vectors.size(), 0);
    EXPECT_LT((full.values - light.values).cwiseAbs().maxCoeff(), 0.0 + 1e-300);
    for (Eigen::Index m = 0; m < full.values.size(); ++m)
        EXPECT_NEAR(light.head_weights[m], full.vectors(0, m) * full.vectors(0, m), 1e-14);
    EXPECT_NEAR(light.head_weights.sum(), 1.0, 1e-13);
}

TEST(Eigendecompose, RejectsNonHermitian) {
    Eigen::Matrix2d H;
    H << 0.0, 1.0, 0.5, 0.0;
    EXPECT_THROW(eigendecompose(Eigen::MatrixXd(H)), std::invalid_argument);
}
