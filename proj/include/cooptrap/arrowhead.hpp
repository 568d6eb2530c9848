// arrowhead.hpp: symmetric arrowhead matrices and their secular-equation eigensolver
//
//        [ head  z^T ]
//   A =  [  z    D   ]        D = diag(d_1..d_n)
//
// Eigenvalues solve g(l) = l - head - sum_k z_k^2 / (l - d_k) = 0, one root in
// each gap between consecutive distinct poles plus one on either side. Every
// root is carried as (pole index, offset) so differences l - d_j keep full
// relative accuracy; eigenvectors use Loewner-recomputed couplings, which keeps
// them numerically orthogonal even when roots crowd the poles.

#pragma once

#include "cooptrap/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

namespace cooptrap {

struct ArrowheadMatrix {
    double head{0.0};
    Eigen::VectorXd diag;
    Eigen::VectorXd couplings;

    Eigen::Index dim() const noexcept { return diag.size() + 1; }

    Eigen::MatrixXd to_dense() const {
        const Eigen::Index n = diag.size();
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n + 1, n + 1);
        H(0, 0) = head;
        H.block(0, 1, 1, n) = couplings.transpose();
        H.block(1, 0, n, 1) = couplings;
        H.diagonal().tail(n) = diag;
        return H;
    }
};

struct ArrowheadOptions {
    // Poles closer than merge_rel * (spread of the poles) are merged.
    double merge_rel{1e-12};
    // Couplings below deflate_rel * ||A|| are treated as zero.
    double deflate_rel{8.0 * std::numeric_limits<double>::epsilon()};
    int max_iterations{200};
};

struct ArrowheadSpectrum {
    Eigen::VectorXd values;        // ascending
    Eigen::VectorXd head_weights;  // |<head|v_m>|^2
    Eigen::MatrixXd vectors;       // columns, row 0 = head; empty if not requested
};

namespace detail {

// Reduced secular problem with strictly increasing poles and positive couplings.
struct SecularProblem {
    double head{0.0};
    std::vector<double> d;
    std::vector<double> z;
};

struct SecularRoot {
    std::size_t origin{0};
    double offset{0.0};
};

class SecularSolver {
public:
    SecularSolver(const SecularProblem& p, int max_iter) : p_(p), max_iter_(max_iter) {}

    std::vector<SecularRoot> solve() const {
        const std::size_t n = p_.d.size();
        std::vector<SecularRoot> roots;
        roots.reserve(n + 1);
        double znorm2 = 0.0;
        for (double v : p_.z) znorm2 += v * v;
        const double znorm = std::sqrt(znorm2);

        // Below the lowest pole.
        {
            const double lo = std::min(p_.head, p_.d.front()) - 2.0 * znorm;
            roots.push_back(solve_in(0, lo - p_.d.front(), 0.0, /*a_open=*/false, /*b_open=*/true));
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double half = 0.5 * (p_.d[k + 1] - p_.d[k]);
            if (secular(k, half) >= 0.0) {
                roots.push_back(solve_in(k, 0.0, half, true, false));
            } else {
                roots.push_back(solve_in(k + 1, -half, 0.0, false, true));
            }
        }
        {
            const double hi = std::max(p_.head, p_.d.back()) + 2.0 * znorm;
            roots.push_back(solve_in(n - 1, 0.0, hi - p_.d.back(), true, false));
        }
        return roots;
    }

    // g(d_o + tau)
    double secular(std::size_t o, double tau) const {
        double acc = (p_.d[o] - p_.head) + tau;
        for (std::size_t j = 0; j < p_.d.size(); ++j) {
            const double x = (p_.d[o] - p_.d[j]) + tau;
            acc -= p_.z[j] * p_.z[j] / x;
        }
        return acc;
    }

private:
    // F(tau) = tau * g(d_o + tau) is smooth at the origin pole.
    std::pair<double, double> regularized(std::size_t o, double tau, double& g) const {
        double rest = 0.0, drest = 0.0;
        for (std::size_t j = 0; j < p_.d.size(); ++j) {
            if (j == o) continue;
            const double x = (p_.d[o] - p_.d[j]) + tau;
            const double w = p_.z[j] * p_.z[j] / x;
            rest += w;
            drest += w / x;
        }
        const double base = (p_.d[o] - p_.head) + tau - rest;
        const double zo2 = p_.z[o] * p_.z[o];
        const double F = tau * base - zo2;
        const double dF = base + tau * (1.0 + drest);
        g = (tau != 0.0) ? F / tau : -std::numeric_limits<double>::infinity();
        return {F, dF};
    }

    // Root of g on the tau interval (a, b) with g(a) < 0 < g(b).
    SecularRoot solve_in(std::size_t o, double a, double b, bool a_open, bool b_open) const {
        (void)a_open;
        (void)b_open;
        const double eps = std::numeric_limits<double>::epsilon();
        double tau = 0.5 * (a + b);
        for (int it = 0; it < max_iter_; ++it) {
            double g = 0.0;
            const auto [F, dF] = regularized(o, tau, g);
            if (g == 0.0) return {o, tau};
            if (g < 0.0) a = tau; else b = tau;
            if (b - a <= 2.0 * eps * std::max(std::abs(a), std::abs(b))) return {o, 0.5 * (a + b)};
            double next = (dF != 0.0) ? tau - F / dF : 0.5 * (a + b);
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            if (std::abs(next - tau) <= 2.0 * eps * std::abs(tau)) return {o, next};
            tau = next;
        }
        std::ostringstream os;
        os << "secular root did not converge near pole " << o << " (d = " << p_.d[o]
           << ", bracket offsets [" << a << ", " << b << "])";
        throw NumericalError(os.str());
    }

    const SecularProblem& p_;
    int max_iter_;
};

} // namespace detail

// Full eigendecomposition (or eigenvalues and head weights only).
inline ArrowheadSpectrum solve_arrowhead(const ArrowheadMatrix& A, bool want_vectors = true,
                                         const ArrowheadOptions& opt = {}) {
    const Eigen::Index n = A.diag.size();
    if (A.couplings.size() != n) throw std::invalid_argument("arrowhead: coupling/diagonal size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(A.diag[i]) || !std::isfinite(A.couplings[i]))
            throw std::invalid_argument("arrowhead: non-finite entry");
    }
    const Eigen::Index dim = n + 1;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A.diag[a] < A.diag[b]; });

    const double znorm = A.couplings.norm();
    const double dmax = n > 0 ? A.diag.cwiseAbs().maxCoeff() : 0.0;
    const double anorm = std::max({std::abs(A.head), dmax, 1e-300}) + znorm;
    const double spread = n > 0 ? A.diag.maxCoeff() - A.diag.minCoeff() : 0.0;
    const double merge_tol = opt.merge_rel * (spread > 0.0 ? spread : anorm);
    const double deflate_tol = opt.deflate_rel * anorm;

    // Eigenpairs that are fixed before the secular solve (deflated or merged-out
    // modes). Each carries a unit vector in the original mode index space.
    struct Fixed {
        double value;
        std::vector<std::pair<Eigen::Index, double>> comps; // (mode index, component)
    };
    std::vector<Fixed> fixed;

    // One secular pole per group of (near-)coincident coupled modes.
    struct Pole {
        double d;
        double z;                                            // > 0
        std::vector<std::pair<Eigen::Index, double>> dir;    // unit vector onto which z projects
    };
    std::vector<Pole> poles;

    std::size_t i = 0;
    const auto nn = static_cast<std::size_t>(n);
    while (i < nn) {
        std::size_t j = i + 1;
        while (j < nn && A.diag[order[j]] - A.diag[order[j - 1]] < merge_tol) ++j;
        std::vector<Eigen::Index> coupled;
        for (std::size_t k = i; k < j; ++k) {
            const Eigen::Index idx = order[k];
            if (std::abs(A.couplings[idx]) <= deflate_tol) {
                fixed.push_back({A.diag[idx], {{idx, 1.0}}});
            } else {
                coupled.push_back(idx);
            }
        }
        if (coupled.size() == 1) {
            const Eigen::Index idx = coupled.front();
            const double zv = A.couplings[idx];
            poles.push_back({A.diag[idx], std::abs(zv), {{idx, zv > 0 ? 1.0 : -1.0}}});
        } else if (coupled.size() > 1) {
            // Rotate the group so a single combination carries the whole coupling.
            const auto g = static_cast<Eigen::Index>(coupled.size());
            Eigen::VectorXd zg(g), dg(g);
            for (Eigen::Index k = 0; k < g; ++k) {
                zg[k] = A.couplings[coupled[static_cast<std::size_t>(k)]];
                dg[k] = A.diag[coupled[static_cast<std::size_t>(k)]];
            }
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(zg);
            Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(g, g);
            if (Q.col(0).dot(zg) < 0.0) Q.col(0) *= -1.0;
            auto as_comps = [&](const Eigen::VectorXd& v) {
                std::vector<std::pair<Eigen::Index, double>> c;
                for (Eigen::Index k = 0; k < g; ++k) c.emplace_back(coupled[static_cast<std::size_t>(k)], v[k]);
                return c;
            };
            const Eigen::VectorXd q0 = Q.col(0);
            poles.push_back({q0.dot(dg.asDiagonal() * q0), zg.norm(), as_comps(q0)});
            for (Eigen::Index k = 1; k < g; ++k) {
                const Eigen::VectorXd qk = Q.col(k);
                fixed.push_back({qk.dot(dg.asDiagonal() * qk), as_comps(qk)});
            }
        }
        i = j;
    }

    ArrowheadSpectrum out;
    struct Pair {
        double value;
        Eigen::Index col; // column index into `vecs` (or -1 when vectors not wanted)
        double head_weight;
    };
    std::vector<Pair> pairs;
    Eigen::MatrixXd vecs;
    if (want_vectors) vecs = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::Index next_col = 0;

    for (const auto& f : fixed) {
        if (want_vectors) {
            for (const auto& [idx, c] : f.comps) vecs(idx + 1, next_col) = c;
        }
        pairs.push_back({f.value, want_vectors ? next_col : -1, 0.0});
        ++next_col;
    }

    if (poles.empty()) {
        if (want_vectors) vecs(0, next_col) = 1.0;
        pairs.push_back({A.head, want_vectors ? next_col : -1, 1.0});
        ++next_col;
    } else {
        detail::SecularProblem sp;
        sp.head = A.head;
        for (const auto& p : poles) {
            sp.d.push_back(p.d);
            sp.z.push_back(p.z);
        }
        const detail::SecularSolver solver(sp, opt.max_iterations);
        const auto roots = solver.solve();
        const std::size_t np = sp.d.size();

        // d_i - lambda_m with the root's own pole as reference.
        auto pole_minus_root = [&](std::size_t pi, const detail::SecularRoot& r) {
            return (sp.d[pi] - sp.d[r.origin]) - r.offset;
        };

        // Loewner couplings: zhat_i^2 = -prod_m (d_i - l_m) / prod_{j!=i} (d_i - d_j),
        // paired so each ratio stays of order one.
        std::vector<double> zhat(np);
        for (std::size_t p = 0; p < np; ++p) {
            double prod = -pole_minus_root(p, roots[p]) * pole_minus_root(p, roots[p + 1]);
            for (std::size_t m = 0; m < p; ++m)
                prod *= pole_minus_root(p, roots[m]) / (sp.d[p] - sp.d[m]);
            for (std::size_t m = p + 2; m <= np; ++m)
                prod *= pole_minus_root(p, roots[m]) / (sp.d[p] - sp.d[m - 1]);
            zhat[p] = std::sqrt(std::max(prod, 0.0));
        }

        Eigen::VectorXd v(static_cast<Eigen::Index>(np));
        for (std::size_t m = 0; m <= np; ++m) {
            const auto& r = roots[m];
            double norm2 = 1.0;
            for (std::size_t p = 0; p < np; ++p) {
                const double x = -pole_minus_root(p, r); // l_m - d_p
                v[static_cast<Eigen::Index>(p)] = zhat[p] / x;
                norm2 += v[static_cast<Eigen::Index>(p)] * v[static_cast<Eigen::Index>(p)];
            }
            const double inv = 1.0 / std::sqrt(norm2);
            if (want_vectors) {
                vecs(0, next_col) = inv;
                for (std::size_t p = 0; p < np; ++p) {
                    const double c = v[static_cast<Eigen::Index>(p)] * inv;
                    for (const auto& [idx, w] : poles[p].dir) vecs(idx + 1, next_col) += c * w;
                }
            }
            pairs.push_back({sp.d[r.origin] + r.offset, want_vectors ? next_col : -1, inv * inv});
            ++next_col;
        }
    }

    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });
    out.values.resize(dim);
    out.head_weights.resize(dim);
    if (want_vectors) out.vectors.resize(dim, dim);
    for (Eigen::Index m = 0; m < dim; ++m) {
        const auto& p = pairs[static_cast<std::size_t>(m)];
        out.values[m] = p.value;
        out.head_weights[m] = p.head_weight;
        if (want_vectors) out.vectors.col(m) = vecs.col(p.col);
    }
    return out;
}

} // namespace cooptrap
