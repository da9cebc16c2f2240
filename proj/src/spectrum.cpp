#include <geofuse/error.hpp>
#include <geofuse/spectrum.hpp>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace geofuse {

namespace {

using Sparse = Eigen::SparseMatrix<double>;

double inf_norm(const Sparse& W)
{
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(W.rows());
    for (int col = 0; col < W.outerSize(); ++col) {
        for (Sparse::InnerIterator it(W, col); it; ++it) row_sums(it.row()) += std::abs(it.value());
    }
    return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

/// Shift-inverted operator (C - sigma I)^{-1}.
class ShiftInvert
{
public:
    ShiftInvert(const Sparse& C, double sigma)
    {
        Sparse shifted = C;
        for (Eigen::Index i = 0; i < C.rows(); ++i) shifted.coeffRef(i, i) -= sigma;
        m_solver.compute(shifted);
        if (m_solver.info() != Eigen::Success) {
            throw ConvergenceError("factorization of the shifted operator failed");
        }
    }

    Eigen::MatrixXd operator()(const Eigen::Ref<const Eigen::MatrixXd>& X)
    {
        m_applications += static_cast<int>(X.cols());
        return m_solver.solve(X);
    }

    int applications() const { return m_applications; }

private:
    Eigen::SimplicialLDLT<Sparse, Eigen::Lower, Eigen::AMDOrdering<int>> m_solver;
    int m_applications = 0;
};

/// Orthonormalize the columns of `P` against the first `cols` columns of `V`
/// and against each other (two passes of classical Gram-Schmidt). Columns
/// that vanish are replaced by fresh random directions.
void orthonormalize_block(
    const Eigen::MatrixXd& V,
    Eigen::Index cols,
    Eigen::Ref<Eigen::MatrixXd> P,
    std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    const auto basis = V.leftCols(cols);
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
        for (int attempt = 0;; ++attempt) {
            auto p = P.col(c);
            const double before = p.norm();
            for (int pass = 0; pass < 2; ++pass) {
                if (cols > 0) p -= basis * (basis.transpose() * p);
                if (c > 0) p -= P.leftCols(c) * (P.leftCols(c).transpose() * p);
            }
            const double after = p.norm();
            if (after > 1e-10 * before && after > 0.0) {
                p /= after;
                break;
            }
            if (attempt > 8) throw ConvergenceError("cannot extend the Krylov basis");
            for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = normal(rng);
        }
    }
}

struct Eigenpairs
{
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // orthonormal, for the symmetric form C
};

Eigenpairs dense_smallest(const Sparse& C, int nev)
{
    const Eigen::MatrixXd dense = Eigen::MatrixXd(C);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
    return {es.eigenvalues().head(nev), es.eigenvectors().leftCols(nev)};
}

/// Number of eigenvalues of C strictly below tau from the LDL^T inertia;
/// -1 when the indefinite factorization breaks down.
int count_below(const Sparse& C, double tau)
{
    Sparse shifted = C;
    for (Eigen::Index i = 0; i < C.rows(); ++i) shifted.coeffRef(i, i) -= tau;
    Eigen::SimplicialLDLT<Sparse, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) return -1;
    const Eigen::VectorXd d = ldlt.vectorD();
    if (!d.allFinite()) return -1;
    return static_cast<int>((d.array() < 0.0).count());
}

struct KrylovResult
{
    Eigenpairs pairs;
    int restarts = 0;
    int applications = 0;
};

///
/// Thick-restart block Krylov-Schur on (C - sigma I)^{-1}. The largest Ritz
/// values of the inverted operator are the smallest eigenvalues of C.
/// Convergence is judged on the residual of C itself, mapped back to the
/// generalized form through the mass scaling.
///
KrylovResult krylov_smallest(
    const Sparse& C,
    const Eigen::VectorXd& sqrt_mass,
    double w_norm,
    int nev,
    int block,
    int subspace,
    const SolveOptions& options,
    std::uint64_t seed)
{
    const Eigen::Index n = C.rows();
    const double mean_diag = C.diagonal().sum() / static_cast<double>(n);
    const double sigma = -(mean_diag > 0.0 ? 1e-3 * mean_diag : 1.0);
    ShiftInvert op(C, sigma);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;

    Eigen::MatrixXd V(n, subspace + block);
    Eigen::MatrixXd OpV(n, subspace + block);
    Eigen::MatrixXd start(n, block);
    for (Eigen::Index i = 0; i < start.size(); ++i) start.data()[i] = normal(rng);
    orthonormalize_block(V, 0, start, rng);
    V.leftCols(block) = start;
    OpV.leftCols(block) = op(start);
    Eigen::Index cols = block;

    const double threshold = options.tol * w_norm;
    KrylovResult result;
    for (int restart = 0;; ++restart) {
        while (cols + block <= subspace) {
            Eigen::MatrixXd next = OpV.middleCols(cols - block, block);
            orthonormalize_block(V, cols, next, rng);
            V.middleCols(cols, block) = next;
            OpV.middleCols(cols, block) = op(next);
            cols += block;
        }

        Eigen::MatrixXd T = V.leftCols(cols).transpose() * OpV.leftCols(cols);
        T = 0.5 * (T + T.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        if (es.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz eigensolver failed");
        // Descending Ritz values of the inverted operator.
        const Eigen::MatrixXd Y = es.eigenvectors().rowwise().reverse();

        const Eigen::MatrixXd ritz = V.leftCols(cols) * Y.leftCols(nev);
        const Eigen::MatrixXd Cy = C * ritz;
        Eigen::VectorXd lambdas(nev);
        bool converged = true;
        for (int j = 0; j < nev; ++j) {
            lambdas(j) = ritz.col(j).dot(Cy.col(j));
            const double residual = sqrt_mass.cwiseProduct(Cy.col(j) - lambdas(j) * ritz.col(j)).norm();
            if (!(residual <= threshold)) converged = false;
        }
        if (converged) {
            result.pairs = {lambdas, ritz};
            result.restarts = restart;
            result.applications = op.applications();
            return result;
        }
        if (restart >= options.max_restarts) {
            throw ConvergenceError(
                "eigensolver did not converge after " + std::to_string(restart) + " restarts");
        }

        // Continuation block: the part of Op(last block) outside the current basis.
        Eigen::MatrixXd pending = OpV.middleCols(cols - block, block);
        orthonormalize_block(V, cols, pending, rng);

        const auto keep = static_cast<Eigen::Index>(
            std::min<Eigen::Index>(cols - block, nev + (cols - nev) / 2));
        const Eigen::MatrixXd kept_v = V.leftCols(cols) * Y.leftCols(keep);
        const Eigen::MatrixXd kept_opv = OpV.leftCols(cols) * Y.leftCols(keep);
        V.leftCols(keep) = kept_v;
        OpV.leftCols(keep) = kept_opv;
        V.middleCols(keep, block) = pending;
        OpV.middleCols(keep, block) = op(pending);
        cols = keep + block;
    }
}

} // namespace

void normalize_signs(Eigen::MatrixXd& phis)
{
    for (Eigen::Index c = 0; c < phis.cols(); ++c) {
        Eigen::Index best = 0;
        double magnitude = -1.0;
        for (Eigen::Index i = 0; i < phis.rows(); ++i) {
            if (std::abs(phis(i, c)) > magnitude) {
                magnitude = std::abs(phis(i, c));
                best = i;
            }
        }
        if (phis(best, c) < 0.0) phis.col(c) *= -1.0;
    }
}

SpectralBasis solve_generalized(const Sparse& W, const Eigen::VectorXd& mass, int k, const SolveOptions& options)
{
    const Eigen::Index n = W.rows();
    if (W.cols() != n || mass.size() != n) throw InvalidArgument("W and mass dimensions disagree");
    if (n < 2) throw InvalidArgument("need at least two vertices");
    if (k < 0) throw InvalidArgument("k must be nonnegative");
    if (!(mass.minCoeff() > 0.0)) throw InvalidArgument("mass entries must be positive");
    if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");

    SpectralBasis basis;
    basis.report.requested_k = k;
    if (k > n - 1) {
        basis.report.warnings.push_back(
            "requested k=" + std::to_string(k) + " exceeds N-1; clamped to " + std::to_string(n - 1));
        k = static_cast<int>(n - 1);
    }
    basis.report.k = k;
    const int nev = k + 1;

    const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd sqrt_mass = mass.cwiseSqrt();
    Sparse C = inv_sqrt.asDiagonal() * W;
    C = C * inv_sqrt.asDiagonal();
    C.prune(0.0);
    const double w_norm = inf_norm(W);
    basis.report.w_norm = w_norm;

    const int block = options.block_size > 0 ? std::min(options.block_size, nev) : std::min(nev, 8);
    const int subspace = nev + std::max(nev, 4 * block);

    Eigenpairs pairs;
    if (subspace + block >= n) {
        pairs = dense_smallest(C, nev);
        basis.report.dense = true;
    } else {
        // A single Krylov block only sees min(block, multiplicity) copies of a
        // repeated eigenvalue; the inertia count detects misses and triggers
        // a retry with a wider block.
        int attempt_block = block;
        for (int attempt = 0;; ++attempt) {
            auto result = krylov_smallest(
                C, sqrt_mass, w_norm, nev, attempt_block, nev + std::max(nev, 4 * attempt_block), options,
                options.seed + static_cast<std::uint64_t>(attempt));
            basis.report.restarts += result.restarts;
            basis.report.operator_applications += result.applications;
            pairs = std::move(result.pairs);

            std::vector<int> order(nev);
            for (int i = 0; i < nev; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) { return pairs.values(a) < pairs.values(b); });
            const double top = pairs.values(order.back());
            const double tau = top - 1e-8 * std::max(std::abs(top), 1e-300);
            int found_below = 0;
            for (int i = 0; i < nev; ++i) found_below += pairs.values(i) < tau;
            const int below = count_below(C, tau);
            if (below < 0 || below <= found_below) break;
            if (attempt >= 2 || 2 * attempt_block + nev + std::max(nev, 8 * attempt_block) >= n) {
                basis.report.warnings.push_back(
                    "inertia count reports " + std::to_string(below - found_below) +
                    " eigenvalues missed below the computed range");
                break;
            }
            attempt_block *= 2;
        }
    }

    std::vector<int> order(nev);
    for (int i = 0; i < nev; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pairs.values(a) < pairs.values(b); });

    basis.lambdas.resize(nev);
    basis.phis.resize(n, nev);
    const double scale = std::max(std::abs(pairs.values.maxCoeff()), 1e-300);
    for (int i = 0; i < nev; ++i) {
        double lambda = pairs.values(order[i]);
        if (lambda < 0.0) {
            if (lambda < -1e-8 * scale) {
                basis.report.warnings.push_back("negative eigenvalue " + std::to_string(lambda) + " clamped to 0");
            }
            lambda = 0.0;
        }
        basis.lambdas(i) = lambda;
        basis.phis.col(i) = inv_sqrt.cwiseProduct(pairs.vectors.col(order[i]));
    }
    normalize_signs(basis.phis);
    basis.mass = mass;

    basis.report.residuals.resize(nev);
    for (int i = 0; i < nev; ++i) {
        basis.report.residuals(i) =
            (W * basis.phis.col(i) - basis.lambdas(i) * mass.cwiseProduct(basis.phis.col(i))).norm();
    }
    return basis;
}

SpectralBasis solve(const LaplacianPair& pair, int k, const SolveOptions& options)
{
    return solve_generalized(pair.W, pair.mass, k, options);
}

} // namespace geofuse
