#pragma once

#include <geofuse/laplacian.hpp>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <string>
#include <vector>

namespace geofuse {

struct SolveOptions
{
    /// Column residual bound: |W phi - lambda A phi| <= tol * |W|_inf.
    double tol = 1e-9;
    /// Seed for the random starting block.
    std::uint64_t seed = 20110611;
    /// Krylov block size; 0 picks min(k + 1, 8).
    int block_size = 0;
    int max_restarts = 400;
};

struct SolveReport
{
    int requested_k = 0;
    int k = 0;
    bool dense = false;
    int restarts = 0;
    int operator_applications = 0;
    /// |W phi_i - lambda_i A phi_i| per column.
    Eigen::VectorXd residuals;
    double w_norm = 0.0;
    std::vector<std::string> warnings;
};

///
/// Truncated spectral basis of a Laplacian pair: the K+1 smallest
/// eigenvalues (nondecreasing, nonnegative) and A-orthonormal eigenvectors
/// stored as columns. Each eigenvector's largest-magnitude entry is positive.
///
struct SpectralBasis
{
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd phis;
    Eigen::VectorXd mass;
    SolveReport report;

    Eigen::Index num_vertices() const { return phis.rows(); }
    Eigen::Index num_eigenpairs() const { return lambdas.size(); }
};

/// Smallest k+1 eigenpairs of W phi = lambda A phi. k >= N is clamped to
/// N-1 with a warning. Throws ConvergenceError when the restart cap is hit.
SpectralBasis solve(const LaplacianPair& pair, int k, const SolveOptions& options = {});

/// Same, for an explicit symmetric positive semidefinite W and positive diagonal mass.
SpectralBasis solve_generalized(
    const Eigen::SparseMatrix<double>& W,
    const Eigen::VectorXd& mass,
    int k,
    const SolveOptions& options = {});

/// Flip each column so its entry of largest magnitude (first on ties) is positive.
void normalize_signs(Eigen::MatrixXd& phis);

} // namespace geofuse
