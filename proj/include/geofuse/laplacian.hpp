#pragma once

#include <geofuse/embedding.hpp>
#include <geofuse/mesh.hpp>

#include <Eigen/SparseCore>

#include <filesystem>
#include <string>
#include <vector>

namespace geofuse {

enum class LaplacianScheme { cotangent, fused_gaussian };

const char* to_string(LaplacianScheme scheme);

struct AssemblyReport
{
    /// Vertices left without any neighbor after truncation.
    std::vector<int> isolated_vertices;
    /// Connected components of the weight graph.
    int components = 0;
    /// Cotangent edges whose summed weight is negative (not clamped).
    int negative_weights = 0;
    std::vector<std::string> warnings;
};

///
/// Discrete Laplace-Beltrami operator in the form A^{-1} W.
///
/// W is symmetric with zero row sums, nonpositive off-diagonals (always for
/// the fused scheme) and the weight row sums on the diagonal; A is diagonal
/// and positive, stored as a vector.
///
struct LaplacianPair
{
    Eigen::SparseMatrix<double> W;
    Eigen::VectorXd mass;
    LaplacianScheme scheme = LaplacianScheme::fused_gaussian;
    double rho = 0.0;
    double eta = 0.0;
    AssemblyReport report;

    Eigen::Index size() const { return mass.size(); }
};

struct FusedOptions
{
    double rho = 2.0;
    /// Pairs whose Gaussian factor falls below this are dropped.
    double truncation_eps = 1e-7;
    /// Keep every pair (no truncation); O(N^2) storage.
    bool dense = false;
};

///
/// Gaussian-weighted Laplacian over the joint embedding:
///
///     w_ij = S_j exp(-|xi(x_i) - xi(x_j)|^2 / (4 rho)),
///
/// symmetrized as (w_ij + w_ji)/2, with uniform mass a_i = 4 pi rho^2.
/// Since the photometric columns already carry the eta factor, the
/// exponent equals the bilateral form with sigma = rho / eta^2.
///
LaplacianPair assemble_fused(const JointEmbedding& emb, const VertexAreas& areas, const FusedOptions& options = {});

/// Cotangent weights (cot alpha + cot beta)/2 with barycentric masses.
/// Throws ValidationError on non-manifold edges or zero-area vertices.
LaplacianPair assemble_cotangent(const TexturedMesh& mesh, const VertexAreas& areas);

/// A^{-1} W f.
Eigen::VectorXd apply(const LaplacianPair& pair, const Eigen::Ref<const Eigen::VectorXd>& f);

/// Writes `<prefix>_W.mtx` and `<prefix>_A.mtx` in Matrix Market coordinate format.
void write_matrix_market(const LaplacianPair& pair, const std::filesystem::path& prefix);

} // namespace geofuse
