#pragma once

#include <geofuse/spectrum.hpp>

#include <Eigen/Core>

#include <map>
#include <span>
#include <vector>

namespace geofuse {

/// Default HKS time grid (five scales from 1024 to 4096).
std::vector<double> default_hks_times();

/// Heat kernel signature field: values(i, m) = h_{t_m}(x_i, x_i).
struct HksDescriptorField
{
    std::vector<double> times;
    Eigen::MatrixXd values;
    double eta = 0.0;
};

/// Row h_t(source, .) of the truncated heat kernel.
Eigen::VectorXd heat_kernel(const SpectralBasis& basis, double t, int source);

/// Diagonal of the truncated heat kernel at every vertex and time.
HksDescriptorField hks_field(const SpectralBasis& basis, std::span<const double> times, double eta = 0.0);

/// Truncated diffusion distance. The index-0 term vanishes on a connected
/// pair (constant eigenvector); keeping it makes the distance independent of
/// the basis chosen for a multi-dimensional null space.
double diffusion_distance(const SpectralBasis& basis, double t, int i, int j);

/// Mean of diffusion_distance over the times in T.
double averaged_distance(const SpectralBasis& basis, std::span<const double> times, int i, int j);

using BasisByEta = std::map<double, const SpectralBasis*>;

/// (1/|T|) sum_t prod_{eta in H} d_{t,eta}(i, j).
double joint_multiscale_distance(
    const BasisByEta& bases,
    std::span<const double> times,
    std::span<const double> etas,
    int i,
    int j);

///
/// Scaled spectral coordinates of the selected vertices: row r holds
/// e^{-lambda_k t/2} phi_k(sample[r]) for k = 0..K, so diffusion distances
/// are Euclidean distances between rows.
///
Eigen::MatrixXd diffusion_coordinates(const SpectralBasis& basis, double t, std::span<const int> sample);

/// Symmetric matrix of pairwise distances among `sample`, averaged over
/// `times` and multiplied across the bases in `etas` (a single basis with
/// etas = {its eta} gives the averaged distance).
Eigen::MatrixXd multiscale_distance_matrix(
    const BasisByEta& bases,
    std::span<const double> times,
    std::span<const double> etas,
    std::span<const int> sample);

} // namespace geofuse
