#pragma once

#include <geofuse/diffusion.hpp>
#include <geofuse/mesh.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace geofuse {

// ---------------------------------------------------------------------------
// Bag of features

/// How the soft-assignment variance is derived from the cluster centers.
enum class SoftSigmaRule {
    /// 2 x median of squared pairwise center distances (unit-consistent).
    median_squared_distance,
    /// 2 x median of pairwise center distances, taken literally.
    median_distance,
};

struct Vocabulary
{
    Eigen::MatrixXd centers; ///< V x n, one word per row
    double soft_sigma2 = 1.0;

    Eigen::Index size() const { return centers.rows(); }
    Eigen::Index dimension() const { return centers.cols(); }
};

struct VocabularyOptions
{
    int max_iterations = 300;
    SoftSigmaRule sigma_rule = SoftSigmaRule::median_squared_distance;
};

///
/// k-means (k-means++ seeding, Lloyd iterations) over the pooled per-vertex
/// descriptors of all fields. Deterministic for a fixed seed. Throws
/// InvalidArgument when fewer than `v` distinct descriptors are available.
///
Vocabulary build_vocabulary(
    std::span<const HksDescriptorField> fields,
    int v,
    std::uint64_t seed,
    const VocabularyOptions& options = {});

/// Same, over an explicit descriptor matrix (one descriptor per row).
Vocabulary build_vocabulary(
    const Eigen::Ref<const Eigen::MatrixXd>& descriptors,
    int v,
    std::uint64_t seed,
    const VocabularyOptions& options = {});

double soft_sigma2_from_centers(const Eigen::MatrixXd& centers, SoftSigmaRule rule);

/// theta_k proportional to exp(-|p - c_k|^2 / (2 soft_sigma2)), L1-normalized.
Eigen::VectorXd soft_quantize(const Vocabulary& vocab, const Eigen::Ref<const Eigen::VectorXd>& descriptor);

enum class PointWeighting { area, uniform };

struct BagOfFeatures
{
    Eigen::VectorXd weights;
    double eta = 0.0;
};

/// L1-normalized sum of per-vertex soft assignments weighted by vertex area.
BagOfFeatures bag_of_features(
    const Vocabulary& vocab,
    const HksDescriptorField& field,
    const VertexAreas& areas,
    PointWeighting weighting = PointWeighting::area);

/// |b1 - b2|_1
double bof_distance_single(const BagOfFeatures& b1, const BagOfFeatures& b2);

using BofByEta = std::map<double, BagOfFeatures>;

/// |BoF^0_X - BoF^0_Y|_1^2 + sum_{eta > 0} eta |BoF^eta_X - BoF^eta_Y|_1^2
double bof_distance_multiscale(const BofByEta& x, const BofByEta& y, std::span<const double> etas);

// ---------------------------------------------------------------------------
// Distance distributions

/// Binned cumulative distribution of pairwise distances. cdf[b] is the
/// weighted fraction of pairs with distance <= bin_edges[b + 1].
struct DistanceDistribution
{
    std::vector<double> bin_edges;
    std::vector<double> cdf;

    /// Right-continuous step function: mass of bin b sits at its upper edge.
    double evaluate(double delta) const;
};

using PairDistance = std::function<double(int, int)>;

DistanceDistribution distance_distribution(
    const PairDistance& dist,
    std::span<const int> sample,
    const VertexAreas& areas,
    int bins);

/// Same, with distances taken from a precomputed symmetric matrix indexed
/// by position in `sample`.
DistanceDistribution distance_distribution_from_matrix(
    const Eigen::Ref<const Eigen::MatrixXd>& distances,
    std::span<const int> sample,
    const VertexAreas& areas,
    int bins);

/// Integral of |F1 - F2| over the union of both bin grids, divided by its span.
double distribution_distance(const DistanceDistribution& f1, const DistanceDistribution& f2);

// ---------------------------------------------------------------------------
// Color histogram

struct ColorHistogram
{
    int bins_per_axis = 0;
    /// Flattened (L, a, b) grid, index = (iL * n + ia) * n + ib.
    Eigen::VectorXd weights;
};

/// Area-weighted Lab histogram over L in [0,100] and a, b in [-128,128].
ColorHistogram color_histogram(
    const TexturedMesh& mesh,
    const VertexAreas& areas,
    int bins_per_axis,
    PointWeighting weighting = PointWeighting::area);

double color_histogram_distance(const ColorHistogram& h1, const ColorHistogram& h2);

} // namespace geofuse
