#pragma once

#include <geofuse/descriptors.hpp>
#include <geofuse/diffusion.hpp>
#include <geofuse/embedding.hpp>
#include <geofuse/laplacian.hpp>
#include <geofuse/mesh.hpp>
#include <geofuse/retrieval.hpp>
#include <geofuse/spectrum.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geofuse {

enum class DescriptorKind {
    hks_bof,
    chks_bof_multiscale,
    color_hist,
    dist_distribution_geometric,
    dist_distribution_joint,
};

const char* to_string(DescriptorKind kind);
DescriptorKind descriptor_kind_from_string(const std::string& s);

struct RunConfig
{
    LaplacianScheme scheme = LaplacianScheme::fused_gaussian;
    double rho = 2.0;
    /// Scales for the multiscale BoF.
    std::vector<double> etas{0.0, 0.05, 0.1};
    /// Scales H for the joint distance distribution.
    std::vector<double> dist_etas{0.0, 0.1, 0.2};
    std::vector<double> times = default_hks_times();
    int k = 200;
    int vocab_size = 48;
    std::uint64_t vocab_seed = 1;
    int fps_count = 2500;
    double color_scale = 1.0;
    PhotometricSpace space = PhotometricSpace::lab;
    double truncation_eps = 1e-7;
    DescriptorKind descriptor = DescriptorKind::chks_bof_multiscale;
    int bins = 64;
    int hist_bins = 8;
    SoftSigmaRule sigma_rule = SoftSigmaRule::median_squared_distance;
    PointWeighting weighting = PointWeighting::area;
    double tol = 1e-9;
    std::uint64_t solver_seed = 20110611;
    /// Worker threads for per-shape work; 0 uses the hardware concurrency.
    int threads = 0;
};

/// Fields absent from `text` keep their value in `base`.
RunConfig run_config_from_json(const std::string& text, const RunConfig& base = {});
std::string run_config_to_json(const RunConfig& config);
/// Throws InvalidArgument on out-of-range settings.
void validate_config(const RunConfig& config);

/// Scales a descriptor kind needs bases for ({} for color_hist).
std::vector<double> required_etas(const RunConfig& config);
bool uses_vocabulary(DescriptorKind kind);

LaplacianPair assemble(const TexturedMesh& mesh, double eta, const RunConfig& config);
SpectralBasis compute_basis(const TexturedMesh& mesh, double eta, const RunConfig& config);

/// Content hash of everything a spectral basis depends on. At eta = 0 (and
/// for the cotangent scheme) colors do not enter the hash.
std::uint64_t spectral_key(const TexturedMesh& mesh, double eta, const RunConfig& config);

///
/// Thread-safe memo of spectral bases keyed by spectral_key, optionally
/// backed by a directory of spectral cache files.
///
class BasisCache
{
public:
    explicit BasisCache(std::optional<std::filesystem::path> directory = {});

    std::shared_ptr<const SpectralBasis> get(const TexturedMesh& mesh, double eta, const RunConfig& config);

    int solves() const;
    int hits() const;

private:
    std::optional<std::filesystem::path> m_directory;
    mutable std::mutex m_mutex;
    std::map<std::uint64_t, std::shared_ptr<const SpectralBasis>> m_bases;
    int m_solves = 0;
    int m_hits = 0;
};

/// One vocabulary per scale, all over the same HKS times.
struct VocabularySet
{
    std::vector<double> times;
    int size = 0;
    std::uint64_t seed = 0;
    std::map<double, Vocabulary> by_eta;

    const Vocabulary& at(double eta) const;
    std::uint64_t hash() const;
};

/// Pools the per-vertex HKS fields of `meshes` for every required scale.
VocabularySet build_vocabulary_set(
    std::span<const TexturedMesh> meshes,
    const RunConfig& config,
    BasisCache& cache);

struct ShapeDescriptor
{
    DescriptorKind kind = DescriptorKind::hks_bof;
    BofByEta bofs;
    DistanceDistribution distribution;
    ColorHistogram histogram;
};

ShapeDescriptor describe(
    const TexturedMesh& mesh,
    const RunConfig& config,
    const VocabularySet* vocab,
    BasisCache& cache);

/// Single-scale L1 for hks_bof, the weighted multiscale distance for
/// chks_bof_multiscale, L1 for histograms, CDF distance for distributions.
double descriptor_distance(const ShapeDescriptor& a, const ShapeDescriptor& b, const RunConfig& config);

struct BenchmarkResult
{
    std::vector<Ranking> rankings;
    EvalReport report;
    std::optional<VocabularySet> vocabulary;
};

///
/// Full pipeline over a manifest. The vocabulary is built from the null
/// shapes unless `vocab` is given.
///
BenchmarkResult run_benchmark(
    const BenchmarkManifest& manifest,
    const RunConfig& config,
    const VocabularySet* vocab = nullptr,
    BasisCache* cache = nullptr);

/// Runs fn(0..n-1) on a small worker pool; rethrows the exception of the
/// lowest failing index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace geofuse
