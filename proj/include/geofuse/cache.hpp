#pragma once

#include <geofuse/pipeline.hpp>
#include <geofuse/spectrum.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace geofuse {

///
/// Spectral cache file: the magic "GFSPEC01", a little-endian u64 header
/// length, a JSON header and then raw little-endian doubles (lambdas, mass,
/// phis column-major).
///
struct SpectralCacheHeader
{
    std::string scheme;
    double rho = 0.0;
    double eta = 0.0;
    int requested_k = 0;
    int k = 0;
    std::int64_t num_vertices = 0;
    double color_scale = 1.0;
    std::string space;
    double truncation_eps = 0.0;
    double tol = 0.0;
    std::uint64_t solver_seed = 0;
    std::string mesh_hash;
    std::string key;
    std::vector<std::string> warnings;
};

SpectralCacheHeader make_spectral_header(
    const TexturedMesh& mesh,
    double eta,
    const RunConfig& config,
    const SpectralBasis& basis);

void write_spectral_cache(
    const std::filesystem::path& path,
    const SpectralCacheHeader& header,
    const SpectralBasis& basis);

/// Reads only the header; nullopt when the file is missing or not a cache.
std::optional<SpectralCacheHeader> read_spectral_header(const std::filesystem::path& path);

SpectralBasis read_spectral_cache(const std::filesystem::path& path, SpectralCacheHeader* header = nullptr);

std::string vocabulary_set_json(const VocabularySet& vocab);
VocabularySet parse_vocabulary_set(const std::string& text);
void write_vocabulary_set(const std::filesystem::path& path, const VocabularySet& vocab);
/// IoError naming the path when it does not exist.
VocabularySet read_vocabulary_set(const std::filesystem::path& path);

/// {type, params, payload, mesh_hash, vocab_hash}
std::string descriptor_json(
    const ShapeDescriptor& descriptor,
    const RunConfig& config,
    const std::string& mesh_hash,
    const std::optional<std::string>& vocab_hash);

ShapeDescriptor parse_descriptor(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace geofuse
