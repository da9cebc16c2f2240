#pragma once

#include <geofuse/mesh.hpp>
#include <geofuse/retrieval.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace geofuse {

enum class PrimitiveKind { icosphere, torus, capsule };
enum class TexturePattern { none, uniform, stripes, checker };

const char* to_string(PrimitiveKind k);
const char* to_string(TexturePattern p);
PrimitiveKind primitive_kind_from_string(const std::string& s);
TexturePattern texture_pattern_from_string(const std::string& s);

///
/// Watertight analytic mesh with a procedural sRGB texture.
///
/// `resolution` is the subdivision level for the icosphere (10 * 4^r + 2
/// vertices) and a ring-density multiplier for the torus and the capsule.
/// `scale` is the sphere radius, the torus major radius, and the capsule
/// cap radius times two.
///
TexturedMesh make_primitive(PrimitiveKind kind, int resolution, TexturePattern pattern, double scale = 1.0);

TexturedMesh make_icosphere(int subdivisions, double radius);
TexturedMesh make_torus(double major_radius, double minor_radius, int segments_u, int segments_v);
TexturedMesh make_capsule(double radius, double half_length, int segments, int cap_rings, int body_rings);

/// Color `mesh` with a procedural pattern evaluated at positions / scale.
TexturedMesh apply_texture(const TexturedMesh& mesh, TexturePattern pattern, double scale);

// ---------------------------------------------------------------------------
// Photometric transformations (applied in Lab)

enum class PhotometricKind { contrast, brightness, hue, saturation, color_noise };

const char* to_string(PhotometricKind k);

/// Per-strength parameters; index s-1 for strength s.
struct PhotometricTables
{
    std::array<double, 5> contrast{0.9, 0.8, 0.65, 0.5, 0.35};
    std::array<double, 5> brightness{5, 10, 20, 30, 40};
    std::array<double, 5> hue{5, 10, 20, 30, 40};
    std::array<double, 5> saturation{0.85, 0.7, 0.55, 0.4, 0.25};
    std::array<double, 5> noise_sigma{2, 4, 8, 12, 16};

    /// Every strength maps to the identity transform.
    static PhotometricTables identity();
};

struct PhotometricTransform
{
    PhotometricKind kind = PhotometricKind::hue;
    int strength = 1;
    std::uint64_t seed = 0;
};

///
/// Returns a Lab-tagged mesh with bit-identical geometry:
/// contrast L <- clamp(50 + c (L - 50)), brightness L <- clamp(L + b),
/// hue a <- a + h, saturation (a, b) <- s (a, b), noise adds N(0, sigma^2)
/// per channel. Noise is drawn per vertex from (seed, position), so the
/// transform commutes with vertex permutation.
///
TexturedMesh apply_photometric(
    const TexturedMesh& mesh,
    const PhotometricTransform& transform,
    const PhotometricTables& tables = {});

// ---------------------------------------------------------------------------
// Geometric perturbations

enum class GeometricKind { rigid, vertex_jitter, hole_cut };

const char* to_string(GeometricKind k);

struct GeometricOptions
{
    /// Jitter sigma = strength * jitter_scale * mean edge length.
    double jitter_scale = 0.05;
    /// Hole radius = strength * hole_scale * mean edge length.
    double hole_scale = 1.5;
};

TexturedMesh apply_geometric(
    const TexturedMesh& mesh,
    GeometricKind kind,
    double strength,
    std::uint64_t seed,
    const GeometricOptions& options = {});

// ---------------------------------------------------------------------------
// Benchmark generation

struct NullShapeSpec
{
    std::string shape_id;
    PrimitiveKind kind = PrimitiveKind::icosphere;
    int resolution = 3;
    TexturePattern pattern = TexturePattern::stripes;
    double scale = 1.0;
};

struct GeneratorConfig
{
    std::uint64_t seed = 1;
    std::vector<NullShapeSpec> nulls;
    std::vector<TransformClass> classes;
    std::vector<int> strengths{1, 2, 3, 4, 5};
    PhotometricTables tables;
    GeometricOptions geometric;

    /// Five nulls, every transform class, strengths 1..5.
    static GeneratorConfig default_config();
};

GeneratorConfig generator_config_from_json(const std::string& text);
std::string generator_config_to_json(const GeneratorConfig& config);

/// Query mesh for one (null, class, strength) cell with its own RNG stream.
TexturedMesh make_query(
    const TexturedMesh& null_shape,
    TransformClass transform_class,
    int strength,
    std::uint64_t seed,
    const GeneratorConfig& config);

/// Writes nulls/, queries/ and manifest.json under `out_dir`.
BenchmarkManifest build_benchmark(const GeneratorConfig& config, const std::filesystem::path& out_dir);

/// splitmix64 finalizer used to derive independent RNG streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

} // namespace geofuse
