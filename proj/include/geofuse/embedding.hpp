#pragma once

#include <geofuse/mesh.hpp>

#include <Eigen/Core>

namespace geofuse {

using EmbeddingCoords = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor>;

/// Joint geometric-photometric coordinates: columns 0-2 are the vertex
/// positions, columns 3-5 the scaled photometric coordinates eta * color.
struct JointEmbedding
{
    EmbeddingCoords coords;
    double eta = 0.0;

    Eigen::Index size() const { return coords.rows(); }
    auto geometric() const { return coords.leftCols<3>(); }
    auto photometric() const { return coords.rightCols<3>(); }
};

/// Which color coordinates feed the photometric block.
enum class PhotometricSpace {
    lab,      ///< CIELAB, the default
    raw_srgb, ///< sRGB in [0,1], for ablations only
};

struct EmbeddingOptions
{
    /// Photometric coordinates are color / color_scale before the eta factor.
    double color_scale = 1.0;
    PhotometricSpace space = PhotometricSpace::lab;
};

/// Mesh colors converted to Lab (identity for Lab-tagged meshes).
Colors colors_as_lab(const TexturedMesh& mesh);

/// Throws InvalidArgument for eta < 0, a non-positive color scale, or eta > 0
/// on a mesh without colors.
JointEmbedding build_embedding(const TexturedMesh& mesh, double eta, const EmbeddingOptions& options = {});

} // namespace geofuse
