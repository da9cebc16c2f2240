#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <vector>

namespace geofuse {

using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Colors = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

enum class ColorSpace { srgb, lab };

const char* to_string(ColorSpace cs);

///
/// Triangle mesh with optional per-vertex color.
///
/// Construction validates every invariant: indices in range, no repeated
/// index within a triangle, strictly positive triangle area, and a color
/// row per vertex when colors are present. sRGB colors live in [0,1]^3;
/// Lab colors are stored unscaled (L in [0,100]).
///
class TexturedMesh
{
public:
    TexturedMesh(Vertices vertices, Triangles triangles);
    TexturedMesh(Vertices vertices, Triangles triangles, Colors colors, ColorSpace colorspace);

    Eigen::Index num_vertices() const { return m_vertices.rows(); }
    Eigen::Index num_triangles() const { return m_triangles.rows(); }

    const Vertices& vertices() const { return m_vertices; }
    const Triangles& triangles() const { return m_triangles; }

    bool has_colors() const { return m_colors.has_value(); }
    /// Throws ValidationError on a geometry-only mesh.
    const Colors& colors() const;
    ColorSpace colorspace() const { return m_colorspace; }

    /// Same geometry, new colors.
    TexturedMesh with_colors(Colors colors, ColorSpace colorspace) const;
    TexturedMesh without_colors() const;
    /// Same topology and colors, new positions.
    TexturedMesh with_vertices(Vertices vertices) const;

private:
    void validate() const;

    Vertices m_vertices;
    Triangles m_triangles;
    std::optional<Colors> m_colors;
    ColorSpace m_colorspace = ColorSpace::srgb;
};

/// Per-vertex area weights S_j.
using VertexAreas = Eigen::VectorXd;

template <typename DerivedV>
double triangle_area(
    const Eigen::MatrixBase<DerivedV>& a,
    const Eigen::MatrixBase<DerivedV>& b,
    const Eigen::MatrixBase<DerivedV>& c)
{
    const Eigen::Vector3d e1 = (b - a).transpose();
    const Eigen::Vector3d e2 = (c - a).transpose();
    return 0.5 * e1.cross(e2).norm();
}

double surface_area(const TexturedMesh& mesh);

/// Barycentric vertex areas: one third of the area of every incident triangle.
VertexAreas vertex_areas(const TexturedMesh& mesh);

/// Greedy max-min sampling under Euclidean vertex distance, starting from
/// `seed_vertex`. Ties go to the lowest vertex index.
std::vector<int> farthest_point_sample(const TexturedMesh& mesh, int count, int seed_vertex);

double mean_edge_length(const TexturedMesh& mesh);

/// Number of connected components of the triangle adjacency graph over
/// referenced vertices, and the component id of every vertex (-1 when the
/// vertex is unreferenced).
std::pair<int, std::vector<int>> connected_components(const TexturedMesh& mesh);

/// 64-bit FNV-1a content hash of the geometry (and colors, if requested and present).
std::uint64_t content_hash(const TexturedMesh& mesh, bool include_colors);

} // namespace geofuse
