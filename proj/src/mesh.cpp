#include <geofuse/error.hpp>
#include <geofuse/hash.hpp>
#include <geofuse/mesh.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace geofuse {

const char* to_string(ColorSpace cs)
{
    return cs == ColorSpace::srgb ? "srgb" : "lab";
}

TexturedMesh::TexturedMesh(Vertices vertices, Triangles triangles)
    : m_vertices(std::move(vertices))
    , m_triangles(std::move(triangles))
{
    validate();
}

TexturedMesh::TexturedMesh(Vertices vertices, Triangles triangles, Colors colors, ColorSpace colorspace)
    : m_vertices(std::move(vertices))
    , m_triangles(std::move(triangles))
    , m_colors(std::move(colors))
    , m_colorspace(colorspace)
{
    validate();
}

const Colors& TexturedMesh::colors() const
{
    if (!m_colors) throw ValidationError("mesh has no per-vertex colors");
    return *m_colors;
}

TexturedMesh TexturedMesh::with_colors(Colors colors, ColorSpace colorspace) const
{
    return TexturedMesh(m_vertices, m_triangles, std::move(colors), colorspace);
}

TexturedMesh TexturedMesh::without_colors() const
{
    return TexturedMesh(m_vertices, m_triangles);
}

TexturedMesh TexturedMesh::with_vertices(Vertices vertices) const
{
    if (m_colors) return TexturedMesh(std::move(vertices), m_triangles, *m_colors, m_colorspace);
    return TexturedMesh(std::move(vertices), m_triangles);
}

void TexturedMesh::validate() const
{
    const Eigen::Index n = m_vertices.rows();
    if (!m_vertices.allFinite()) throw ValidationError("vertex coordinates must be finite");
    for (Eigen::Index t = 0; t < m_triangles.rows(); ++t) {
        const auto tri = m_triangles.row(t);
        for (int c = 0; c < 3; ++c) {
            if (tri(c) < 0 || tri(c) >= n) {
                throw ValidationError(
                    "triangle " + std::to_string(t) + " index " + std::to_string(tri(c)) +
                    " out of range [0," + std::to_string(n) + ")");
            }
        }
        if (tri(0) == tri(1) || tri(1) == tri(2) || tri(0) == tri(2)) {
            throw ValidationError("triangle " + std::to_string(t) + " is degenerate (repeated index)");
        }
        const double area =
            triangle_area(m_vertices.row(tri(0)), m_vertices.row(tri(1)), m_vertices.row(tri(2)));
        if (!(area > 0.0)) {
            throw ValidationError("triangle " + std::to_string(t) + " has zero area");
        }
    }
    if (m_colors) {
        if (m_colors->rows() != n) {
            throw ValidationError(
                "color count " + std::to_string(m_colors->rows()) + " does not match vertex count " +
                std::to_string(n));
        }
        if (!m_colors->allFinite()) throw ValidationError("colors must be finite");
        if (m_colorspace == ColorSpace::srgb &&
            (m_colors->minCoeff() < 0.0 || m_colors->maxCoeff() > 1.0)) {
            throw ValidationError("sRGB colors must lie in [0,1]");
        }
    }
}

double surface_area(const TexturedMesh& mesh)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    double total = 0.0;
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        total += triangle_area(V.row(F(t, 0)), V.row(F(t, 1)), V.row(F(t, 2)));
    }
    return total;
}

VertexAreas vertex_areas(const TexturedMesh& mesh)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    VertexAreas s = VertexAreas::Zero(V.rows());
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        const double third = triangle_area(V.row(F(t, 0)), V.row(F(t, 1)), V.row(F(t, 2))) / 3.0;
        for (int c = 0; c < 3; ++c) s(F(t, c)) += third;
    }
    return s;
}

std::vector<int> farthest_point_sample(const TexturedMesh& mesh, int count, int seed_vertex)
{
    const auto& V = mesh.vertices();
    const auto n = static_cast<int>(V.rows());
    if (count <= 0) throw InvalidArgument("sample count must be positive");
    if (count > n) {
        throw InvalidArgument(
            "sample count " + std::to_string(count) + " exceeds vertex count " + std::to_string(n));
    }
    if (seed_vertex < 0 || seed_vertex >= n) throw InvalidArgument("seed vertex out of range");

    std::vector<int> picked;
    picked.reserve(count);
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    int current = seed_vertex;
    for (int s = 0; s < count; ++s) {
        picked.push_back(current);
        dist(current) = -1.0;
        int next = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (dist(i) < 0.0) continue;
            const double d = (V.row(i) - V.row(current)).squaredNorm();
            if (d < dist(i)) dist(i) = d;
            if (dist(i) > best) {
                best = dist(i);
                next = i;
            }
        }
        current = next;
    }
    return picked;
}

double mean_edge_length(const TexturedMesh& mesh)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    if (F.rows() == 0) return 0.0;
    double total = 0.0;
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        for (int c = 0; c < 3; ++c) total += (V.row(F(t, c)) - V.row(F(t, (c + 1) % 3))).norm();
    }
    return total / (3.0 * static_cast<double>(F.rows()));
}

namespace {

int find_root(std::vector<int>& parent, int x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

} // namespace

std::pair<int, std::vector<int>> connected_components(const TexturedMesh& mesh)
{
    const auto n = static_cast<int>(mesh.num_vertices());
    const auto& F = mesh.triangles();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> used(n, false);
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        for (int c = 0; c < 3; ++c) {
            used[F(t, c)] = true;
            const int a = find_root(parent, F(t, c));
            const int b = find_root(parent, F(t, (c + 1) % 3));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    std::vector<int> label(n, -1);
    std::vector<int> root_label(n, -1);
    int components = 0;
    for (int i = 0; i < n; ++i) {
        if (!used[i]) continue;
        const int r = find_root(parent, i);
        if (root_label[r] < 0) root_label[r] = components++;
        label[i] = root_label[r];
    }
    return {components, label};
}

std::uint64_t content_hash(const TexturedMesh& mesh, bool include_colors)
{
    Fnv1a h;
    h.update_value(static_cast<std::uint64_t>(mesh.num_vertices()));
    h.update_value(static_cast<std::uint64_t>(mesh.num_triangles()));
    h.update(mesh.vertices().data(), sizeof(double) * mesh.vertices().size());
    h.update(mesh.triangles().data(), sizeof(int) * mesh.triangles().size());
    if (include_colors && mesh.has_colors()) {
        h.update_value(static_cast<std::uint32_t>(mesh.colorspace()));
        h.update(mesh.colors().data(), sizeof(double) * mesh.colors().size());
    }
    return h.digest();
}

} // namespace geofuse
