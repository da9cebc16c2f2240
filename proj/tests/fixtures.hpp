#pragma once

#include <geofuse/mesh.hpp>

#include <Eigen/Geometry>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

namespace fixtures {

namespace fs = std::filesystem;
using namespace geofuse;

/// Fresh scratch directory, removed on destruction.
class TempDir
{
public:
    explicit TempDir(const std::string& tag)
        : m_path(fs::temp_directory_path() / ("geofuse_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(m_path);
        fs::create_directories(m_path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(m_path, ec); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return m_path; }
    fs::path operator/(const std::string& name) const { return m_path / name; }

private:
    fs::path m_path;
};

inline void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline TexturedMesh right_triangle()
{
    Vertices v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    Triangles f(1, 3);
    f << 0, 1, 2;
    return {v, f};
}

inline TexturedMesh unit_tetrahedron()
{
    Vertices v(4, 3);
    v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    v /= std::sqrt(8.0); // edge length 1
    Triangles f(4, 3);
    f << 0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2;
    return {v, f};
}

/// Regular (nx+1) x (ny+1) planar grid in z = 0 with spacing h.
inline TexturedMesh planar_grid(int nx, int ny, double h, double jitter = 0.0, unsigned seed = 7)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-jitter, jitter);
    Vertices v((nx + 1) * (ny + 1), 3);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const bool interior = i > 0 && j > 0 && i < nx && j < ny;
            v.row(j * (nx + 1) + i) << h * (i + (interior ? u(rng) : 0.0)), h * (j + (interior ? u(rng) : 0.0)), 0.0;
        }
    }
    Triangles f(2 * nx * ny, 3);
    int t = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = j * (nx + 1) + i;
            f.row(t++) << a, a + 1, a + nx + 2;
            f.row(t++) << a, a + nx + 2, a + nx + 1;
        }
    }
    return {v, f};
}

/// Deterministic pseudo-random sRGB colors.
inline Colors random_colors(Eigen::Index n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Colors c(n, 3);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
    return c;
}

inline Eigen::Matrix3d random_rotation(unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

inline TexturedMesh rigidly_moved(const TexturedMesh& mesh, unsigned seed, const Eigen::RowVector3d& shift)
{
    const Eigen::Matrix3d r = random_rotation(seed);
    Vertices moved = (mesh.vertices() * r.transpose()).rowwise() + shift;
    return mesh.with_vertices(std::move(moved));
}

/// Same mesh with vertices relabeled by `perm` (new index i holds old perm[i]).
inline TexturedMesh permuted(const TexturedMesh& mesh, const std::vector<int>& perm)
{
    const auto n = static_cast<Eigen::Index>(perm.size());
    std::vector<int> inverse(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = static_cast<int>(i);
    Vertices v(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) v.row(i) = mesh.vertices().row(perm[i]);
    Triangles f = mesh.triangles();
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = inverse[f.data()[i]];
    if (!mesh.has_colors()) return {v, f};
    Colors c(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) c.row(i) = mesh.colors().row(perm[i]);
    return {v, f, c, mesh.colorspace()};
}

inline std::vector<int> shuffled_indices(int n, unsigned seed)
{
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    std::mt19937 rng(seed);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

} // namespace fixtures
