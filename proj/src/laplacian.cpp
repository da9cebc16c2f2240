#include <geofuse/error.hpp>
#include <geofuse/laplacian.hpp>

#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace geofuse {

const char* to_string(LaplacianScheme scheme)
{
    return scheme == LaplacianScheme::cotangent ? "cotangent" : "fused_gaussian";
}

namespace {

using Triplet = Eigen::Triplet<double>;

/// Uniform hash grid over 3D points for fixed-radius neighbor queries.
class PointGrid
{
public:
    PointGrid(const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>>& points, double cell)
        : m_cell(cell)
    {
        m_origin = points.colwise().minCoeff().transpose();
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            m_cells[key(cell_of(points.row(i).transpose()))].push_back(static_cast<int>(i));
        }
    }

    template <typename Visitor>
    void for_each_near(const Eigen::Vector3d& p, Visitor&& visit) const
    {
        const auto c = cell_of(p);
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = m_cells.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == m_cells.end()) continue;
                    for (int j : it->second) visit(j);
                }
            }
        }
    }

private:
    std::array<long long, 3> cell_of(const Eigen::Vector3d& p) const
    {
        std::array<long long, 3> c{};
        for (int k = 0; k < 3; ++k) c[k] = static_cast<long long>(std::floor((p(k) - m_origin(k)) / m_cell));
        return c;
    }

    static std::uint64_t key(const std::array<long long, 3>& c)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (long long v : c) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

    double m_cell;
    Eigen::Vector3d m_origin;
    std::unordered_map<std::uint64_t, std::vector<int>> m_cells;
};

int count_components(const Eigen::SparseMatrix<double>& W)
{
    const auto n = static_cast<int>(W.rows());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int col = 0; col < W.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(W, col); it; ++it) {
            if (it.row() == col || it.value() == 0.0) continue;
            const int a = find(static_cast<int>(it.row()));
            const int b = find(col);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    int components = 0;
    for (int i = 0; i < n; ++i) components += find(i) == i;
    return components;
}

Eigen::SparseMatrix<double> laplacian_from_weights(Eigen::Index n, const std::vector<Triplet>& upper)
{
    std::vector<Triplet> triplets;
    triplets.reserve(2 * upper.size() + static_cast<std::size_t>(n));
    Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);
    for (const auto& t : upper) {
        triplets.emplace_back(t.row(), t.col(), -t.value());
        triplets.emplace_back(t.col(), t.row(), -t.value());
        diagonal(t.row()) += t.value();
        diagonal(t.col()) += t.value();
    }
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, diagonal(i));
    Eigen::SparseMatrix<double> W(n, n);
    W.setFromTriplets(triplets.begin(), triplets.end());
    W.makeCompressed();
    return W;
}

} // namespace

LaplacianPair assemble_fused(const JointEmbedding& emb, const VertexAreas& areas, const FusedOptions& options)
{
    if (!(options.rho > 0.0)) throw InvalidArgument("rho must be positive");
    if (!options.dense && !(options.truncation_eps > 0.0 && options.truncation_eps < 1.0)) {
        throw InvalidArgument("truncation_eps must lie in (0,1)");
    }
    const Eigen::Index n = emb.size();
    if (areas.size() != n) throw InvalidArgument("vertex areas do not match the embedding size");

    const double denom = 4.0 * options.rho;
    std::vector<Triplet> upper;
    auto consider = [&](int i, int j) {
        const double exponent = (emb.coords.row(i) - emb.coords.row(j)).squaredNorm() / denom;
        const double factor = std::exp(-exponent);
        if (!options.dense && factor < options.truncation_eps) return;
        upper.emplace_back(i, j, 0.5 * (areas(i) + areas(j)) * factor);
    };

    if (options.dense) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) consider(i, j);
        }
    } else {
        // The geometric part of the exponent alone bounds the factor, so
        // candidates outside this radius are always truncated.
        const double radius = std::sqrt(denom * std::log(1.0 / options.truncation_eps));
        const Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> positions = emb.geometric();
        PointGrid grid(positions, radius);
        std::vector<int> candidates;
        for (int i = 0; i < n; ++i) {
            candidates.clear();
            grid.for_each_near(positions.row(i).transpose(), [&](int j) {
                if (j > i) candidates.push_back(j);
            });
            std::sort(candidates.begin(), candidates.end());
            for (int j : candidates) consider(i, j);
        }
    }

    LaplacianPair pair;
    pair.scheme = LaplacianScheme::fused_gaussian;
    pair.rho = options.rho;
    pair.eta = emb.eta;
    pair.W = laplacian_from_weights(n, upper);
    pair.mass = Eigen::VectorXd::Constant(n, 4.0 * std::numbers::pi * options.rho * options.rho);

    std::vector<int> degree(n, 0);
    for (const auto& t : upper) {
        if (t.value() > 0.0) {
            ++degree[t.row()];
            ++degree[t.col()];
        }
    }
    for (int i = 0; i < n; ++i) {
        if (degree[i] == 0) pair.report.isolated_vertices.push_back(i);
    }
    pair.report.components = count_components(pair.W);
    if (!pair.report.isolated_vertices.empty()) {
        pair.report.warnings.push_back(
            std::to_string(pair.report.isolated_vertices.size()) +
            " vertices isolated by Gaussian truncation (first: " +
            std::to_string(pair.report.isolated_vertices.front()) + ")");
    }
    if (pair.report.components > 1) {
        pair.report.warnings.push_back(
            "weight graph has " + std::to_string(pair.report.components) + " connected components");
    }
    return pair;
}

LaplacianPair assemble_cotangent(const TexturedMesh& mesh, const VertexAreas& areas)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    const Eigen::Index n = V.rows();
    if (areas.size() != n) throw InvalidArgument("vertex areas do not match the mesh");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(areas(i) > 0.0)) {
            throw ValidationError("vertex " + std::to_string(i) + " has zero area (unreferenced vertex)");
        }
    }

    struct HalfWeight
    {
        int i, j;
        double w;
    };
    std::vector<HalfWeight> halves;
    halves.reserve(static_cast<std::size_t>(3 * F.rows()));
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        for (int c = 0; c < 3; ++c) {
            const int k = F(t, c);
            const int i = F(t, (c + 1) % 3);
            const int j = F(t, (c + 2) % 3);
            const Eigen::Vector3d u = (V.row(i) - V.row(k)).transpose();
            const Eigen::Vector3d v = (V.row(j) - V.row(k)).transpose();
            const double cot = u.dot(v) / u.cross(v).norm();
            halves.push_back({std::min(i, j), std::max(i, j), 0.5 * cot});
        }
    }
    std::stable_sort(halves.begin(), halves.end(), [](const HalfWeight& a, const HalfWeight& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    LaplacianPair pair;
    pair.scheme = LaplacianScheme::cotangent;
    std::vector<Triplet> upper;
    for (std::size_t s = 0; s < halves.size();) {
        std::size_t e = s;
        double w = 0.0;
        while (e < halves.size() && halves[e].i == halves[s].i && halves[e].j == halves[s].j) {
            w += halves[e].w;
            ++e;
        }
        if (e - s > 2) {
            throw ValidationError(
                "edge (" + std::to_string(halves[s].i) + "," + std::to_string(halves[s].j) + ") is shared by " +
                std::to_string(e - s) + " triangles");
        }
        if (w < 0.0) ++pair.report.negative_weights;
        upper.emplace_back(halves[s].i, halves[s].j, w);
        s = e;
    }
    pair.W = laplacian_from_weights(n, upper);
    pair.mass = areas;
    pair.report.components = count_components(pair.W);
    if (pair.report.negative_weights > 0) {
        pair.report.warnings.push_back(
            std::to_string(pair.report.negative_weights) + " cotangent weights are negative");
    }
    return pair;
}

Eigen::VectorXd apply(const LaplacianPair& pair, const Eigen::Ref<const Eigen::VectorXd>& f)
{
    if (f.size() != pair.size()) {
        throw InvalidArgument(
            "function length " + std::to_string(f.size()) + " does not match operator size " +
            std::to_string(pair.size()));
    }
    return (pair.W * f).cwiseQuotient(pair.mass);
}

void write_matrix_market(const LaplacianPair& pair, const std::filesystem::path& prefix)
{
    const std::string base = prefix.string();
    if (!Eigen::saveMarket(pair.W, base + "_W.mtx")) throw IoError("cannot write " + base + "_W.mtx");
    if (!Eigen::saveMarketVector(pair.mass, base + "_A.mtx")) throw IoError("cannot write " + base + "_A.mtx");
}

} // namespace geofuse
