#include "fixtures.hpp"

#include <geofuse/diffusion.hpp>
#include <geofuse/embedding.hpp>
#include <geofuse/error.hpp>
#include <geofuse/laplacian.hpp>
#include <geofuse/spectrum.hpp>
#include <geofuse/synth.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace geofuse;
using namespace fixtures;

namespace {

SpectralBasis fused_basis(const TexturedMesh& mesh, double eta, int k)
{
    return solve(assemble_fused(build_embedding(mesh, eta), vertex_areas(mesh)), k);
}

TexturedMesh colored_torus(unsigned seed)
{
    const auto torus = apply_geometric(make_torus(8.0, 3.0, 16, 8), GeometricKind::vertex_jitter, 1.0, seed);
    return torus.with_colors(random_colors(torus.num_vertices(), seed), ColorSpace::srgb);
}

/// First `count` eigenpairs of a basis.
SpectralBasis truncated(const SpectralBasis& basis, Eigen::Index count)
{
    SpectralBasis out = basis;
    out.lambdas = basis.lambdas.head(count);
    out.phis = basis.phis.leftCols(count);
    return out;
}

/// Diffusion distance from its integral form: the L2(A) distance between
/// heat kernel rows at half the time.
double integral_distance(const SpectralBasis& basis, double t, int i, int j)
{
    const Eigen::VectorXd diff = heat_kernel(basis, t / 2, i) - heat_kernel(basis, t / 2, j);
    return std::sqrt(diff.cwiseAbs2().dot(basis.mass));
}

} // namespace

TEST_CASE("default times")
{
    const auto t = default_hks_times();
    REQUIRE(t.size() == 5);
    CHECK(t == std::vector<double>{1024.0, 1351.2, 1782.9, 2352.5, 4096.0});
}

TEST_CASE("heat is conserved")
{
    const auto mesh = colored_torus(1);
    const auto basis = fused_basis(mesh, 0.1, 40);
    double worst = 0.0;
    for (double t : {1.0, 1e2, 1e4}) {
        for (int source : {0, 17, 63, 101}) {
            worst = std::max(worst, std::abs(heat_kernel(basis, t, source).dot(basis.mass) - 1.0));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("large-time limit on the unit sphere")
{
    const auto sphere = make_icosphere(3, 1.0);
    const auto basis = solve(assemble_cotangent(sphere, vertex_areas(sphere)), 10);
    const std::vector<double> times{40.0};
    const auto field = hks_field(basis, times);
    const double limit = 1.0 / (4.0 * std::numbers::pi);
    CHECK(std::abs(field.values.minCoeff() - limit) / limit < 0.03);
    CHECK(std::abs(field.values.maxCoeff() - limit) / limit < 0.03);
}

TEST_CASE("single eigenpair gives the constant field 1/area")
{
    const auto mesh = colored_torus(2);
    const auto basis = fused_basis(mesh, 0.0, 0);
    REQUIRE(basis.num_eigenpairs() == 1);
    const std::vector<double> times{1.0, 10.0};
    const auto field = hks_field(basis, times);
    const double expected = 1.0 / basis.mass.sum();
    // phi_0 is only converged to the solver tolerance.
    CHECK((field.values.array() - expected).abs().maxCoeff() <= 1e-6 * expected);
}

TEST_CASE("HKS properties")
{
    const auto mesh = colored_torus(3);
    const auto basis = fused_basis(mesh, 0.1, 30);
    const auto times = default_hks_times();
    const auto field = hks_field(basis, times, 0.1);
    CHECK(field.eta == 0.1);
    CHECK(field.values.rows() == mesh.num_vertices());
    CHECK(field.values.cols() == 5);
    CHECK(field.values.minCoeff() > 0.0);
    for (Eigen::Index m = 1; m < field.values.cols(); ++m) {
        CHECK((field.values.col(m) - field.values.col(m - 1)).maxCoeff() <= 0.0);
    }
    for (int i : {0, 50, 120}) {
        CHECK(heat_kernel(basis, times[2], i)(i) == doctest::Approx(field.values(i, 2)).epsilon(1e-12));
    }
}

TEST_CASE("eta = 0 ignores colors")
{
    const auto mesh = colored_torus(4);
    const auto a = fused_basis(mesh, 0.0, 20);
    const auto b = fused_basis(mesh.without_colors(), 0.0, 20);
    const auto c = fused_basis(mesh.with_colors(random_colors(mesh.num_vertices(), 99), ColorSpace::srgb), 0.0, 20);
    const auto times = default_hks_times();
    const auto fa = hks_field(a, times).values;
    CHECK((fa - hks_field(b, times).values).cwiseAbs().maxCoeff() <= 1e-12 * fa.maxCoeff());
    CHECK((fa - hks_field(c, times).values).cwiseAbs().maxCoeff() <= 1e-12 * fa.maxCoeff());
}

TEST_CASE("HKS is invariant under rigid motion")
{
    // Full basis: no eigenspace is split by the truncation.
    const auto sphere = apply_geometric(make_icosphere(2, 10.0), GeometricKind::vertex_jitter, 1.0, 5);
    const auto mesh = sphere.with_colors(random_colors(sphere.num_vertices(), 5), ColorSpace::srgb);
    const int n = static_cast<int>(mesh.num_vertices());
    const auto moved = rigidly_moved(mesh, 11, Eigen::RowVector3d(3.0, -7.0, 12.0));
    const std::vector<double> times{4.0, 16.0, 64.0};
    const auto a = hks_field(fused_basis(mesh, 0.1, n - 1), times).values;
    const auto b = hks_field(fused_basis(moved, 0.1, n - 1), times).values;
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * a.maxCoeff());
}

TEST_CASE("distance oracles")
{
    const auto mesh = colored_torus(6);
    const int n = static_cast<int>(mesh.num_vertices());
    const auto full = fused_basis(mesh, 0.1, n - 1);
    const auto basis = truncated(full, 30);
    const double t = 3.0;
    const std::vector<int> sample{0, 9, 33, 77, 120};

    SUBCASE("spectral coordinates")
    {
        const auto Y = diffusion_coordinates(basis, t, sample);
        for (std::size_t a = 0; a < sample.size(); ++a) {
            for (std::size_t b = 0; b < sample.size(); ++b) {
                const double d = diffusion_distance(basis, t, sample[a], sample[b]);
                CHECK(std::abs((Y.row(a) - Y.row(b)).norm() - d) <= 1e-12 * std::max(1.0, d));
            }
        }
    }
    SUBCASE("integral form on the full basis")
    {
        for (std::size_t a = 1; a < sample.size(); ++a) {
            const double d = diffusion_distance(full, t, sample[0], sample[a]);
            CHECK(integral_distance(full, t, sample[0], sample[a]) == doctest::Approx(d).epsilon(1e-8));
        }
    }
    SUBCASE("averaged and joint")
    {
        const auto other = truncated(fused_basis(mesh, 0.0, 30), 31);
        const std::vector<double> times{1.0, 4.0};
        const std::vector<double> etas{0.0, 0.1};
        const BasisByEta bases{{0.0, &other}, {0.1, &basis}};
        const auto M = multiscale_distance_matrix(bases, times, etas, sample);
        for (std::size_t a = 0; a < sample.size(); ++a) {
            for (std::size_t b = 0; b < sample.size(); ++b) {
                const int i = sample[a], j = sample[b];
                const double avg =
                    (diffusion_distance(basis, 1.0, i, j) + diffusion_distance(basis, 4.0, i, j)) / 2;
                CHECK(averaged_distance(basis, times, i, j) == doctest::Approx(avg).epsilon(1e-14));
                const double joint = (diffusion_distance(other, 1.0, i, j) * diffusion_distance(basis, 1.0, i, j) +
                                      diffusion_distance(other, 4.0, i, j) * diffusion_distance(basis, 4.0, i, j)) /
                                     2;
                const double got = joint_multiscale_distance(bases, times, etas, i, j);
                CHECK(got == doctest::Approx(joint).epsilon(1e-12));
                CHECK(std::abs(M(a, b) - got) <= 1e-12 * std::max(1e-300, got));
            }
        }
        const std::vector<double> single{0.1};
        const auto M1 = multiscale_distance_matrix(bases, times, single, sample);
        CHECK(M1(1, 3) == doctest::Approx(averaged_distance(basis, times, sample[1], sample[3])).epsilon(1e-12));
    }
}

TEST_CASE("distance is a pseudometric")
{
    const auto torus = make_torus(4.0, 1.5, 10, 5);
    const auto mesh = torus.with_colors(random_colors(50, 12), ColorSpace::srgb);
    const auto basis = fused_basis(mesh, 0.2, 49);
    const double t = 2.0;
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
        CHECK(diffusion_distance(basis, t, i, i) == 0.0);
        for (int j = 0; j < 50; ++j) {
            const double dij = diffusion_distance(basis, t, i, j);
            if (std::abs(dij - diffusion_distance(basis, t, j, i)) > 1e-15) ++violations;
            for (int k = 0; k < 50; ++k) {
                if (dij > diffusion_distance(basis, t, i, k) + diffusion_distance(basis, t, k, j) + 1e-12) ++violations;
            }
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("distance grows with the truncation level")
{
    const auto mesh = colored_torus(7);
    const auto full = fused_basis(mesh, 0.1, 60);
    for (int i : {3, 40}) {
        double previous = 0.0;
        for (Eigen::Index count : {2, 5, 10, 20, 40, 61}) {
            const double d = diffusion_distance(truncated(full, count), 1.5, i, 90);
            CHECK(d >= previous);
            previous = d;
        }
    }
}

TEST_CASE("scaling lambda by c and t by 1/c leaves distances unchanged")
{
    const auto mesh = colored_torus(8);
    const auto basis = fused_basis(mesh, 0.1, 25);
    auto scaled = basis;
    const double c = 7.5;
    scaled.lambdas *= c;
    for (int j : {5, 60, 111}) {
        const double d = diffusion_distance(basis, 3.0, 0, j);
        CHECK(diffusion_distance(scaled, 3.0 / c, 0, j) == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("diffusion errors")
{
    const auto mesh = colored_torus(9);
    const auto basis = fused_basis(mesh, 0.0, 5);
    const std::vector<double> none;
    const std::vector<double> backwards{4.0, 2.0};
    CHECK_THROWS_AS(heat_kernel(basis, 0.0, 0), InvalidArgument);
    CHECK_THROWS_AS(heat_kernel(basis, 1.0, -1), InvalidArgument);
    CHECK_THROWS_AS(diffusion_distance(basis, 1.0, 0, 100000), InvalidArgument);
    CHECK_THROWS_AS(hks_field(basis, none), InvalidArgument);
    CHECK_THROWS_AS(hks_field(basis, backwards), InvalidArgument);
    CHECK_THROWS_AS(averaged_distance(basis, none, 0, 1), InvalidArgument);
    const std::vector<double> times{1.0};
    const std::vector<double> etas{0.0, 0.3};
    const BasisByEta bases{{0.0, &basis}};
    CHECK_THROWS_AS(joint_multiscale_distance(bases, times, etas, 0, 1), InvalidArgument);
    const std::vector<int> sample{0, 1};
    CHECK_THROWS_AS(multiscale_distance_matrix(bases, times, none, sample), InvalidArgument);
}

TEST_CASE("distance does not depend on the basis of a split null space")
{
    // Two disjoint triangles: the zero eigenvalue has multiplicity two.
    Vertices v(6, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 50, 0, 0, 51, 0, 0, 50, 1, 0;
    Triangles f(2, 3);
    f << 0, 1, 2, 3, 4, 5;
    const TexturedMesh mesh(v, f);
    const auto basis = solve(assemble_cotangent(mesh, vertex_areas(mesh)), 5);
    REQUIRE(basis.lambdas(1) < 1e-12);
    auto rotated = basis;
    const double c = std::cos(0.7), s = std::sin(0.7);
    rotated.phis.col(0) = c * basis.phis.col(0) + s * basis.phis.col(1);
    rotated.phis.col(1) = -s * basis.phis.col(0) + c * basis.phis.col(1);
    for (int j = 1; j < 6; ++j) {
        const double d = diffusion_distance(basis, 0.5, 0, j);
        CHECK(diffusion_distance(rotated, 0.5, 0, j) == doctest::Approx(d).epsilon(1e-12));
    }
    CHECK(diffusion_distance(basis, 0.5, 0, 3) > diffusion_distance(basis, 0.5, 0, 1));
}
