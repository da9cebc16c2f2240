#include "fixtures.hpp"

#include <geofuse/color.hpp>
#include <geofuse/descriptors.hpp>
#include <geofuse/diffusion.hpp>
#include <geofuse/embedding.hpp>
#include <geofuse/error.hpp>
#include <geofuse/laplacian.hpp>
#include <geofuse/mesh_io.hpp>
#include <geofuse/spectrum.hpp>
#include <geofuse/synth.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace geofuse;
using namespace fixtures;

namespace {

Eigen::MatrixXd hks(const TexturedMesh& mesh, double eta, int k = 30)
{
    const auto basis = solve(assemble_fused(build_embedding(mesh, eta), vertex_areas(mesh)), k);
    return hks_field(basis, default_hks_times(), eta).values;
}

GeneratorConfig small_config()
{
    GeneratorConfig c;
    c.seed = 9;
    c.nulls = {{"ball", PrimitiveKind::icosphere, 1, TexturePattern::stripes, 10.0},
               {"ring", PrimitiveKind::torus, 1, TexturePattern::checker, 10.0}};
    c.classes = {TransformClass::hue, TransformClass::mixed, TransformClass::isometry_topology};
    c.strengths = {1, 3};
    return c;
}

} // namespace

TEST_CASE("primitives")
{
    SUBCASE("icosphere")
    {
        for (int s = 0; s <= 4; ++s) {
            const auto m = make_icosphere(s, 2.0);
            CHECK(m.num_vertices() == 10 * (1 << (2 * s)) + 2);
            CHECK(m.num_triangles() == 20 * (1 << (2 * s)));
            CHECK((m.vertices().rowwise().norm().array() - 2.0).abs().maxCoeff() < 1e-12);
        }
        const auto m = make_icosphere(4, 1.0);
        CHECK(std::abs(surface_area(m) - 4 * std::numbers::pi) / (4 * std::numbers::pi) < 0.01);
        CHECK(connected_components(m).first == 1);
    }
    SUBCASE("torus")
    {
        const double R = 5.0, r = 1.5;
        const auto m = make_torus(R, r, 64, 32);
        CHECK(m.num_vertices() == 64 * 32);
        const double area = 4 * std::numbers::pi * std::numbers::pi * R * r;
        CHECK(std::abs(surface_area(m) - area) / area < 0.02);
        // Closed surface of genus one: V - E + F = 0.
        CHECK(m.num_vertices() - 3 * m.num_triangles() / 2 + m.num_triangles() == 0);
    }
    SUBCASE("capsule")
    {
        const auto m = make_capsule(1.0, 2.0, 32, 8, 8);
        const double area = 4 * std::numbers::pi + 2 * std::numbers::pi * 4.0;
        CHECK(std::abs(surface_area(m) - area) / area < 0.03);
        CHECK(m.num_vertices() - 3 * m.num_triangles() / 2 + m.num_triangles() == 2);
        CHECK(connected_components(m).first == 1);
    }
    SUBCASE("names")
    {
        CHECK(primitive_kind_from_string("cylinder_capsule") == PrimitiveKind::capsule);
        CHECK(primitive_kind_from_string("capsule") == PrimitiveKind::capsule);
        CHECK(std::string(to_string(PrimitiveKind::torus)) == "torus");
        CHECK(texture_pattern_from_string("checker") == TexturePattern::checker);
        CHECK_THROWS_AS(primitive_kind_from_string("cube"), InvalidArgument);
        CHECK_THROWS_AS(texture_pattern_from_string("plaid"), InvalidArgument);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(make_icosphere(-1, 1.0), InvalidArgument);
        CHECK_THROWS_AS(make_torus(1.0, 2.0, 8, 8), InvalidArgument);
        CHECK_THROWS_AS(make_capsule(1.0, 1.0, 2, 1, 1), InvalidArgument);
        CHECK_THROWS_AS(make_primitive(PrimitiveKind::torus, 1, TexturePattern::none, 0.0), InvalidArgument);
    }
}

TEST_CASE("textures")
{
    const auto stripes = make_primitive(PrimitiveKind::icosphere, 3, TexturePattern::stripes, 10.0);
    REQUIRE(stripes.has_colors());
    CHECK(stripes.colorspace() == ColorSpace::srgb);
    // Two colors, both present.
    int red = 0;
    for (Eigen::Index i = 0; i < stripes.num_vertices(); ++i) red += stripes.colors()(i, 1) < 0.5;
    CHECK(red > 0);
    CHECK(red < stripes.num_vertices());

    const auto plain = make_primitive(PrimitiveKind::icosphere, 3, TexturePattern::uniform, 10.0);
    CHECK((plain.colors().rowwise() - plain.colors().row(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(make_primitive(PrimitiveKind::icosphere, 1, TexturePattern::none, 1.0).has_colors());
    CHECK(plain.vertices() == stripes.vertices());
}

TEST_CASE("photometric transforms")
{
    const auto mesh = make_primitive(PrimitiveKind::torus, 1, TexturePattern::checker, 10.0);
    const Colors lab = colors_as_lab(mesh);

    SUBCASE("geometry is untouched")
    {
        for (auto kind : {PhotometricKind::contrast, PhotometricKind::brightness, PhotometricKind::hue,
                          PhotometricKind::saturation, PhotometricKind::color_noise}) {
            const auto out = apply_photometric(mesh, {kind, 4, 3});
            CHECK(out.vertices() == mesh.vertices());
            CHECK(out.triangles() == mesh.triangles());
            CHECK(out.colorspace() == ColorSpace::lab);
            CHECK((out.colors() - lab).cwiseAbs().maxCoeff() > 0.0);
        }
    }
    SUBCASE("identity tables")
    {
        const auto id = PhotometricTables::identity();
        for (auto kind : {PhotometricKind::contrast, PhotometricKind::brightness, PhotometricKind::hue,
                          PhotometricKind::saturation, PhotometricKind::color_noise}) {
            for (int s = 1; s <= 5; ++s) {
                const auto out = apply_photometric(mesh, {kind, s, 1}, id);
                CHECK((out.colors() - lab).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
    SUBCASE("formulas")
    {
        const PhotometricTables t;
        const auto hue = apply_photometric(mesh, {PhotometricKind::hue, 3, 0});
        CHECK((hue.colors().col(1) - lab.col(1)).array().mean() == doctest::Approx(t.hue[2]));
        CHECK(hue.colors().col(0) == lab.col(0));
        const auto sat = apply_photometric(mesh, {PhotometricKind::saturation, 2, 0});
        CHECK((sat.colors().col(2) - t.saturation[1] * lab.col(2)).cwiseAbs().maxCoeff() < 1e-12);
        const auto con = apply_photometric(mesh, {PhotometricKind::contrast, 5, 0});
        const Eigen::VectorXd expected = (50.0 + t.contrast[4] * (lab.col(0).array() - 50.0)).matrix();
        CHECK((con.colors().col(0) - expected).cwiseAbs().maxCoeff() < 1e-12);
        const auto bright = apply_photometric(mesh, {PhotometricKind::brightness, 5, 0});
        CHECK(bright.colors().col(0).maxCoeff() <= 100.0);
    }
    SUBCASE("noise commutes with vertex permutation")
    {
        const auto perm = shuffled_indices(static_cast<int>(mesh.num_vertices()), 3);
        const PhotometricTransform noise{PhotometricKind::color_noise, 3, 42};
        const auto a = permuted(apply_photometric(mesh, noise), perm);
        const auto b = apply_photometric(permuted(mesh, perm), noise);
        CHECK(a.colors() == b.colors());
        const auto c = apply_photometric(mesh, {PhotometricKind::color_noise, 3, 43});
        CHECK(c.colors() != apply_photometric(mesh, noise).colors());
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(apply_photometric(mesh.without_colors(), {}), InvalidArgument);
        CHECK_THROWS_AS(apply_photometric(mesh, {PhotometricKind::hue, 0, 0}), InvalidArgument);
        CHECK_THROWS_AS(apply_photometric(mesh, {PhotometricKind::hue, 6, 0}), InvalidArgument);
    }
}

TEST_CASE("photometric transforms and the descriptors")
{
    const auto mesh = make_primitive(PrimitiveKind::icosphere, 2, TexturePattern::stripes, 12.0);
    const auto base0 = hks(mesh, 0.0);
    const auto base1 = hks(mesh, 0.1);
    for (auto kind : {PhotometricKind::contrast, PhotometricKind::hue, PhotometricKind::saturation,
                      PhotometricKind::color_noise}) {
        CAPTURE(to_string(kind));
        const auto out = apply_photometric(mesh, {kind, 5, 8});
        CHECK(hks(out, 0.0) == base0); // geometry-only pipeline sees identical input
        const double change = (hks(out, 0.1) - base1).cwiseAbs().maxCoeff() / base1.maxCoeff();
        if (kind == PhotometricKind::hue) {
            // A hue shift translates every color equally: color differences,
            // and with them the fused operator, are unchanged.
            CHECK(change < 1e-9);
        } else {
            CHECK(change > 1e-6);
        }
    }
}

TEST_CASE("geometric transforms")
{
    const auto mesh = make_primitive(PrimitiveKind::torus, 1, TexturePattern::checker, 10.0);

    SUBCASE("rigid motion preserves pairwise distances")
    {
        const auto moved = apply_geometric(mesh, GeometricKind::rigid, 2.0, 5);
        CHECK(moved.colors() == mesh.colors());
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const int j = (i * 31 + 7) % static_cast<int>(mesh.num_vertices());
            const double d0 = (mesh.vertices().row(i) - mesh.vertices().row(j)).norm();
            const double d1 = (moved.vertices().row(i) - moved.vertices().row(j)).norm();
            worst = std::max(worst, std::abs(d0 - d1));
        }
        CHECK(worst < 1e-12);
        CHECK((moved.vertices() - mesh.vertices()).norm() > 1.0);
    }
    SUBCASE("jitter")
    {
        CHECK(apply_geometric(mesh, GeometricKind::vertex_jitter, 0.0, 5).vertices() == mesh.vertices());
        const auto j1 = apply_geometric(mesh, GeometricKind::vertex_jitter, 1.0, 5);
        const auto j3 = apply_geometric(mesh, GeometricKind::vertex_jitter, 3.0, 5);
        const double d1 = (j1.vertices() - mesh.vertices()).norm();
        CHECK((j3.vertices() - mesh.vertices()).norm() == doctest::Approx(3 * d1).epsilon(1e-12));
        const double expected = 0.05 * mean_edge_length(mesh) * std::sqrt(3.0 * mesh.num_vertices());
        CHECK(d1 == doctest::Approx(expected).epsilon(0.1));
    }
    SUBCASE("hole cut")
    {
        const auto big = make_primitive(PrimitiveKind::icosphere, 3, TexturePattern::stripes, 10.0);
        CHECK(apply_geometric(big, GeometricKind::hole_cut, 0.0, 1).num_triangles() == big.num_triangles());
        for (int s = 1; s <= 5; ++s) {
            CHECK(apply_geometric(big, GeometricKind::hole_cut, s, 4).num_triangles() < big.num_triangles());
        }
        const auto cut = apply_geometric(big, GeometricKind::hole_cut, 2.0, 1);
        CHECK(cut.num_triangles() < big.num_triangles());
        CHECK(cut.num_vertices() < big.num_vertices());
        CHECK(connected_components(cut).first == 1);
        CHECK(cut.has_colors());
        // Survivors keep their relative order and colors.
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < big.num_vertices() && k < cut.num_vertices(); ++i) {
            if (big.vertices().row(i) == cut.vertices().row(k)) {
                CHECK(big.colors().row(i) == cut.colors().row(k));
                ++k;
            }
        }
        CHECK(k == cut.num_vertices());
    }
    SUBCASE("hole cut that would disconnect the mesh")
    {
        const auto strip = planar_grid(30, 1, 1.0);
        int failures = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            try {
                apply_geometric(strip, GeometricKind::hole_cut, 1.0, seed);
            } catch (const ValidationError& e) {
                CHECK(std::string(e.what()).find("component 1") != std::string::npos);
                ++failures;
            }
        }
        CHECK(failures > 0);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(apply_geometric(mesh, GeometricKind::vertex_jitter, -1.0, 0), InvalidArgument);
    }
}

TEST_CASE("seed mixing")
{
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(mix_seed(0, 0) != 0);
}

TEST_CASE("generator config JSON")
{
    const auto c = small_config();
    const auto text = generator_config_to_json(c);
    const auto back = generator_config_from_json(text);
    CHECK(generator_config_to_json(back) == text);
    CHECK(back.nulls[1].kind == PrimitiveKind::torus);
    CHECK(back.classes.size() == 3);

    const auto def = GeneratorConfig::default_config();
    CHECK(def.nulls.size() == 5);
    CHECK(def.classes.size() == all_transform_classes.size());

    CHECK_THROWS_AS(generator_config_from_json("{not json"), Error);
    CHECK_THROWS_AS(generator_config_from_json(R"({"nulls": [], "strengths": [7]})"), InvalidArgument);
}

TEST_CASE("benchmark generation")
{
    TempDir a("bench_a"), b("bench_b");
    const auto config = small_config();
    const auto m = build_benchmark(config, a.path());
    CHECK(m.nulls.size() == 2);
    CHECK(m.queries.size() == 2 * 3 * 2);
    CHECK(fs::exists(a / "manifest.json"));
    CHECK(fs::exists(a / "nulls/ball.ply"));
    CHECK(fs::exists(a / "queries/ring_mixed_3.ply"));

    const auto loaded = load_manifest(a / "manifest.json");
    CHECK(loaded.queries.size() == m.queries.size());
    for (const auto& q : loaded.queries) CHECK_NOTHROW(load_mesh(q.path));

    build_benchmark(config, b.path());
    for (const auto& entry : fs::recursive_directory_iterator(a.path())) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), a.path());
        CHECK(read_file(entry.path()) == read_file(b.path() / rel));
    }

    const auto ball = load_mesh(a / "nulls/ball.ply");
    const auto hue = load_mesh(a / "queries/ball_hue_3.ply");
    CHECK(hue.vertices() == ball.vertices());
    const auto mixed = load_mesh(a / "queries/ball_mixed_1.ply");
    CHECK(mixed.num_vertices() == ball.num_vertices());

    GeneratorConfig empty;
    CHECK_THROWS_AS(build_benchmark(empty, a.path()), InvalidArgument);
}
