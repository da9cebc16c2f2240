#include "fixtures.hpp"

#include <geofuse/cache.hpp>
#include <geofuse/error.hpp>
#include <geofuse/hash.hpp>
#include <geofuse/mesh_io.hpp>
#include <geofuse/pipeline.hpp>
#include <geofuse/synth.hpp>

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace geofuse;
using namespace fixtures;

namespace {

RunConfig small_config(DescriptorKind kind = DescriptorKind::chks_bof_multiscale)
{
    RunConfig c;
    c.descriptor = kind;
    c.k = 20;
    c.vocab_size = 6;
    c.fps_count = 60;
    c.bins = 16;
    c.times = {4.0, 8.0, 16.0};
    c.threads = 1;
    return c;
}

TexturedMesh striped_ball()
{
    return make_primitive(PrimitiveKind::icosphere, 2, TexturePattern::stripes, 10.0);
}

TexturedMesh checker_ring()
{
    return make_primitive(PrimitiveKind::torus, 1, TexturePattern::checker, 10.0);
}

} // namespace

TEST_CASE("run configuration")
{
    SUBCASE("defaults")
    {
        const RunConfig c;
        CHECK(c.rho == 2.0);
        CHECK(c.etas == std::vector<double>{0.0, 0.05, 0.1});
        CHECK(c.dist_etas == std::vector<double>{0.0, 0.1, 0.2});
        CHECK(c.times == default_hks_times());
        CHECK(c.k == 200);
        CHECK(c.vocab_size == 48);
        CHECK(c.fps_count == 2500);
        CHECK_NOTHROW(validate_config(c));
    }
    SUBCASE("JSON round trip and partial overrides")
    {
        auto c = small_config(DescriptorKind::dist_distribution_joint);
        c.space = PhotometricSpace::raw_srgb;
        c.sigma_rule = SoftSigmaRule::median_distance;
        c.weighting = PointWeighting::uniform;
        c.scheme = LaplacianScheme::cotangent;
        const auto text = run_config_to_json(c);
        CHECK(run_config_to_json(run_config_from_json(text)) == text);

        const auto partial = run_config_from_json(R"({"k": 33, "etas": [0, 0.2]})", c);
        CHECK(partial.k == 33);
        CHECK(partial.etas == std::vector<double>{0.0, 0.2});
        CHECK(partial.vocab_size == c.vocab_size);
        CHECK(partial.scheme == LaplacianScheme::cotangent);
    }
    SUBCASE("bad input")
    {
        CHECK_THROWS_AS(run_config_from_json(R"({"kk": 3})"), InvalidArgument);
        CHECK_THROWS_AS(run_config_from_json(R"({"descriptor": "sift"})"), InvalidArgument);
        CHECK_THROWS_AS(run_config_from_json(R"({"k": "many"})"), InvalidArgument);
        CHECK_THROWS_AS(run_config_from_json("[1, 2]"), InvalidArgument);
        try {
            run_config_from_json("{\"k\": ");
            FAIL("expected a parse error");
        } catch (const Error& e) {
            CHECK(std::string(e.kind()) == "parse_error");
        }
        RunConfig c;
        c.rho = 0.0;
        CHECK_THROWS_AS(validate_config(c), InvalidArgument);
        c = {};
        c.times = {2.0, 1.0};
        CHECK_THROWS_AS(validate_config(c), InvalidArgument);
        c = {};
        c.etas = {-0.1};
        CHECK_THROWS_AS(validate_config(c), InvalidArgument);
    }
    SUBCASE("descriptor kinds")
    {
        for (auto k : {DescriptorKind::hks_bof, DescriptorKind::chks_bof_multiscale, DescriptorKind::color_hist,
                       DescriptorKind::dist_distribution_geometric, DescriptorKind::dist_distribution_joint}) {
            CHECK(descriptor_kind_from_string(to_string(k)) == k);
        }
        RunConfig c;
        c.descriptor = DescriptorKind::hks_bof;
        CHECK(required_etas(c) == std::vector<double>{0.0});
        c.descriptor = DescriptorKind::dist_distribution_joint;
        CHECK(required_etas(c) == c.dist_etas);
        c.descriptor = DescriptorKind::color_hist;
        CHECK(required_etas(c).empty());
        CHECK_FALSE(uses_vocabulary(DescriptorKind::dist_distribution_geometric));
    }
}

TEST_CASE("spectral keys")
{
    const auto mesh = striped_ball();
    const auto c = small_config();
    const auto recolored = mesh.with_colors(random_colors(mesh.num_vertices(), 2), ColorSpace::srgb);
    CHECK(spectral_key(mesh, 0.0, c) == spectral_key(mesh.without_colors(), 0.0, c));
    CHECK(spectral_key(mesh, 0.0, c) == spectral_key(recolored, 0.0, c));
    CHECK(spectral_key(mesh, 0.1, c) != spectral_key(recolored, 0.1, c));
    CHECK(spectral_key(mesh, 0.1, c) != spectral_key(mesh, 0.05, c));
    auto other = c;
    other.k = 21;
    CHECK(spectral_key(mesh, 0.0, c) != spectral_key(mesh, 0.0, other));
    other = c;
    other.color_scale = 3.0;
    CHECK(spectral_key(mesh, 0.0, c) == spectral_key(mesh, 0.0, other));
    CHECK(spectral_key(mesh, 0.1, c) != spectral_key(mesh, 0.1, other));

    auto cot = c;
    cot.scheme = LaplacianScheme::cotangent;
    CHECK_THROWS_AS(assemble(mesh, 0.1, cot), InvalidArgument);
    CHECK(assemble(mesh, 0.0, cot).scheme == LaplacianScheme::cotangent);
}

TEST_CASE("basis cache")
{
    const auto mesh = striped_ball();
    const auto c = small_config();

    SUBCASE("memoizes in memory")
    {
        BasisCache cache;
        const auto a = cache.get(mesh, 0.0, c);
        const auto b = cache.get(mesh.without_colors(), 0.0, c);
        CHECK(a == b);
        CHECK(cache.solves() == 1);
        CHECK(cache.hits() == 1);
        cache.get(mesh, 0.1, c);
        CHECK(cache.solves() == 2);
    }
    SUBCASE("round trips through disk")
    {
        TempDir dir("basis_cache");
        SpectralBasis first;
        {
            BasisCache cache(dir.path());
            first = *cache.get(mesh, 0.1, c);
            CHECK(cache.solves() == 1);
        }
        BasisCache again(dir.path());
        const auto second = again.get(mesh, 0.1, c);
        CHECK(again.solves() == 0);
        CHECK(again.hits() == 1);
        CHECK(second->lambdas == first.lambdas);
        CHECK(second->phis == first.phis);
        CHECK(second->mass == first.mass);

        const auto file = dir / (hex_digest(spectral_key(mesh, 0.1, c)) + ".gfspec");
        SpectralCacheHeader header;
        read_spectral_cache(file, &header);
        CHECK(header.eta == 0.1);
        CHECK(header.k == 20);
        CHECK(header.num_vertices == mesh.num_vertices());
        CHECK(header.scheme == "fused_gaussian");
        CHECK(header.mesh_hash == hex_digest(content_hash(mesh, true)));
    }
    SUBCASE("foreign files are not caches")
    {
        TempDir dir("not_cache");
        write_file(dir / "x.gfspec", "hello");
        CHECK_FALSE(read_spectral_header(dir / "x.gfspec").has_value());
        CHECK_FALSE(read_spectral_header(dir / "missing.gfspec").has_value());
        CHECK_THROWS_AS(read_spectral_cache(dir / "x.gfspec"), ParseError);
    }
}

TEST_CASE("vocabulary sets")
{
    const std::vector<TexturedMesh> meshes{striped_ball(), checker_ring()};
    const auto c = small_config();
    BasisCache cache;
    const auto vocab = build_vocabulary_set(meshes, c, cache);
    CHECK(vocab.by_eta.size() == 3);
    CHECK(vocab.at(0.05).size() == 6);
    CHECK(vocab.at(0.05).dimension() == 3);
    CHECK_THROWS_AS(vocab.at(0.3), ValidationError);

    const auto again = build_vocabulary_set(meshes, c, cache);
    CHECK(again.hash() == vocab.hash());

    TempDir dir("vocab");
    write_vocabulary_set(dir / "v.json", vocab);
    const auto loaded = read_vocabulary_set(dir / "v.json");
    CHECK(loaded.hash() == vocab.hash());
    for (const auto& [eta, v] : vocab.by_eta) {
        CHECK(loaded.at(eta).centers == v.centers);
        CHECK(loaded.at(eta).soft_sigma2 == v.soft_sigma2);
    }
    try {
        read_vocabulary_set(dir / "nope.json");
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("nope.json") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_vocabulary_set(R"({"format": "other"})"), Error);
    CHECK_THROWS_AS(build_vocabulary_set(meshes, small_config(DescriptorKind::color_hist), cache), InvalidArgument);
}

TEST_CASE("descriptors")
{
    const auto ball = striped_ball();
    const auto ring = checker_ring();
    const std::vector<TexturedMesh> meshes{ball, ring};
    BasisCache cache;

    SUBCASE("BoF descriptors are invariant under rigid motion and relabeling")
    {
        for (auto kind : {DescriptorKind::hks_bof, DescriptorKind::chks_bof_multiscale}) {
            const auto c = small_config(kind);
            const auto vocab = build_vocabulary_set(meshes, c, cache);
            const auto a = describe(ball, c, &vocab, cache);
            const auto moved = rigidly_moved(ball, 4, Eigen::RowVector3d(5, 6, 7));
            const auto perm = permuted(ball, shuffled_indices(static_cast<int>(ball.num_vertices()), 8));
            for (const auto& other : {moved, perm}) {
                const auto b = describe(other, c, &vocab, cache);
                for (const auto& [eta, bof] : a.bofs) {
                    CHECK((bof.weights - b.bofs.at(eta).weights).cwiseAbs().maxCoeff() < 1e-9);
                }
            }
            CHECK(descriptor_distance(a, describe(ring, c, &vocab, cache), c) > 0.0);
        }
    }
    SUBCASE("single-scale multiscale equals squared plain HKS distance")
    {
        auto multi = small_config(DescriptorKind::chks_bof_multiscale);
        multi.etas = {0.0};
        const auto plain = small_config(DescriptorKind::hks_bof);
        const auto vocab = build_vocabulary_set(meshes, plain, cache);
        const double d = descriptor_distance(describe(ball, plain, &vocab, cache), describe(ring, plain, &vocab, cache), plain);
        const double dm = descriptor_distance(describe(ball, multi, &vocab, cache), describe(ring, multi, &vocab, cache), multi);
        CHECK(dm == doctest::Approx(d * d).epsilon(1e-14));
    }
    SUBCASE("color histogram ignores geometry edits")
    {
        const auto c = small_config(DescriptorKind::color_hist);
        const auto a = describe(ball, c, nullptr, cache);
        const auto jittered = apply_geometric(ball, GeometricKind::vertex_jitter, 0.1, 3);
        CHECK(descriptor_distance(a, describe(rigidly_moved(ball, 2, {1, 1, 1}), c, nullptr, cache), c) < 1e-12);
        CHECK(descriptor_distance(a, describe(jittered, c, nullptr, cache), c) < 1e-2);
        const auto hue = apply_photometric(ball, {PhotometricKind::hue, 5, 0});
        CHECK(descriptor_distance(a, describe(hue, c, nullptr, cache), c) > 0.0);
    }
    SUBCASE("distance distributions")
    {
        for (auto kind : {DescriptorKind::dist_distribution_geometric, DescriptorKind::dist_distribution_joint}) {
            const auto c = small_config(kind);
            const auto a = describe(ball, c, nullptr, cache);
            CHECK(a.distribution.cdf.size() == 16);
            // An exactly symmetric sphere has farthest-point ties and split
            // eigenspaces that rounding resolves differently after a motion.
            const auto rough = apply_geometric(ball, GeometricKind::vertex_jitter, 1.0, 6);
            const auto r = describe(rough, c, nullptr, cache);
            const auto b = describe(rigidly_moved(rough, 9, {2, 0, 0}), c, nullptr, cache);
            CHECK(descriptor_distance(r, b, c) < 1e-9);
            CHECK(descriptor_distance(a, describe(ring, c, nullptr, cache), c) > 0.0);
        }
    }
    SUBCASE("errors")
    {
        const auto c = small_config(DescriptorKind::hks_bof);
        CHECK_THROWS_AS(describe(ball, c, nullptr, cache), InvalidArgument);
        auto wrong_times = small_config(DescriptorKind::hks_bof);
        const auto vocab = build_vocabulary_set(meshes, c, cache);
        wrong_times.times = {1.0, 2.0};
        CHECK_THROWS_AS(describe(ball, wrong_times, &vocab, cache), ValidationError);
        const auto h = describe(ball, small_config(DescriptorKind::color_hist), nullptr, cache);
        const auto bofs = describe(ball, c, &vocab, cache);
        CHECK_THROWS_AS(descriptor_distance(h, bofs, c), InvalidArgument);
    }
    SUBCASE("JSON container round trip")
    {
        const auto c = small_config(DescriptorKind::chks_bof_multiscale);
        const auto vocab = build_vocabulary_set(meshes, c, cache);
        const auto d = describe(ball, c, &vocab, cache);
        const auto text = descriptor_json(d, c, "abc", hex_digest(vocab.hash()));
        const auto back = parse_descriptor(text);
        CHECK(back.kind == d.kind);
        for (const auto& [eta, bof] : d.bofs) CHECK(back.bofs.at(eta).weights == bof.weights);
        CHECK(descriptor_json(back, c, "abc", hex_digest(vocab.hash())) == text);
        CHECK(text.find("\"mesh_hash\"") != std::string::npos);

        const auto dc = small_config(DescriptorKind::dist_distribution_joint);
        const auto dd = describe(ball, dc, nullptr, cache);
        const auto dback = parse_descriptor(descriptor_json(dd, dc, "abc", std::nullopt));
        CHECK(dback.distribution.cdf == dd.distribution.cdf);
        CHECK(dback.distribution.bin_edges == dd.distribution.bin_edges);

        const auto hc = small_config(DescriptorKind::color_hist);
        const auto hd = describe(ball, hc, nullptr, cache);
        CHECK(parse_descriptor(descriptor_json(hd, hc, "abc", std::nullopt)).histogram.weights == hd.histogram.weights);
        CHECK_THROWS_AS(parse_descriptor("{}"), Error);
    }
}

TEST_CASE("small benchmark")
{
    TempDir dir("pipeline_bench");
    GeneratorConfig g;
    g.seed = 3;
    g.nulls = {{"ball", PrimitiveKind::icosphere, 2, TexturePattern::stripes, 10.0},
               {"ring", PrimitiveKind::torus, 1, TexturePattern::checker, 10.0}};
    g.classes = {TransformClass::hue, TransformClass::isometry_topology};
    g.strengths = {1, 2};
    const auto manifest = build_benchmark(g, dir.path());
    const auto loaded = load_manifest(dir / "manifest.json");

    const auto c = small_config(DescriptorKind::chks_bof_multiscale);
    BasisCache cache;
    const auto result = run_benchmark(loaded, c, nullptr, &cache);
    REQUIRE(result.vocabulary.has_value());
    CHECK(result.rankings.size() == manifest.queries.size());
    CHECK(result.report.overall_map_percent == 100.0);
    CHECK(result.report.overall_map_percent == doctest::Approx(result.report.overall_mrr_percent).epsilon(1e-12));

    // A second run with the same vocabulary reuses every basis.
    const int solves = cache.solves();
    const auto again = run_benchmark(loaded, c, &*result.vocabulary, &cache);
    CHECK(cache.solves() == solves);
    CHECK(report_csv(again.report) == report_csv(result.report));

    SUBCASE("missing shape is named")
    {
        auto broken = loaded;
        broken.queries[1].path = dir / "queries/absent.ply";
        try {
            run_benchmark(broken, c, nullptr, &cache);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("absent.ply") != std::string::npos);
            CHECK(std::string(e.what()).find("shape 'ball'") != std::string::npos);
        }
    }
}

TEST_CASE("parallel_for")
{
    std::vector<int> out(50, 0);
    parallel_for(50, 4, [&](int i) { out[i] = i * i; });
    for (int i = 0; i < 50; ++i) CHECK(out[i] == i * i);
    std::atomic<int> calls{0};
    parallel_for(0, 4, [&](int) { ++calls; });
    CHECK(calls == 0);
    try {
        parallel_for(20, 3, [](int i) {
            if (i == 7 || i == 15) throw std::runtime_error("fail " + std::to_string(i));
        });
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "fail 7");
    }
}
