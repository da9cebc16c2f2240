#include <geofuse/cache.hpp>
#include <geofuse/diffusion.hpp>
#include <geofuse/error.hpp>
#include <geofuse/hash.hpp>
#include <geofuse/mesh_io.hpp>
#include <geofuse/pipeline.hpp>
#include <geofuse/synth.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace geofuse;

namespace {

/// Flag overrides layered on top of the config file.
struct ConfigFlags
{
    std::string config_path;
    std::optional<std::string> scheme;
    std::optional<double> rho;
    std::optional<std::vector<double>> etas;
    std::optional<std::vector<double>> dist_etas;
    std::optional<std::vector<double>> times;
    std::optional<int> k;
    std::optional<int> vocab_size;
    std::optional<std::uint64_t> vocab_seed;
    std::optional<int> fps_count;
    std::optional<double> color_scale;
    std::optional<double> truncation_eps;
    std::optional<std::string> descriptor;
    std::optional<int> bins;
    std::optional<int> hist_bins;
    std::optional<double> tol;
    std::optional<std::uint64_t> solver_seed;
    std::optional<int> threads;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config_path, "JSON run config");
        app->add_option("--scheme", scheme, "cotangent | fused_gaussian");
        app->add_option("--rho", rho, "Gaussian scale");
        app->add_option("--etas", etas, "BoF scales")->delimiter(',');
        app->add_option("--dist-etas", dist_etas, "distance-distribution scales")->delimiter(',');
        app->add_option("--times", times, "HKS times")->delimiter(',');
        app->add_option("--k", k, "eigenpairs");
        app->add_option("--vocab-size", vocab_size);
        app->add_option("--vocab-seed", vocab_seed);
        app->add_option("--fps-count", fps_count);
        app->add_option("--color-scale", color_scale);
        app->add_option("--truncation-eps", truncation_eps);
        app->add_option("--descriptor", descriptor,
                        "hks_bof | chks_bof_multiscale | color_hist | dist_distribution_geometric | "
                        "dist_distribution_joint");
        app->add_option("--bins", bins);
        app->add_option("--hist-bins", hist_bins);
        app->add_option("--tol", tol);
        app->add_option("--solver-seed", solver_seed);
        app->add_option("--threads", threads);
    }

    RunConfig resolve() const
    {
        RunConfig c = config_path.empty() ? RunConfig{} : run_config_from_json(read_text_file(config_path));
        if (scheme) {
            if (*scheme == "cotangent") c.scheme = LaplacianScheme::cotangent;
            else if (*scheme == "fused_gaussian") c.scheme = LaplacianScheme::fused_gaussian;
            else throw InvalidArgument("unknown scheme '" + *scheme + "'");
        }
        if (rho) c.rho = *rho;
        if (etas) c.etas = *etas;
        if (dist_etas) c.dist_etas = *dist_etas;
        if (times) c.times = *times;
        if (k) c.k = *k;
        if (vocab_size) c.vocab_size = *vocab_size;
        if (vocab_seed) c.vocab_seed = *vocab_seed;
        if (fps_count) c.fps_count = *fps_count;
        if (color_scale) c.color_scale = *color_scale;
        if (truncation_eps) c.truncation_eps = *truncation_eps;
        if (descriptor) c.descriptor = descriptor_kind_from_string(*descriptor);
        if (bins) c.bins = *bins;
        if (hist_bins) c.hist_bins = *hist_bins;
        if (tol) c.tol = *tol;
        if (solver_seed) c.solver_seed = *solver_seed;
        if (threads) c.threads = *threads;
        validate_config(c);
        return c;
    }
};

std::optional<fs::path> optional_path(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

int cmd_spectrum(const ConfigFlags& flags, const std::string& mesh_path, double eta, const std::string& output,
                 const std::string& mtx_prefix)
{
    const RunConfig config = flags.resolve();
    const TexturedMesh mesh = load_mesh(mesh_path);
    const std::string key = hex_digest(spectral_key(mesh, eta, config));
    json out;
    out["output"] = output;
    out["key"] = key;
    const auto existing = read_spectral_header(output);
    if (existing && existing->key == key) {
        out["cache"] = "hit";
        out["k"] = existing->k;
        out["warnings"] = existing->warnings;
    } else {
        const LaplacianPair pair = assemble(mesh, eta, config);
        if (!mtx_prefix.empty()) write_matrix_market(pair, mtx_prefix);
        SolveOptions opts;
        opts.tol = config.tol;
        opts.seed = config.solver_seed;
        const SpectralBasis basis = solve(pair, config.k, opts);
        const auto header = make_spectral_header(mesh, eta, config, basis);
        write_spectral_cache(output, header, basis);
        out["cache"] = "miss";
        out["k"] = basis.report.k;
        auto warnings = pair.report.warnings;
        warnings.insert(warnings.end(), basis.report.warnings.begin(), basis.report.warnings.end());
        out["warnings"] = warnings;
    }
    for (const auto& w : out["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    std::cout << out.dump() << "\n";
    return 0;
}

std::vector<TexturedMesh> load_vocab_inputs(const std::vector<std::string>& inputs)
{
    std::vector<TexturedMesh> meshes;
    if (inputs.size() == 1 && fs::path(inputs[0]).extension() == ".json") {
        const auto manifest = load_manifest(inputs[0]);
        for (const auto& n : manifest.nulls) meshes.push_back(load_mesh(n.path));
    } else {
        for (const auto& p : inputs) meshes.push_back(load_mesh(p));
    }
    return meshes;
}

int cmd_vocab(const ConfigFlags& flags, const std::vector<std::string>& inputs, const std::string& output,
              const std::string& cache_dir)
{
    const RunConfig config = flags.resolve();
    const auto meshes = load_vocab_inputs(inputs);
    BasisCache cache(optional_path(cache_dir));
    const VocabularySet vocab = build_vocabulary_set(meshes, config, cache);
    write_vocabulary_set(output, vocab);
    std::cout << json{{"output", output}, {"hash", hex_digest(vocab.hash())}, {"shapes", meshes.size()}}.dump()
              << "\n";
    return 0;
}

int cmd_describe(const ConfigFlags& flags, const std::string& mesh_path, const std::string& vocab_path,
                 const std::string& output, const std::string& cache_dir)
{
    const RunConfig config = flags.resolve();
    std::optional<VocabularySet> vocab;
    if (uses_vocabulary(config.descriptor)) {
        if (vocab_path.empty()) {
            throw InvalidArgument(std::string(to_string(config.descriptor)) + " requires --vocab");
        }
        vocab = read_vocabulary_set(vocab_path);
    }
    const TexturedMesh mesh = load_mesh(mesh_path);
    BasisCache cache(optional_path(cache_dir));
    const ShapeDescriptor d = describe(mesh, config, vocab ? &*vocab : nullptr, cache);
    const bool photometric = config.descriptor == DescriptorKind::chks_bof_multiscale ||
                             config.descriptor == DescriptorKind::dist_distribution_joint ||
                             config.descriptor == DescriptorKind::color_hist;
    const std::optional<std::string> vocab_hash =
        vocab ? std::optional<std::string>(hex_digest(vocab->hash())) : std::nullopt;
    write_text_file(output, descriptor_json(d, config, hex_digest(content_hash(mesh, photometric)), vocab_hash));
    std::cout << json{{"output", output}, {"type", to_string(config.descriptor)}}.dump() << "\n";
    return 0;
}

int cmd_benchmark(const ConfigFlags& flags, const std::string& manifest_path, const std::string& vocab_path,
                  const std::string& csv_path, const std::string& json_path, const std::string& vocab_out,
                  const std::string& cache_dir)
{
    const RunConfig config = flags.resolve();
    const auto manifest = load_manifest(manifest_path);
    std::optional<VocabularySet> vocab;
    if (!vocab_path.empty()) vocab = read_vocabulary_set(vocab_path);
    BasisCache cache(optional_path(cache_dir));
    const auto result = run_benchmark(manifest, config, vocab ? &*vocab : nullptr, &cache);
    const std::string csv = report_csv(result.report);
    if (!csv_path.empty()) write_text_file(csv_path, csv);
    if (!json_path.empty()) write_text_file(json_path, report_json(result.report));
    if (!vocab_out.empty() && result.vocabulary) write_vocabulary_set(vocab_out, *result.vocabulary);
    if (csv_path.empty()) std::cout << csv;
    else std::cout << json{{"csv", csv_path}, {"overall_map_percent", result.report.overall_map_percent}}.dump() << "\n";
    return 0;
}

int cmd_synth(const std::string& generator_path, const std::string& out_dir, std::optional<std::uint64_t> seed)
{
    GeneratorConfig config = generator_path.empty() ? GeneratorConfig::default_config()
                                                    : generator_config_from_json(read_text_file(generator_path));
    if (seed) config.seed = *seed;
    const auto manifest = build_benchmark(config, out_dir);
    std::cout << json{{"manifest", (fs::path(out_dir) / "manifest.json").string()},
                      {"nulls", manifest.nulls.size()},
                      {"queries", manifest.queries.size()}}
                     .dump()
              << "\n";
    return 0;
}

Eigen::RowVector3d ramp(double u)
{
    // blue -> cyan -> green -> yellow -> red
    static const double stops[5][3] = {{0, 0, 1}, {0, 1, 1}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}};
    u = std::clamp(u, 0.0, 1.0) * 4.0;
    const int i = std::min(static_cast<int>(u), 3);
    const double f = u - i;
    Eigen::RowVector3d c;
    for (int ch = 0; ch < 3; ++ch) c(ch) = (1 - f) * stops[i][ch] + f * stops[i + 1][ch];
    return c;
}

int cmd_export_heatfield(const ConfigFlags& flags, const std::string& mesh_path, int source, double t, double eta,
                         const std::string& output)
{
    const RunConfig config = flags.resolve();
    const TexturedMesh mesh = load_mesh(mesh_path);
    if (source < 0 || source >= mesh.num_vertices()) {
        throw InvalidArgument("source vertex " + std::to_string(source) + " out of range");
    }
    const SpectralBasis basis = compute_basis(mesh, eta, config);
    const Eigen::VectorXd values = heat_kernel(basis, t, source);
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    Colors colors(values.size(), 3);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        colors.row(i) = ramp(hi > lo ? (values(i) - lo) / (hi - lo) : 0.0);
    }
    const TexturedMesh out = mesh.with_colors(std::move(colors), ColorSpace::srgb);
    SaveOptions opts;
    opts.scalar_field = &values;
    save_mesh(out, output, MeshFormat::ply, opts);
    std::cout << json{{"output", output}, {"mass_sum", values.dot(basis.mass)}, {"max", hi}}.dump() << "\n";
    return 0;
}

void print_error(const std::string& kind, const std::string& message)
{
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Diffusion-geometry fusion of shape and color"};
    app.require_subcommand(1);

    ConfigFlags flags;

    std::string mesh_path, output, vocab_path, cache_dir, mtx_prefix;
    double eta = 0.0;
    auto* spectrum = app.add_subcommand("spectrum", "Solve and cache the spectral basis of a mesh");
    flags.attach(spectrum);
    spectrum->add_option("mesh", mesh_path)->required();
    spectrum->add_option("--eta", eta, "photometric weight");
    spectrum->add_option("-o,--output", output)->required();
    spectrum->add_option("--export-mtx", mtx_prefix, "also write W and A as Matrix Market");

    std::vector<std::string> vocab_inputs;
    auto* vocab = app.add_subcommand("vocab", "Build a vocabulary set from a manifest's nulls or meshes");
    flags.attach(vocab);
    vocab->add_option("inputs", vocab_inputs)->required();
    vocab->add_option("-o,--output", output)->required();
    vocab->add_option("--cache-dir", cache_dir);

    auto* describe_cmd = app.add_subcommand("describe", "Compute a shape descriptor");
    flags.attach(describe_cmd);
    describe_cmd->add_option("mesh", mesh_path)->required();
    describe_cmd->add_option("--vocab", vocab_path);
    describe_cmd->add_option("-o,--output", output)->required();
    describe_cmd->add_option("--cache-dir", cache_dir);

    std::string manifest_path, csv_path, json_path, vocab_out;
    auto* benchmark = app.add_subcommand("benchmark", "Run the retrieval benchmark of a manifest");
    flags.attach(benchmark);
    benchmark->add_option("manifest", manifest_path)->required();
    benchmark->add_option("--vocab", vocab_path);
    benchmark->add_option("--csv", csv_path);
    benchmark->add_option("--json", json_path);
    benchmark->add_option("--vocab-out", vocab_out);
    benchmark->add_option("--cache-dir", cache_dir);

    std::string generator_path;
    std::optional<std::uint64_t> seed;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark");
    synth->add_option("--generator", generator_path, "JSON generator config");
    synth->add_option("-o,--output", output)->required();
    synth->add_option("--seed", seed);

    int source = 0;
    double t = 1024.0;
    auto* heat = app.add_subcommand("export-heatfield", "Write a heat-kernel row as a colored PLY");
    flags.attach(heat);
    heat->add_option("mesh", mesh_path)->required();
    heat->add_option("--source", source)->required();
    heat->add_option("--t", t);
    heat->add_option("--eta", eta);
    heat->add_option("-o,--output", output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage_error", e.what());
        return 2;
    }

    try {
        if (spectrum->parsed()) return cmd_spectrum(flags, mesh_path, eta, output, mtx_prefix);
        if (vocab->parsed()) return cmd_vocab(flags, vocab_inputs, output, cache_dir);
        if (describe_cmd->parsed()) return cmd_describe(flags, mesh_path, vocab_path, output, cache_dir);
        if (benchmark->parsed()) {
            return cmd_benchmark(flags, manifest_path, vocab_path, csv_path, json_path, vocab_out, cache_dir);
        }
        if (synth->parsed()) return cmd_synth(generator_path, output, seed);
        if (heat->parsed()) return cmd_export_heatfield(flags, mesh_path, source, t, eta, output);
    } catch (const Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal_error", e.what());
        return 1;
    }
    return 1;
}
