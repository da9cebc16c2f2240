#include <geofuse/cache.hpp>
#include <geofuse/error.hpp>
#include <geofuse/hash.hpp>
#include <geofuse/mesh_io.hpp>
#include <geofuse/pipeline.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

namespace geofuse {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(DescriptorKind kind)
{
    switch (kind) {
    case DescriptorKind::hks_bof: return "hks_bof";
    case DescriptorKind::chks_bof_multiscale: return "chks_bof_multiscale";
    case DescriptorKind::color_hist: return "color_hist";
    case DescriptorKind::dist_distribution_geometric: return "dist_distribution_geometric";
    case DescriptorKind::dist_distribution_joint: return "dist_distribution_joint";
    }
    return "unknown";
}

DescriptorKind descriptor_kind_from_string(const std::string& s)
{
    for (auto k : {DescriptorKind::hks_bof, DescriptorKind::chks_bof_multiscale, DescriptorKind::color_hist,
                   DescriptorKind::dist_distribution_geometric, DescriptorKind::dist_distribution_joint}) {
        if (s == to_string(k)) return k;
    }
    throw InvalidArgument("unknown descriptor kind '" + s + "'");
}

bool uses_vocabulary(DescriptorKind kind)
{
    return kind == DescriptorKind::hks_bof || kind == DescriptorKind::chks_bof_multiscale;
}

std::vector<double> required_etas(const RunConfig& config)
{
    switch (config.descriptor) {
    case DescriptorKind::hks_bof:
    case DescriptorKind::dist_distribution_geometric: return {0.0};
    case DescriptorKind::chks_bof_multiscale: return config.etas;
    case DescriptorKind::dist_distribution_joint: return config.dist_etas;
    case DescriptorKind::color_hist: return {};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Config

void validate_config(const RunConfig& c)
{
    if (!(c.rho > 0.0)) throw InvalidArgument("rho must be positive");
    if (c.k < 1) throw InvalidArgument("k must be at least 1");
    if (c.vocab_size < 1) throw InvalidArgument("vocab_size must be at least 1");
    if (c.fps_count < 2) throw InvalidArgument("fps_count must be at least 2");
    if (c.bins < 1 || c.hist_bins < 1) throw InvalidArgument("bin counts must be positive");
    if (!(c.color_scale > 0.0)) throw InvalidArgument("color_scale must be positive");
    if (!(c.truncation_eps > 0.0 && c.truncation_eps < 1.0)) throw InvalidArgument("truncation_eps must lie in (0,1)");
    if (c.times.empty()) throw InvalidArgument("times must not be empty");
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        if (!(c.times[i] > 0.0) || (i > 0 && !(c.times[i] > c.times[i - 1]))) {
            throw InvalidArgument("times must be positive and strictly increasing");
        }
    }
    for (const auto* list : {&c.etas, &c.dist_etas}) {
        if (list->empty()) throw InvalidArgument("eta lists must not be empty");
        for (double e : *list) {
            if (!(e >= 0.0)) throw InvalidArgument("eta values must be nonnegative");
        }
    }
}

namespace {

const char* to_string(SoftSigmaRule r)
{
    return r == SoftSigmaRule::median_distance ? "median_distance" : "median_squared_distance";
}

const char* to_string(PointWeighting w)
{
    return w == PointWeighting::uniform ? "uniform" : "area";
}

const char* to_string(PhotometricSpace s)
{
    return s == PhotometricSpace::raw_srgb ? "raw_srgb" : "lab";
}

template <typename E, std::size_t N>
E enum_from(const std::string& s, const std::array<E, N>& values, const char* what)
{
    for (E v : values) {
        if (s == to_string(v)) return v;
    }
    throw InvalidArgument(std::string("unknown ") + what + " '" + s + "'");
}

} // namespace

RunConfig run_config_from_json(const std::string& text, const RunConfig& base)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("parse_error", std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    static const std::set<std::string> known{
        "scheme", "rho", "etas", "dist_etas", "times", "k", "vocab_size", "vocab_seed", "fps_count",
        "color_scale", "space", "truncation_eps", "descriptor", "bins", "hist_bins", "sigma_rule",
        "weighting", "tol", "solver_seed", "threads"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
    }
    RunConfig c = base;
    try {
        if (j.contains("scheme")) {
            c.scheme = enum_from(j["scheme"].get<std::string>(),
                                 std::array{LaplacianScheme::cotangent, LaplacianScheme::fused_gaussian}, "scheme");
        }
        if (j.contains("rho")) c.rho = j["rho"].get<double>();
        if (j.contains("etas")) c.etas = j["etas"].get<std::vector<double>>();
        if (j.contains("dist_etas")) c.dist_etas = j["dist_etas"].get<std::vector<double>>();
        if (j.contains("times")) c.times = j["times"].get<std::vector<double>>();
        if (j.contains("k")) c.k = j["k"].get<int>();
        if (j.contains("vocab_size")) c.vocab_size = j["vocab_size"].get<int>();
        if (j.contains("vocab_seed")) c.vocab_seed = j["vocab_seed"].get<std::uint64_t>();
        if (j.contains("fps_count")) c.fps_count = j["fps_count"].get<int>();
        if (j.contains("color_scale")) c.color_scale = j["color_scale"].get<double>();
        if (j.contains("space")) {
            c.space = enum_from(j["space"].get<std::string>(),
                                std::array{PhotometricSpace::lab, PhotometricSpace::raw_srgb}, "space");
        }
        if (j.contains("truncation_eps")) c.truncation_eps = j["truncation_eps"].get<double>();
        if (j.contains("descriptor")) c.descriptor = descriptor_kind_from_string(j["descriptor"].get<std::string>());
        if (j.contains("bins")) c.bins = j["bins"].get<int>();
        if (j.contains("hist_bins")) c.hist_bins = j["hist_bins"].get<int>();
        if (j.contains("sigma_rule")) {
            c.sigma_rule = enum_from(j["sigma_rule"].get<std::string>(),
                                     std::array{SoftSigmaRule::median_squared_distance, SoftSigmaRule::median_distance},
                                     "sigma rule");
        }
        if (j.contains("weighting")) {
            c.weighting = enum_from(j["weighting"].get<std::string>(),
                                    std::array{PointWeighting::area, PointWeighting::uniform}, "weighting");
        }
        if (j.contains("tol")) c.tol = j["tol"].get<double>();
        if (j.contains("solver_seed")) c.solver_seed = j["solver_seed"].get<std::uint64_t>();
        if (j.contains("threads")) c.threads = j["threads"].get<int>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    validate_config(c);
    return c;
}

std::string run_config_to_json(const RunConfig& c)
{
    json j;
    j["scheme"] = to_string(c.scheme);
    j["rho"] = c.rho;
    j["etas"] = c.etas;
    j["dist_etas"] = c.dist_etas;
    j["times"] = c.times;
    j["k"] = c.k;
    j["vocab_size"] = c.vocab_size;
    j["vocab_seed"] = c.vocab_seed;
    j["fps_count"] = c.fps_count;
    j["color_scale"] = c.color_scale;
    j["space"] = to_string(c.space);
    j["truncation_eps"] = c.truncation_eps;
    j["descriptor"] = to_string(c.descriptor);
    j["bins"] = c.bins;
    j["hist_bins"] = c.hist_bins;
    j["sigma_rule"] = to_string(c.sigma_rule);
    j["weighting"] = to_string(c.weighting);
    j["tol"] = c.tol;
    j["solver_seed"] = c.solver_seed;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Spectra

LaplacianPair assemble(const TexturedMesh& mesh, double eta, const RunConfig& config)
{
    const VertexAreas areas = vertex_areas(mesh);
    if (config.scheme == LaplacianScheme::cotangent) {
        if (eta != 0.0) throw InvalidArgument("the cotangent scheme is geometry-only; eta must be 0");
        return assemble_cotangent(mesh, areas);
    }
    const JointEmbedding emb = build_embedding(mesh, eta, {config.color_scale, config.space});
    FusedOptions opts;
    opts.rho = config.rho;
    opts.truncation_eps = config.truncation_eps;
    return assemble_fused(emb, areas, opts);
}

SpectralBasis compute_basis(const TexturedMesh& mesh, double eta, const RunConfig& config)
{
    SolveOptions opts;
    opts.tol = config.tol;
    opts.seed = config.solver_seed;
    return solve(assemble(mesh, eta, config), config.k, opts);
}

std::uint64_t spectral_key(const TexturedMesh& mesh, double eta, const RunConfig& config)
{
    const bool fused = config.scheme == LaplacianScheme::fused_gaussian;
    const bool photometric = fused && eta > 0.0;
    Fnv1a h;
    h.update("geofuse-spectrum-v1");
    h.update_value(content_hash(mesh, photometric));
    h.update(to_string(config.scheme));
    h.update_value(eta);
    h.update_value(config.k);
    h.update_value(config.tol);
    h.update_value(config.solver_seed);
    if (fused) {
        h.update_value(config.rho);
        h.update_value(config.truncation_eps);
    }
    if (photometric) {
        h.update_value(config.color_scale);
        h.update(to_string(config.space));
    }
    return h.digest();
}

BasisCache::BasisCache(std::optional<fs::path> directory) : m_directory(std::move(directory))
{
    if (m_directory) fs::create_directories(*m_directory);
}

std::shared_ptr<const SpectralBasis> BasisCache::get(const TexturedMesh& mesh, double eta, const RunConfig& config)
{
    const std::uint64_t key = spectral_key(mesh, eta, config);
    {
        std::lock_guard lock(m_mutex);
        auto it = m_bases.find(key);
        if (it != m_bases.end()) {
            ++m_hits;
            return it->second;
        }
    }
    std::shared_ptr<const SpectralBasis> basis;
    bool solved = false;
    std::optional<fs::path> file;
    if (m_directory) {
        file = *m_directory / (hex_digest(key) + ".gfspec");
        const auto header = read_spectral_header(*file);
        if (header && header->key == hex_digest(key)) basis = std::make_shared<SpectralBasis>(read_spectral_cache(*file));
    }
    if (!basis) {
        auto computed = compute_basis(mesh, eta, config);
        if (file) write_spectral_cache(*file, make_spectral_header(mesh, eta, config, computed), computed);
        basis = std::make_shared<SpectralBasis>(std::move(computed));
        solved = true;
    }
    std::lock_guard lock(m_mutex);
    if (solved) ++m_solves;
    else ++m_hits;
    return m_bases.emplace(key, basis).first->second;
}

int BasisCache::solves() const
{
    std::lock_guard lock(m_mutex);
    return m_solves;
}

int BasisCache::hits() const
{
    std::lock_guard lock(m_mutex);
    return m_hits;
}

// ---------------------------------------------------------------------------
// Vocabulary

const Vocabulary& VocabularySet::at(double eta) const
{
    auto it = by_eta.find(eta);
    if (it == by_eta.end()) {
        throw ValidationError("vocabulary has no entry for eta=" + json(eta).dump());
    }
    return it->second;
}

std::uint64_t VocabularySet::hash() const
{
    return hash_bytes(vocabulary_set_json(*this));
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn)
{
    if (n <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

VocabularySet build_vocabulary_set(std::span<const TexturedMesh> meshes, const RunConfig& config, BasisCache& cache)
{
    if (!uses_vocabulary(config.descriptor)) {
        throw InvalidArgument(std::string("descriptor '") + to_string(config.descriptor) + "' has no vocabulary");
    }
    if (meshes.empty()) throw InvalidArgument("no shapes to build a vocabulary from");
    VocabularySet set;
    set.times = config.times;
    set.size = config.vocab_size;
    set.seed = config.vocab_seed;
    for (double eta : required_etas(config)) {
        std::vector<HksDescriptorField> fields(meshes.size());
        parallel_for(static_cast<int>(meshes.size()), config.threads, [&](int i) {
            fields[i] = hks_field(*cache.get(meshes[i], eta, config), config.times, eta);
        });
        VocabularyOptions opts;
        opts.sigma_rule = config.sigma_rule;
        set.by_eta.emplace(eta, build_vocabulary(fields, config.vocab_size, config.vocab_seed, opts));
    }
    return set;
}

// ---------------------------------------------------------------------------
// Descriptors

namespace {

void check_vocabulary(const VocabularySet& vocab, const RunConfig& config)
{
    if (vocab.times != config.times) throw ValidationError("vocabulary was built for different HKS times");
    for (double eta : required_etas(config)) {
        const auto& v = vocab.at(eta);
        if (v.dimension() != static_cast<Eigen::Index>(config.times.size())) {
            throw ValidationError("vocabulary dimension does not match the number of HKS times");
        }
    }
}

} // namespace

ShapeDescriptor describe(const TexturedMesh& mesh, const RunConfig& config, const VocabularySet* vocab, BasisCache& cache)
{
    ShapeDescriptor d;
    d.kind = config.descriptor;
    const VertexAreas areas = vertex_areas(mesh);
    switch (config.descriptor) {
    case DescriptorKind::hks_bof:
    case DescriptorKind::chks_bof_multiscale: {
        if (!vocab) throw InvalidArgument(std::string(to_string(config.descriptor)) + " requires a vocabulary");
        check_vocabulary(*vocab, config);
        for (double eta : required_etas(config)) {
            const auto field = hks_field(*cache.get(mesh, eta, config), config.times, eta);
            d.bofs.emplace(eta, bag_of_features(vocab->at(eta), field, areas, config.weighting));
        }
        break;
    }
    case DescriptorKind::color_hist:
        d.histogram = color_histogram(mesh, areas, config.hist_bins, config.weighting);
        break;
    case DescriptorKind::dist_distribution_geometric:
    case DescriptorKind::dist_distribution_joint: {
        const auto etas = required_etas(config);
        std::vector<std::shared_ptr<const SpectralBasis>> owned;
        BasisByEta bases;
        for (double eta : etas) {
            owned.push_back(cache.get(mesh, eta, config));
            bases[eta] = owned.back().get();
        }
        const int count = std::min<int>(config.fps_count, static_cast<int>(mesh.vertices().rows()));
        const auto sample = farthest_point_sample(mesh, count, 0);
        const Eigen::MatrixXd dist = multiscale_distance_matrix(bases, config.times, etas, sample);
        d.distribution = distance_distribution_from_matrix(dist, sample, areas, config.bins);
        break;
    }
    }
    return d;
}

double descriptor_distance(const ShapeDescriptor& a, const ShapeDescriptor& b, const RunConfig& config)
{
    if (a.kind != b.kind) throw InvalidArgument("cannot compare descriptors of different kinds");
    switch (a.kind) {
    case DescriptorKind::hks_bof: return bof_distance_single(a.bofs.at(0.0), b.bofs.at(0.0));
    case DescriptorKind::chks_bof_multiscale: return bof_distance_multiscale(a.bofs, b.bofs, config.etas);
    case DescriptorKind::color_hist: return color_histogram_distance(a.histogram, b.histogram);
    case DescriptorKind::dist_distribution_geometric:
    case DescriptorKind::dist_distribution_joint: return distribution_distance(a.distribution, b.distribution);
    }
    throw InvalidArgument("unknown descriptor kind");
}

// ---------------------------------------------------------------------------
// Benchmark

BenchmarkResult run_benchmark(
    const BenchmarkManifest& manifest,
    const RunConfig& config,
    const VocabularySet* vocab,
    BasisCache* cache)
{
    manifest.validate();
    BasisCache local;
    BasisCache& bases = cache ? *cache : local;

    const auto corpus = manifest.corpus();
    std::vector<std::pair<std::string, fs::path>> shapes;
    for (const auto& n : corpus) shapes.emplace_back(n.shape_id, n.path);
    for (const auto& q : manifest.queries) shapes.emplace_back(q.shape_id, q.path);

    auto named = [&](int i, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw Error(e.kind(), "shape '" + shapes[i].first + "' (" + shapes[i].second.string() + "): " + e.what());
        }
    };

    std::vector<std::optional<TexturedMesh>> loaded(shapes.size());
    parallel_for(static_cast<int>(shapes.size()), config.threads, [&](int i) {
        named(i, [&] { loaded[i].emplace(load_mesh(shapes[i].second)); });
    });
    std::vector<TexturedMesh> meshes;
    meshes.reserve(shapes.size());
    for (auto& m : loaded) meshes.push_back(std::move(*m));

    BenchmarkResult result;
    if (uses_vocabulary(config.descriptor)) {
        if (vocab) {
            result.vocabulary = *vocab;
        } else {
            std::span<const TexturedMesh> nulls(meshes.data(), manifest.nulls.size());
            result.vocabulary = build_vocabulary_set(nulls, config, bases);
        }
    }
    const VocabularySet* v = result.vocabulary ? &*result.vocabulary : nullptr;

    std::vector<ShapeDescriptor> descriptors(shapes.size());
    parallel_for(static_cast<int>(shapes.size()), config.threads, [&](int i) {
        named(i, [&] { descriptors[i] = describe(meshes[i], config, v, bases); });
    });

    const std::span<const ShapeDescriptor> all(descriptors);
    result.rankings = rank_queries<ShapeDescriptor>(
        manifest, all.first(corpus.size()), all.subspan(corpus.size()),
        [&](const ShapeDescriptor& a, const ShapeDescriptor& b) { return descriptor_distance(a, b, config); });
    result.report = evaluate(manifest, result.rankings);
    return result;
}

} // namespace geofuse
