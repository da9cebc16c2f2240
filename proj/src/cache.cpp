#include <geofuse/cache.hpp>
#include <geofuse/error.hpp>
#include <geofuse/hash.hpp>

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace geofuse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char spectral_magic[8] = {'G', 'F', 'S', 'P', 'E', 'C', '0', '1'};

static_assert(std::endian::native == std::endian::little, "cache files are written in host byte order");

void write_u64(std::ostream& out, std::uint64_t v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_doubles(std::ostream& out, const double* data, std::size_t count)
{
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_exact(std::istream& in, void* dst, std::size_t bytes, const fs::path& path)
{
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        throw ParseError(path.string(), ParseError::Unit::byte, static_cast<std::uint64_t>(in.tellg()),
                         "truncated spectral cache");
    }
}

json header_to_json(const SpectralCacheHeader& h)
{
    return {{"format", "geofuse-spectrum"},
            {"version", 1},
            {"scheme", h.scheme},
            {"rho", h.rho},
            {"eta", h.eta},
            {"requested_k", h.requested_k},
            {"k", h.k},
            {"num_vertices", h.num_vertices},
            {"color_scale", h.color_scale},
            {"space", h.space},
            {"truncation_eps", h.truncation_eps},
            {"tol", h.tol},
            {"solver_seed", h.solver_seed},
            {"mesh_hash", h.mesh_hash},
            {"key", h.key},
            {"warnings", h.warnings}};
}

SpectralCacheHeader header_from_json(const json& j)
{
    SpectralCacheHeader h;
    h.scheme = j.at("scheme").get<std::string>();
    h.rho = j.at("rho").get<double>();
    h.eta = j.at("eta").get<double>();
    h.requested_k = j.at("requested_k").get<int>();
    h.k = j.at("k").get<int>();
    h.num_vertices = j.at("num_vertices").get<std::int64_t>();
    h.color_scale = j.at("color_scale").get<double>();
    h.space = j.at("space").get<std::string>();
    h.truncation_eps = j.at("truncation_eps").get<double>();
    h.tol = j.at("tol").get<double>();
    h.solver_seed = j.at("solver_seed").get<std::uint64_t>();
    h.mesh_hash = j.at("mesh_hash").get<std::string>();
    h.key = j.at("key").get<std::string>();
    h.warnings = j.at("warnings").get<std::vector<std::string>>();
    return h;
}

std::optional<json> read_header_json(std::istream& in, const fs::path& path)
{
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, spectral_magic, 8) != 0) return std::nullopt;
    std::uint64_t len = 0;
    read_exact(in, &len, sizeof len, path);
    if (len > (1u << 24)) throw ParseError(path.string(), ParseError::Unit::byte, 8, "implausible header length");
    std::string text(len, '\0');
    read_exact(in, text.data(), len, path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(path.string(), ParseError::Unit::byte, 16, std::string("bad header: ") + e.what());
    }
}

} // namespace

SpectralCacheHeader make_spectral_header(
    const TexturedMesh& mesh,
    double eta,
    const RunConfig& config,
    const SpectralBasis& basis)
{
    const bool photometric = config.scheme == LaplacianScheme::fused_gaussian && eta > 0.0;
    SpectralCacheHeader h;
    h.scheme = to_string(config.scheme);
    h.rho = config.scheme == LaplacianScheme::fused_gaussian ? config.rho : 0.0;
    h.eta = eta;
    h.requested_k = config.k;
    h.k = basis.report.k;
    h.num_vertices = basis.num_vertices();
    h.color_scale = photometric ? config.color_scale : 0.0;
    h.space = photometric ? (config.space == PhotometricSpace::lab ? "lab" : "raw_srgb") : "none";
    h.truncation_eps = config.scheme == LaplacianScheme::fused_gaussian ? config.truncation_eps : 0.0;
    h.tol = config.tol;
    h.solver_seed = config.solver_seed;
    h.mesh_hash = hex_digest(content_hash(mesh, photometric));
    h.key = hex_digest(spectral_key(mesh, eta, config));
    h.warnings = basis.report.warnings;
    return h;
}

void write_spectral_cache(const fs::path& path, const SpectralCacheHeader& header, const SpectralBasis& basis)
{
    const std::string text = header_to_json(header).dump();
    const fs::path tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write spectral cache " + path.string());
        out.write(spectral_magic, 8);
        write_u64(out, text.size());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        write_doubles(out, basis.lambdas.data(), static_cast<std::size_t>(basis.lambdas.size()));
        write_doubles(out, basis.mass.data(), static_cast<std::size_t>(basis.mass.size()));
        write_doubles(out, basis.phis.data(), static_cast<std::size_t>(basis.phis.size()));
        if (!out) throw IoError("failed writing spectral cache " + path.string());
    }
    fs::rename(tmp, path);
}

std::optional<SpectralCacheHeader> read_spectral_header(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const auto j = read_header_json(in, path);
        if (!j) return std::nullopt;
        return header_from_json(*j);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

SpectralBasis read_spectral_cache(const fs::path& path, SpectralCacheHeader* header_out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open spectral cache " + path.string());
    const auto j = read_header_json(in, path);
    if (!j) throw ParseError(path.string(), ParseError::Unit::byte, 0, "not a spectral cache file");
    SpectralCacheHeader header;
    try {
        header = header_from_json(*j);
    } catch (const json::exception& e) {
        throw ParseError(path.string(), ParseError::Unit::byte, 16, std::string("bad header: ") + e.what());
    }
    const Eigen::Index n = header.num_vertices;
    const Eigen::Index m = header.k + 1;
    if (n <= 0 || m <= 0) throw ParseError(path.string(), ParseError::Unit::byte, 16, "empty basis");
    SpectralBasis basis;
    basis.lambdas.resize(m);
    basis.mass.resize(n);
    basis.phis.resize(n, m);
    read_exact(in, basis.lambdas.data(), static_cast<std::size_t>(m) * sizeof(double), path);
    read_exact(in, basis.mass.data(), static_cast<std::size_t>(n) * sizeof(double), path);
    read_exact(in, basis.phis.data(), static_cast<std::size_t>(n * m) * sizeof(double), path);
    basis.report.requested_k = header.requested_k;
    basis.report.k = header.k;
    basis.report.warnings = header.warnings;
    if (header_out) *header_out = header;
    return basis;
}

// ---------------------------------------------------------------------------

std::string vocabulary_set_json(const VocabularySet& vocab)
{
    json j;
    j["format"] = "geofuse-vocabulary";
    j["version"] = 1;
    j["times"] = vocab.times;
    j["size"] = vocab.size;
    j["seed"] = vocab.seed;
    j["vocabularies"] = json::array();
    for (const auto& [eta, v] : vocab.by_eta) {
        json centers = json::array();
        for (Eigen::Index r = 0; r < v.centers.rows(); ++r) {
            std::vector<double> row(v.centers.cols());
            for (Eigen::Index c = 0; c < v.centers.cols(); ++c) row[c] = v.centers(r, c);
            centers.push_back(row);
        }
        j["vocabularies"].push_back({{"eta", eta}, {"soft_sigma2", v.soft_sigma2}, {"centers", centers}});
    }
    return j.dump(2) + "\n";
}

VocabularySet parse_vocabulary_set(const std::string& text)
{
    VocabularySet set;
    try {
        const json j = json::parse(text);
        if (j.value("format", std::string()) != "geofuse-vocabulary") {
            throw ValidationError("not a vocabulary file");
        }
        set.times = j.at("times").get<std::vector<double>>();
        set.size = j.at("size").get<int>();
        set.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("vocabularies")) {
            Vocabulary v;
            v.soft_sigma2 = e.at("soft_sigma2").get<double>();
            const auto rows = e.at("centers").get<std::vector<std::vector<double>>>();
            v.centers.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(set.times.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != set.times.size()) throw ValidationError("vocabulary center has wrong dimension");
                for (std::size_t c = 0; c < rows[r].size(); ++c) {
                    v.centers(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
                }
            }
            set.by_eta.emplace(e.at("eta").get<double>(), std::move(v));
        }
    } catch (const json::exception& e) {
        throw Error("parse_error", std::string("vocabulary: ") + e.what());
    }
    return set;
}

void write_vocabulary_set(const fs::path& path, const VocabularySet& vocab)
{
    write_text_file(path, vocabulary_set_json(vocab));
}

VocabularySet read_vocabulary_set(const fs::path& path)
{
    if (!fs::exists(path)) throw IoError("vocabulary file not found: " + path.string());
    return parse_vocabulary_set(read_text_file(path));
}

// ---------------------------------------------------------------------------

std::string descriptor_json(
    const ShapeDescriptor& d,
    const RunConfig& config,
    const std::string& mesh_hash,
    const std::optional<std::string>& vocab_hash)
{
    json j;
    j["type"] = to_string(d.kind);
    json params;
    json payload;
    switch (d.kind) {
    case DescriptorKind::hks_bof:
    case DescriptorKind::chks_bof_multiscale: {
        json etas = json::array();
        for (const auto& [eta, bof] : d.bofs) etas.push_back(eta);
        params = {{"etas", etas}, {"times", config.times}, {"vocab_size", config.vocab_size},
                  {"vocab_seed", config.vocab_seed}, {"rho", config.rho}, {"k", config.k},
                  {"solver_seed", config.solver_seed}};
        payload = json::array();
        for (const auto& [eta, bof] : d.bofs) {
            payload.push_back({{"eta", eta}, {"weights", std::vector<double>(bof.weights.begin(), bof.weights.end())}});
        }
        break;
    }
    case DescriptorKind::color_hist:
        params = {{"bins_per_axis", d.histogram.bins_per_axis}};
        payload = std::vector<double>(d.histogram.weights.begin(), d.histogram.weights.end());
        break;
    case DescriptorKind::dist_distribution_geometric:
    case DescriptorKind::dist_distribution_joint:
        params = {{"etas", required_etas(config)}, {"times", config.times}, {"bins", config.bins},
                  {"fps_count", config.fps_count}, {"rho", config.rho}, {"k", config.k},
                  {"solver_seed", config.solver_seed}};
        payload = {{"bin_edges", d.distribution.bin_edges}, {"cdf", d.distribution.cdf}};
        break;
    }
    j["params"] = params;
    j["payload"] = payload;
    j["mesh_hash"] = mesh_hash;
    j["vocab_hash"] = vocab_hash ? json(*vocab_hash) : json(nullptr);
    return j.dump(2) + "\n";
}

ShapeDescriptor parse_descriptor(const std::string& text)
{
    ShapeDescriptor d;
    try {
        const json j = json::parse(text);
        d.kind = descriptor_kind_from_string(j.at("type").get<std::string>());
        const auto& payload = j.at("payload");
        switch (d.kind) {
        case DescriptorKind::hks_bof:
        case DescriptorKind::chks_bof_multiscale:
            for (const auto& e : payload) {
                const auto w = e.at("weights").get<std::vector<double>>();
                BagOfFeatures bof;
                bof.eta = e.at("eta").get<double>();
                bof.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
                d.bofs.emplace(bof.eta, std::move(bof));
            }
            break;
        case DescriptorKind::color_hist: {
            const auto w = payload.get<std::vector<double>>();
            d.histogram.bins_per_axis = j.at("params").at("bins_per_axis").get<int>();
            d.histogram.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
            break;
        }
        case DescriptorKind::dist_distribution_geometric:
        case DescriptorKind::dist_distribution_joint:
            d.distribution.bin_edges = payload.at("bin_edges").get<std::vector<double>>();
            d.distribution.cdf = payload.at("cdf").get<std::vector<double>>();
            break;
        }
    } catch (const json::exception& e) {
        throw Error("parse_error", std::string("descriptor: ") + e.what());
    }
    return d;
}

std::string read_text_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace geofuse
