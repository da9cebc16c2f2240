#include <geofuse/color.hpp>
#include <geofuse/embedding.hpp>
#include <geofuse/error.hpp>
#include <geofuse/hash.hpp>
#include <geofuse/mesh_io.hpp>
#include <geofuse/synth.hpp>

#include <Eigen/Geometry>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace geofuse {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(PrimitiveKind k)
{
    switch (k) {
    case PrimitiveKind::icosphere: return "icosphere";
    case PrimitiveKind::torus: return "torus";
    case PrimitiveKind::capsule: return "cylinder_capsule";
    }
    return "unknown";
}

const char* to_string(TexturePattern p)
{
    switch (p) {
    case TexturePattern::none: return "none";
    case TexturePattern::uniform: return "uniform";
    case TexturePattern::stripes: return "stripes";
    case TexturePattern::checker: return "checker";
    }
    return "unknown";
}

PrimitiveKind primitive_kind_from_string(const std::string& s)
{
    if (s == "capsule") return PrimitiveKind::capsule;
    for (auto k : {PrimitiveKind::icosphere, PrimitiveKind::torus, PrimitiveKind::capsule}) {
        if (s == to_string(k)) return k;
    }
    throw InvalidArgument("unknown primitive '" + s + "'");
}

TexturePattern texture_pattern_from_string(const std::string& s)
{
    for (auto p : {TexturePattern::none, TexturePattern::uniform, TexturePattern::stripes, TexturePattern::checker}) {
        if (s == to_string(p)) return p;
    }
    throw InvalidArgument("unknown texture pattern '" + s + "'");
}

const char* to_string(PhotometricKind k)
{
    switch (k) {
    case PhotometricKind::contrast: return "contrast";
    case PhotometricKind::brightness: return "brightness";
    case PhotometricKind::hue: return "hue";
    case PhotometricKind::saturation: return "saturation";
    case PhotometricKind::color_noise: return "color_noise";
    }
    return "unknown";
}

const char* to_string(GeometricKind k)
{
    switch (k) {
    case GeometricKind::rigid: return "rigid";
    case GeometricKind::vertex_jitter: return "vertex_jitter";
    case GeometricKind::hole_cut: return "hole_cut";
    }
    return "unknown";
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Primitives

TexturedMesh make_icosphere(int subdivisions, double radius)
{
    if (subdivisions < 0) throw InvalidArgument("subdivision level must be nonnegative");
    if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const int id = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    Vertices V(static_cast<Eigen::Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = radius * verts[i].transpose();
    Triangles F(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) {
        F.row(static_cast<Eigen::Index>(i)) << faces[i][0], faces[i][1], faces[i][2];
    }
    return TexturedMesh(std::move(V), std::move(F));
}

TexturedMesh make_torus(double major_radius, double minor_radius, int segments_u, int segments_v)
{
    if (!(major_radius > minor_radius && minor_radius > 0.0)) throw InvalidArgument("need R > r > 0");
    if (segments_u < 3 || segments_v < 3) throw InvalidArgument("torus needs at least 3 segments per direction");
    Vertices V(static_cast<Eigen::Index>(segments_u) * segments_v, 3);
    for (int i = 0; i < segments_u; ++i) {
        const double u = 2.0 * std::numbers::pi * i / segments_u;
        for (int j = 0; j < segments_v; ++j) {
            const double v = 2.0 * std::numbers::pi * j / segments_v;
            const double ring = major_radius + minor_radius * std::cos(v);
            V.row(i * segments_v + j) << ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(v);
        }
    }
    Triangles F(2 * static_cast<Eigen::Index>(segments_u) * segments_v, 3);
    Eigen::Index t = 0;
    for (int i = 0; i < segments_u; ++i) {
        for (int j = 0; j < segments_v; ++j) {
            const int a = i * segments_v + j;
            const int b = ((i + 1) % segments_u) * segments_v + j;
            const int c = ((i + 1) % segments_u) * segments_v + (j + 1) % segments_v;
            const int d = i * segments_v + (j + 1) % segments_v;
            F.row(t++) << a, b, c;
            F.row(t++) << a, c, d;
        }
    }
    return TexturedMesh(std::move(V), std::move(F));
}

TexturedMesh make_capsule(double radius, double half_length, int segments, int cap_rings, int body_rings)
{
    if (!(radius > 0.0 && half_length >= 0.0)) throw InvalidArgument("invalid capsule dimensions");
    if (segments < 3 || cap_rings < 1 || body_rings < 1) throw InvalidArgument("capsule resolution too low");
    // Profile from the south pole to the north pole, excluding the poles.
    std::vector<std::pair<double, double>> profile; // (ring radius, z)
    for (int k = 1; k <= cap_rings; ++k) {
        const double theta = -std::numbers::pi / 2 + (std::numbers::pi / 2) * k / cap_rings;
        profile.emplace_back(radius * std::cos(theta), -half_length + radius * std::sin(theta));
    }
    for (int k = 1; k < body_rings; ++k) {
        profile.emplace_back(radius, -half_length + 2.0 * half_length * k / body_rings);
    }
    for (int k = 0; k < cap_rings; ++k) {
        const double theta = (std::numbers::pi / 2) * k / cap_rings;
        profile.emplace_back(radius * std::cos(theta), half_length + radius * std::sin(theta));
    }
    const auto rings = static_cast<int>(profile.size());
    Vertices V(static_cast<Eigen::Index>(rings) * segments + 2, 3);
    V.row(0) << 0.0, 0.0, -half_length - radius;
    for (int r = 0; r < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            const double a = 2.0 * std::numbers::pi * s / segments;
            V.row(1 + r * segments + s) << profile[r].first * std::cos(a), profile[r].first * std::sin(a),
                profile[r].second;
        }
    }
    const int north = rings * segments + 1;
    V.row(north) << 0.0, 0.0, half_length + radius;

    std::vector<std::array<int, 3>> faces;
    auto ring_vertex = [&](int r, int s) { return 1 + r * segments + (s % segments); };
    for (int s = 0; s < segments; ++s) faces.push_back({0, ring_vertex(0, s + 1), ring_vertex(0, s)});
    for (int r = 0; r + 1 < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            faces.push_back({ring_vertex(r, s), ring_vertex(r, s + 1), ring_vertex(r + 1, s + 1)});
            faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s + 1), ring_vertex(r + 1, s)});
        }
    }
    for (int s = 0; s < segments; ++s) faces.push_back({north, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1)});
    Triangles F(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) {
        F.row(static_cast<Eigen::Index>(i)) << faces[i][0], faces[i][1], faces[i][2];
    }
    return TexturedMesh(std::move(V), std::move(F));
}

TexturedMesh apply_texture(const TexturedMesh& mesh, TexturePattern pattern, double scale)
{
    if (pattern == TexturePattern::none) return mesh.without_colors();
    const auto& V = mesh.vertices();
    Colors C(V.rows(), 3);
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        const Eigen::RowVector3d p = V.row(i) / scale;
        switch (pattern) {
        case TexturePattern::uniform: C.row(i) << 0.8, 0.6, 0.4; break;
        case TexturePattern::stripes: {
            const auto band = static_cast<long long>(std::floor(p(2) * 2.5));
            if (band % 2 == 0) C.row(i) << 0.85, 0.15, 0.15;
            else C.row(i) << 0.95, 0.95, 0.90;
            break;
        }
        case TexturePattern::checker: {
            const long long parity = static_cast<long long>(std::floor(p(0) * 1.5)) +
                                     static_cast<long long>(std::floor(p(1) * 1.5)) +
                                     static_cast<long long>(std::floor(p(2) * 1.5));
            if (((parity % 2) + 2) % 2 == 0) C.row(i) << 0.15, 0.25, 0.80;
            else C.row(i) << 0.95, 0.85, 0.20;
            break;
        }
        case TexturePattern::none: break;
        }
    }
    return mesh.with_colors(std::move(C), ColorSpace::srgb);
}

TexturedMesh make_primitive(PrimitiveKind kind, int resolution, TexturePattern pattern, double scale)
{
    if (resolution < 1 && kind != PrimitiveKind::icosphere) throw InvalidArgument("resolution must be positive");
    if (!(scale > 0.0)) throw InvalidArgument("scale must be positive");
    TexturedMesh mesh = [&] {
        switch (kind) {
        case PrimitiveKind::icosphere: return make_icosphere(resolution, scale);
        case PrimitiveKind::torus: return make_torus(scale, 0.4 * scale, 12 * resolution, 6 * resolution);
        case PrimitiveKind::capsule:
            return make_capsule(0.5 * scale, 0.75 * scale, 10 * resolution, 2 * resolution, 4 * resolution);
        }
        throw InvalidArgument("unknown primitive");
    }();
    return apply_texture(mesh, pattern, scale);
}

// ---------------------------------------------------------------------------
// Photometric

PhotometricTables PhotometricTables::identity()
{
    PhotometricTables t;
    t.contrast.fill(1.0);
    t.brightness.fill(0.0);
    t.hue.fill(0.0);
    t.saturation.fill(1.0);
    t.noise_sigma.fill(0.0);
    return t;
}

TexturedMesh apply_photometric(
    const TexturedMesh& mesh,
    const PhotometricTransform& transform,
    const PhotometricTables& tables)
{
    if (!mesh.has_colors()) throw InvalidArgument("photometric transform requires per-vertex colors");
    if (transform.strength < 1 || transform.strength > 5) throw InvalidArgument("strength must lie in 1..5");
    const auto s = static_cast<std::size_t>(transform.strength - 1);
    Colors lab = colors_as_lab(mesh);
    const auto& V = mesh.vertices();
    for (Eigen::Index i = 0; i < lab.rows(); ++i) {
        switch (transform.kind) {
        case PhotometricKind::contrast:
            lab(i, 0) = std::clamp(50.0 + tables.contrast[s] * (lab(i, 0) - 50.0), 0.0, 100.0);
            break;
        case PhotometricKind::brightness:
            lab(i, 0) = std::clamp(lab(i, 0) + tables.brightness[s], 0.0, 100.0);
            break;
        case PhotometricKind::hue: lab(i, 1) += tables.hue[s]; break;
        case PhotometricKind::saturation:
            lab(i, 1) *= tables.saturation[s];
            lab(i, 2) *= tables.saturation[s];
            break;
        case PhotometricKind::color_noise: {
            const double sigma = tables.noise_sigma[s];
            if (sigma == 0.0) break;
            Fnv1a h;
            h.update_value(transform.seed);
            h.update(V.row(i).data(), 3 * sizeof(double));
            std::mt19937_64 rng(h.digest());
            std::normal_distribution<double> normal(0.0, sigma);
            for (int c = 0; c < 3; ++c) lab(i, c) += normal(rng);
            break;
        }
        }
    }
    return mesh.with_colors(std::move(lab), ColorSpace::lab);
}

// ---------------------------------------------------------------------------
// Geometric

namespace {

TexturedMesh cut_hole(const TexturedMesh& mesh, double radius, std::uint64_t seed)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, V.rows() - 1);
    const Eigen::RowVector3d center = V.row(pick(rng));

    std::vector<int> kept;
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        const Eigen::RowVector3d centroid = (V.row(F(t, 0)) + V.row(F(t, 1)) + V.row(F(t, 2))) / 3.0;
        if ((centroid - center).norm() >= radius) kept.push_back(static_cast<int>(t));
    }
    if (kept.empty()) throw ValidationError("hole cut removed every triangle");

    std::vector<int> remap(static_cast<std::size_t>(V.rows()), -1);
    int next = 0;
    for (int t : kept) {
        for (int c = 0; c < 3; ++c) {
            if (remap[F(t, c)] < 0) remap[F(t, c)] = next++;
        }
    }
    // Preserve the original vertex order among survivors.
    std::vector<int> order;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        if (remap[i] >= 0) order.push_back(static_cast<int>(i));
    }
    for (std::size_t k = 0; k < order.size(); ++k) remap[order[k]] = static_cast<int>(k);

    Vertices nv(static_cast<Eigen::Index>(order.size()), 3);
    for (std::size_t k = 0; k < order.size(); ++k) nv.row(static_cast<Eigen::Index>(k)) = V.row(order[k]);
    Triangles nf(static_cast<Eigen::Index>(kept.size()), 3);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        for (int c = 0; c < 3; ++c) nf(static_cast<Eigen::Index>(k), c) = remap[F(kept[k], c)];
    }
    TexturedMesh out = [&] {
        if (!mesh.has_colors()) return TexturedMesh(std::move(nv), std::move(nf));
        Colors nc(static_cast<Eigen::Index>(order.size()), 3);
        for (std::size_t k = 0; k < order.size(); ++k) nc.row(static_cast<Eigen::Index>(k)) = mesh.colors().row(order[k]);
        return TexturedMesh(std::move(nv), std::move(nf), std::move(nc), mesh.colorspace());
    }();

    const auto [components, labels] = connected_components(out);
    if (components > 1) {
        std::vector<int> sizes(static_cast<std::size_t>(components), 0);
        for (int l : labels) {
            if (l >= 0) ++sizes[l];
        }
        std::string desc;
        for (int c = 0; c < components; ++c) {
            desc += (c ? ", " : "") + std::string("component ") + std::to_string(c) + ": " +
                    std::to_string(sizes[c]) + " vertices";
        }
        throw ValidationError("hole cut disconnects the mesh (" + desc + ")");
    }
    return out;
}

} // namespace

TexturedMesh apply_geometric(
    const TexturedMesh& mesh,
    GeometricKind kind,
    double strength,
    std::uint64_t seed,
    const GeometricOptions& options)
{
    if (!(strength >= 0.0)) throw InvalidArgument("strength must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    switch (kind) {
    case GeometricKind::rigid: {
        Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
        q.normalize();
        const Eigen::Matrix3d R = q.toRotationMatrix();
        const auto& V = mesh.vertices();
        const double extent = (V.colwise().maxCoeff() - V.colwise().minCoeff()).norm();
        const Eigen::RowVector3d shift(normal(rng), normal(rng), normal(rng));
        const Eigen::RowVector3d translation = 0.1 * strength * extent * shift;
        Vertices moved = (V * R.transpose()).rowwise() + translation;
        return mesh.with_vertices(std::move(moved));
    }
    case GeometricKind::vertex_jitter: {
        if (strength == 0.0) return mesh;
        const double sigma = strength * options.jitter_scale * mean_edge_length(mesh);
        Vertices moved = mesh.vertices();
        for (Eigen::Index i = 0; i < moved.size(); ++i) moved.data()[i] += sigma * normal(rng);
        return mesh.with_vertices(std::move(moved));
    }
    case GeometricKind::hole_cut: {
        if (strength == 0.0) return mesh;
        return cut_hole(mesh, strength * options.hole_scale * mean_edge_length(mesh), seed);
    }
    }
    throw InvalidArgument("unknown geometric transform");
}

// ---------------------------------------------------------------------------
// Benchmark generation

GeneratorConfig GeneratorConfig::default_config()
{
    GeneratorConfig c;
    c.nulls = {
        {"sphere_stripes", PrimitiveKind::icosphere, 3, TexturePattern::stripes, 40.0},
        {"torus_checker", PrimitiveKind::torus, 3, TexturePattern::checker, 40.0},
        {"capsule_stripes", PrimitiveKind::capsule, 3, TexturePattern::stripes, 40.0},
        {"sphere_checker", PrimitiveKind::icosphere, 3, TexturePattern::checker, 40.0},
        {"torus_stripes", PrimitiveKind::torus, 3, TexturePattern::stripes, 40.0},
    };
    c.classes.assign(all_transform_classes.begin(), all_transform_classes.end());
    return c;
}

namespace {

template <typename T>
std::array<double, 5> table_or(const json& j, const char* key, const std::array<double, 5>& fallback)
{
    if (!j.contains(key)) return fallback;
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != 5) throw InvalidArgument(std::string("table '") + key + "' needs five entries");
    std::array<double, 5> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

} // namespace

GeneratorConfig generator_config_from_json(const std::string& text)
{
    GeneratorConfig c = GeneratorConfig::default_config();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("parse_error", std::string("generator config: ") + e.what());
    }
    try {
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("nulls")) {
            c.nulls.clear();
            for (const auto& n : j.at("nulls")) {
                NullShapeSpec s;
                s.shape_id = n.at("shape_id").get<std::string>();
                s.kind = primitive_kind_from_string(n.value("primitive", std::string("icosphere")));
                s.resolution = n.value("resolution", 3);
                s.pattern = texture_pattern_from_string(n.value("pattern", std::string("stripes")));
                s.scale = n.value("scale", 1.0);
                c.nulls.push_back(s);
            }
        }
        if (j.contains("classes")) {
            c.classes.clear();
            for (const auto& name : j.at("classes")) c.classes.push_back(transform_class_from_string(name.get<std::string>()));
        }
        if (j.contains("strengths")) c.strengths = j.at("strengths").get<std::vector<int>>();
        if (j.contains("tables")) {
            const auto& t = j.at("tables");
            c.tables.contrast = table_or<double>(t, "contrast", c.tables.contrast);
            c.tables.brightness = table_or<double>(t, "brightness", c.tables.brightness);
            c.tables.hue = table_or<double>(t, "hue", c.tables.hue);
            c.tables.saturation = table_or<double>(t, "saturation", c.tables.saturation);
            c.tables.noise_sigma = table_or<double>(t, "noise", c.tables.noise_sigma);
        }
        if (j.contains("jitter_scale")) c.geometric.jitter_scale = j.at("jitter_scale").get<double>();
        if (j.contains("hole_scale")) c.geometric.hole_scale = j.at("hole_scale").get<double>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("generator config: ") + e.what());
    }
    for (int s : c.strengths) {
        if (s < 1 || s > 5) throw InvalidArgument("strengths must lie in 1..5");
    }
    return c;
}

std::string generator_config_to_json(const GeneratorConfig& c)
{
    json j;
    j["seed"] = c.seed;
    j["nulls"] = json::array();
    for (const auto& n : c.nulls) {
        j["nulls"].push_back({{"shape_id", n.shape_id},
                              {"primitive", to_string(n.kind)},
                              {"resolution", n.resolution},
                              {"pattern", to_string(n.pattern)},
                              {"scale", n.scale}});
    }
    j["classes"] = json::array();
    for (auto cls : c.classes) j["classes"].push_back(to_string(cls));
    j["strengths"] = c.strengths;
    j["tables"] = {{"contrast", c.tables.contrast},
                   {"brightness", c.tables.brightness},
                   {"hue", c.tables.hue},
                   {"saturation", c.tables.saturation},
                   {"noise", c.tables.noise_sigma}};
    j["jitter_scale"] = c.geometric.jitter_scale;
    j["hole_scale"] = c.geometric.hole_scale;
    return j.dump(2) + "\n";
}

namespace {

PhotometricKind photometric_for(TransformClass c)
{
    switch (c) {
    case TransformClass::contrast: return PhotometricKind::contrast;
    case TransformClass::brightness: return PhotometricKind::brightness;
    case TransformClass::hue: return PhotometricKind::hue;
    case TransformClass::saturation: return PhotometricKind::saturation;
    case TransformClass::noise: return PhotometricKind::color_noise;
    default: break;
    }
    throw InvalidArgument("not a photometric class");
}

} // namespace

TexturedMesh make_query(
    const TexturedMesh& null_shape,
    TransformClass transform_class,
    int strength,
    std::uint64_t seed,
    const GeneratorConfig& config)
{
    switch (transform_class) {
    case TransformClass::isometry_topology: {
        const auto moved = apply_geometric(null_shape, GeometricKind::rigid, 1.0, mix_seed(seed, 1), config.geometric);
        return apply_geometric(moved, GeometricKind::vertex_jitter, strength, mix_seed(seed, 2), config.geometric);
    }
    case TransformClass::partiality:
        return apply_geometric(null_shape, GeometricKind::hole_cut, strength, mix_seed(seed, 3), config.geometric);
    case TransformClass::mixed: {
        auto mesh = apply_geometric(null_shape, GeometricKind::rigid, 1.0, mix_seed(seed, 1), config.geometric);
        mesh = apply_geometric(mesh, GeometricKind::vertex_jitter, strength, mix_seed(seed, 2), config.geometric);
        std::vector<PhotometricKind> kinds{PhotometricKind::contrast, PhotometricKind::brightness,
                                           PhotometricKind::hue, PhotometricKind::saturation,
                                           PhotometricKind::color_noise};
        std::mt19937_64 rng(mix_seed(seed, 4));
        std::uniform_int_distribution<std::size_t> first(0, kinds.size() - 1);
        const std::size_t a = first(rng);
        std::uniform_int_distribution<std::size_t> second(0, kinds.size() - 2);
        std::size_t b = second(rng);
        if (b >= a) ++b;
        mesh = apply_photometric(mesh, {kinds[a], strength, mix_seed(seed, 5)}, config.tables);
        return apply_photometric(mesh, {kinds[b], strength, mix_seed(seed, 6)}, config.tables);
    }
    default:
        return apply_photometric(null_shape, {photometric_for(transform_class), strength, mix_seed(seed, 7)}, config.tables);
    }
}

BenchmarkManifest build_benchmark(const GeneratorConfig& config, const fs::path& out_dir)
{
    if (config.nulls.empty()) throw InvalidArgument("generator config lists no null shapes");
    fs::create_directories(out_dir / "nulls");
    fs::create_directories(out_dir / "queries");
    BenchmarkManifest manifest;
    for (std::size_t n = 0; n < config.nulls.size(); ++n) {
        const auto& spec = config.nulls[n];
        const TexturedMesh null_shape = make_primitive(spec.kind, spec.resolution, spec.pattern, spec.scale);
        const fs::path null_rel = fs::path("nulls") / (spec.shape_id + ".ply");
        save_mesh(null_shape, out_dir / null_rel);
        manifest.nulls.push_back({spec.shape_id, null_rel});

        for (auto cls : config.classes) {
            for (int strength : config.strengths) {
                const std::uint64_t seed =
                    mix_seed(mix_seed(mix_seed(config.seed, n), static_cast<std::uint64_t>(cls)), strength);
                const TexturedMesh query = make_query(null_shape, cls, strength, seed, config);
                const fs::path rel =
                    fs::path("queries") / (spec.shape_id + "_" + to_string(cls) + "_" + std::to_string(strength) + ".ply");
                save_mesh(query, out_dir / rel);
                manifest.queries.push_back({spec.shape_id, rel, cls, strength});
            }
        }
    }
    manifest.validate();
    save_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

} // namespace geofuse
