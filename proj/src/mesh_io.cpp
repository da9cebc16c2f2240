#include <geofuse/error.hpp>
#include <geofuse/mesh_io.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace geofuse {

namespace fs = std::filesystem;

std::optional<MeshFormat> format_from_extension(const fs::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off" || ext == ".coff") return MeshFormat::off;
    if (ext == ".obj") return MeshFormat::obj;
    if (ext == ".ply") return MeshFormat::ply;
    return std::nullopt;
}

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

/// Line-oriented cursor over a text buffer that tracks 1-based line numbers.
class LineReader
{
public:
    LineReader(std::string_view text, std::string path) : m_text(text), m_path(std::move(path)) {}

    /// Next line with comments (`#`) stripped and non-empty content.
    bool next(std::string_view& line)
    {
        while (m_pos < m_text.size()) {
            std::size_t end = m_text.find('\n', m_pos);
            if (end == std::string_view::npos) end = m_text.size();
            std::string_view raw = m_text.substr(m_pos, end - m_pos);
            m_pos = end + 1;
            ++m_line;
            if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            if (split_ws(raw).empty()) continue;
            line = raw;
            return true;
        }
        return false;
    }

    /// Next raw line (no comment stripping), used for PLY headers.
    bool next_raw(std::string_view& line)
    {
        if (m_pos >= m_text.size()) return false;
        std::size_t end = m_text.find('\n', m_pos);
        if (end == std::string_view::npos) end = m_text.size();
        line = m_text.substr(m_pos, end - m_pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        m_pos = end + 1;
        ++m_line;
        return true;
    }

    std::size_t offset() const { return std::min(m_pos, m_text.size()); }
    std::size_t line() const { return m_line; }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(m_path, ParseError::Unit::line, m_line, what);
    }

private:
    std::string_view m_text;
    std::string m_path;
    std::size_t m_pos = 0;
    std::size_t m_line = 0;
};

template <typename T>
T parse_number(std::string_view token, const LineReader& reader)
{
    T value{};
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && token.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) reader.fail("invalid number '" + std::string(token) + "'");
    return value;
}

bool looks_integral(std::string_view token)
{
    return token.find_first_of(".eE") == std::string_view::npos;
}

void fan_triangulate(const std::vector<int>& poly, std::vector<std::array<int, 3>>& out)
{
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
}

TexturedMesh assemble(
    const std::vector<std::array<double, 3>>& positions,
    const std::vector<std::array<int, 3>>& faces,
    const std::vector<std::array<double, 3>>& colors,
    ColorSpace colorspace)
{
    Vertices V(static_cast<Eigen::Index>(positions.size()), 3);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (int c = 0; c < 3; ++c) V(static_cast<Eigen::Index>(i), c) = positions[i][c];
    }
    Triangles F(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) {
        for (int c = 0; c < 3; ++c) F(static_cast<Eigen::Index>(i), c) = faces[i][c];
    }
    if (colors.empty()) return TexturedMesh(std::move(V), std::move(F));
    Colors C(static_cast<Eigen::Index>(colors.size()), 3);
    for (std::size_t i = 0; i < colors.size(); ++i) {
        for (int c = 0; c < 3; ++c) C(static_cast<Eigen::Index>(i), c) = colors[i][c];
    }
    return TexturedMesh(std::move(V), std::move(F), std::move(C), colorspace);
}

// ---------------------------------------------------------------------------
// OFF / COFF

TexturedMesh load_off(std::string_view text, const std::string& path)
{
    LineReader reader(text, path);
    std::string_view line;
    if (!reader.next(line)) reader.fail("empty file");
    auto tokens = split_ws(line);
    std::string magic(tokens[0]);
    const bool has_color_tag = magic == "COFF";
    if (magic != "OFF" && magic != "COFF") reader.fail("expected OFF or COFF header, got '" + magic + "'");
    tokens.erase(tokens.begin());
    if (tokens.empty()) {
        if (!reader.next(line)) reader.fail("missing element counts");
        tokens = split_ws(line);
    }
    if (tokens.size() < 2) reader.fail("expected vertex and face counts");
    const auto nv = parse_number<long long>(tokens[0], reader);
    const auto nf = parse_number<long long>(tokens[1], reader);
    if (nv < 0 || nf < 0) reader.fail("negative element count");

    std::vector<std::array<double, 3>> positions;
    std::vector<std::array<double, 3>> colors;
    positions.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        if (!reader.next(line)) reader.fail("unexpected end of file in vertex list");
        tokens = split_ws(line);
        if (tokens.size() < 3) reader.fail("vertex needs three coordinates");
        positions.push_back({parse_number<double>(tokens[0], reader),
                             parse_number<double>(tokens[1], reader),
                             parse_number<double>(tokens[2], reader)});
        if (tokens.size() >= 6) {
            const bool eight_bit = looks_integral(tokens[3]) && looks_integral(tokens[4]) && looks_integral(tokens[5]);
            std::array<double, 3> rgb{};
            for (int c = 0; c < 3; ++c) {
                double v = parse_number<double>(tokens[3 + c], reader);
                if (eight_bit) v /= 255.0;
                if (v < 0.0 || v > 1.0) reader.fail("color component out of range");
                rgb[c] = v;
            }
            colors.push_back(rgb);
        } else if (has_color_tag && tokens.size() > 3) {
            reader.fail("COFF vertex has an incomplete color");
        }
    }
    std::vector<std::array<int, 3>> faces;
    std::vector<int> poly;
    for (long long f = 0; f < nf; ++f) {
        if (!reader.next(line)) reader.fail("unexpected end of file in face list");
        tokens = split_ws(line);
        const auto k = parse_number<int>(tokens[0], reader);
        if (k < 3 || static_cast<std::size_t>(k) + 1 > tokens.size()) reader.fail("malformed face");
        poly.clear();
        for (int c = 0; c < k; ++c) poly.push_back(parse_number<int>(tokens[1 + c], reader));
        fan_triangulate(poly, faces);
    }
    return assemble(positions, faces, colors, ColorSpace::srgb);
}

// ---------------------------------------------------------------------------
// OBJ

int resolve_obj_index(std::string_view token, std::size_t nv, const LineReader& reader)
{
    const auto slash = token.find('/');
    const auto idx = parse_number<long long>(token.substr(0, slash), reader);
    if (idx == 0) reader.fail("OBJ indices are 1-based");
    const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(nv) + idx;
    if (resolved < 0) reader.fail("relative OBJ index out of range");
    return static_cast<int>(resolved);
}

TexturedMesh load_obj(std::string_view text, const std::string& path)
{
    LineReader reader(text, path);
    std::vector<std::array<double, 3>> positions;
    std::vector<std::array<double, 3>> colors;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> poly;
    bool eight_bit = false;
    std::string_view line;
    while (reader.next(line)) {
        auto tokens = split_ws(line);
        if (tokens[0] == "v") {
            if (tokens.size() < 4) reader.fail("vertex needs three coordinates");
            positions.push_back({parse_number<double>(tokens[1], reader),
                                 parse_number<double>(tokens[2], reader),
                                 parse_number<double>(tokens[3], reader)});
            if (tokens.size() >= 7) {
                std::array<double, 3> rgb{};
                for (int c = 0; c < 3; ++c) {
                    rgb[c] = parse_number<double>(tokens[4 + c], reader);
                    if (rgb[c] < 0.0) reader.fail("negative color component");
                    if (rgb[c] > 1.0) eight_bit = true;
                }
                colors.push_back(rgb);
            }
        } else if (tokens[0] == "f") {
            if (tokens.size() < 4) reader.fail("face needs at least three corners");
            poly.clear();
            for (std::size_t c = 1; c < tokens.size(); ++c) {
                poly.push_back(resolve_obj_index(tokens[c], positions.size(), reader));
            }
            fan_triangulate(poly, faces);
        }
    }
    if (eight_bit) {
        for (auto& rgb : colors) {
            for (double& v : rgb) {
                if (v > 255.0) throw ParseError(path, ParseError::Unit::line, reader.line(), "color exceeds 255");
                v /= 255.0;
            }
        }
    }
    return assemble(positions, faces, colors, ColorSpace::srgb);
}

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view name)
{
    if (name == "char" || name == "int8") return PlyType::i8;
    if (name == "uchar" || name == "uint8") return PlyType::u8;
    if (name == "short" || name == "int16") return PlyType::i16;
    if (name == "ushort" || name == "uint16") return PlyType::u16;
    if (name == "int" || name == "int32") return PlyType::i32;
    if (name == "uint" || name == "uint32") return PlyType::u32;
    if (name == "float" || name == "float32") return PlyType::f32;
    if (name == "double" || name == "float64") return PlyType::f64;
    return std::nullopt;
}

std::size_t ply_size(PlyType t)
{
    switch (t) {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
    }
    return 0;
}

struct PlyProperty
{
    std::string name;
    PlyType type = PlyType::f32;
    bool is_list = false;
    PlyType count_type = PlyType::u8;
};

struct PlyElement
{
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

/// Little-endian binary cursor with byte-offset error reporting.
class ByteReader
{
public:
    ByteReader(std::string_view data, std::size_t base, std::string path)
        : m_data(data), m_base(base), m_path(std::move(path))
    {}

    double read(PlyType t)
    {
        const std::size_t size = ply_size(t);
        if (m_pos + size > m_data.size()) fail("unexpected end of binary payload");
        const char* p = m_data.data() + m_pos;
        m_pos += size;
        switch (t) {
        case PlyType::i8: return load<std::int8_t>(p);
        case PlyType::u8: return load<std::uint8_t>(p);
        case PlyType::i16: return load<std::int16_t>(p);
        case PlyType::u16: return load<std::uint16_t>(p);
        case PlyType::i32: return load<std::int32_t>(p);
        case PlyType::u32: return load<std::uint32_t>(p);
        case PlyType::f32: return load<float>(p);
        case PlyType::f64: return load<double>(p);
        }
        return 0.0;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(m_path, ParseError::Unit::byte, m_base + m_pos, what);
    }

private:
    template <typename T>
    static double load(const char* p)
    {
        T v;
        std::memcpy(&v, p, sizeof(T));
        return static_cast<double>(v);
    }

    std::string_view m_data;
    std::size_t m_base;
    std::string m_path;
    std::size_t m_pos = 0;
};

struct VertexLayout
{
    int x = -1, y = -1, z = -1;
    int r = -1, g = -1, b = -1;
    int lab_l = -1, lab_a = -1, lab_b = -1;
};

TexturedMesh load_ply(std::string_view text, const std::string& path)
{
    LineReader reader(text, path);
    std::string_view line;
    if (!reader.next_raw(line) || line != "ply") reader.fail("missing 'ply' magic");

    enum class Encoding { ascii, binary_le } encoding = Encoding::ascii;
    std::vector<PlyElement> elements;
    bool header_done = false;
    while (reader.next_raw(line)) {
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens[0] == "format") {
            if (tokens.size() < 2) reader.fail("malformed format line");
            if (tokens[1] == "ascii") encoding = Encoding::ascii;
            else if (tokens[1] == "binary_little_endian") encoding = Encoding::binary_le;
            else reader.fail("unsupported PLY encoding '" + std::string(tokens[1]) + "'");
        } else if (tokens[0] == "comment" || tokens[0] == "obj_info") {
            continue;
        } else if (tokens[0] == "element") {
            if (tokens.size() < 3) reader.fail("malformed element line");
            elements.push_back({std::string(tokens[1]), parse_number<std::size_t>(tokens[2], reader), {}});
        } else if (tokens[0] == "property") {
            if (elements.empty()) reader.fail("property before element");
            PlyProperty prop;
            if (tokens.size() >= 5 && tokens[1] == "list") {
                auto ct = ply_type(tokens[2]);
                auto vt = ply_type(tokens[3]);
                if (!ct || !vt) reader.fail("unknown list property type");
                prop.is_list = true;
                prop.count_type = *ct;
                prop.type = *vt;
                prop.name = std::string(tokens[4]);
            } else if (tokens.size() >= 3) {
                auto t = ply_type(tokens[1]);
                if (!t) reader.fail("unknown property type '" + std::string(tokens[1]) + "'");
                prop.type = *t;
                prop.name = std::string(tokens[2]);
            } else {
                reader.fail("malformed property line");
            }
            elements.back().properties.push_back(prop);
        } else if (tokens[0] == "end_header") {
            header_done = true;
            break;
        } else {
            reader.fail("unexpected header line '" + std::string(line) + "'");
        }
    }
    if (!header_done) reader.fail("missing end_header");

    std::vector<std::array<double, 3>> positions;
    std::vector<std::array<double, 3>> colors;
    std::vector<std::array<int, 3>> faces;
    ColorSpace colorspace = ColorSpace::srgb;

    const std::size_t payload_offset = reader.offset();
    ByteReader bytes(text.substr(payload_offset), payload_offset, path);
    std::vector<double> values;
    std::vector<int> poly;

    for (const auto& element : elements) {
        VertexLayout layout;
        int face_list = -1;
        bool color_is_u8 = false;
        for (int p = 0; p < static_cast<int>(element.properties.size()); ++p) {
            const auto& prop = element.properties[p];
            if (element.name == "vertex" && !prop.is_list) {
                if (prop.name == "x") layout.x = p;
                else if (prop.name == "y") layout.y = p;
                else if (prop.name == "z") layout.z = p;
                else if (prop.name == "red" || prop.name == "r") layout.r = p;
                else if (prop.name == "green" || prop.name == "g") layout.g = p;
                else if (prop.name == "blue" || prop.name == "b") layout.b = p;
                else if (prop.name == "L") layout.lab_l = p;
                else if (prop.name == "a") layout.lab_a = p;
                else if (prop.name == "lab_b") layout.lab_b = p;
                if (p == layout.r) color_is_u8 = prop.type == PlyType::u8;
            }
            if (element.name == "face" && prop.is_list &&
                (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
                face_list = p;
            }
        }
        if (element.name == "vertex" && (layout.x < 0 || layout.y < 0 || layout.z < 0)) {
            reader.fail("vertex element lacks x/y/z");
        }
        const bool rgb = layout.r >= 0 && layout.g >= 0 && layout.b >= 0;
        const bool lab = layout.lab_l >= 0 && layout.lab_a >= 0 && layout.lab_b >= 0;
        if (lab) colorspace = ColorSpace::lab;

        for (std::size_t item = 0; item < element.count; ++item) {
            values.assign(element.properties.size(), 0.0);
            poly.clear();
            if (encoding == Encoding::ascii) {
                if (!reader.next(line)) reader.fail("unexpected end of file in element '" + element.name + "'");
                auto tokens = split_ws(line);
                std::size_t cursor = 0;
                auto take = [&]() {
                    if (cursor >= tokens.size()) reader.fail("too few values in element '" + element.name + "'");
                    return parse_number<double>(tokens[cursor++], reader);
                };
                for (int p = 0; p < static_cast<int>(element.properties.size()); ++p) {
                    const auto& prop = element.properties[p];
                    if (prop.is_list) {
                        const auto k = static_cast<long long>(take());
                        if (k < 0) reader.fail("negative list length");
                        for (long long c = 0; c < k; ++c) {
                            const double v = take();
                            if (p == face_list) poly.push_back(static_cast<int>(v));
                        }
                    } else {
                        values[p] = take();
                    }
                }
            } else {
                for (int p = 0; p < static_cast<int>(element.properties.size()); ++p) {
                    const auto& prop = element.properties[p];
                    if (prop.is_list) {
                        const auto k = static_cast<long long>(bytes.read(prop.count_type));
                        if (k < 0) bytes.fail("negative list length");
                        for (long long c = 0; c < k; ++c) {
                            const double v = bytes.read(prop.type);
                            if (p == face_list) poly.push_back(static_cast<int>(v));
                        }
                    } else {
                        values[p] = bytes.read(prop.type);
                    }
                }
            }
            if (element.name == "vertex") {
                positions.push_back({values[layout.x], values[layout.y], values[layout.z]});
                if (lab) {
                    colors.push_back({values[layout.lab_l], values[layout.lab_a], values[layout.lab_b]});
                } else if (rgb) {
                    std::array<double, 3> c{values[layout.r], values[layout.g], values[layout.b]};
                    if (color_is_u8) {
                        for (double& v : c) v /= 255.0;
                    }
                    colors.push_back(c);
                }
            } else if (element.name == "face" && face_list >= 0) {
                if (poly.size() < 3) reader.fail("face with fewer than three corners");
                fan_triangulate(poly, faces);
            }
        }
    }
    return assemble(positions, faces, colors, colorspace);
}

MeshFormat sniff_format(std::string_view text)
{
    if (text.starts_with("ply")) return MeshFormat::ply;
    if (text.starts_with("OFF") || text.starts_with("COFF")) return MeshFormat::off;
    return MeshFormat::obj;
}

// ---------------------------------------------------------------------------
// writers

std::string fmt_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

int to_u8(double c)
{
    return static_cast<int>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

void write_ply(const TexturedMesh& mesh, std::ostream& out, const SaveOptions& options)
{
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    const bool colored = mesh.has_colors();
    const bool lab = colored && mesh.colorspace() == ColorSpace::lab;
    if (options.scalar_field && options.scalar_field->size() != V.rows()) {
        throw InvalidArgument("scalar field length does not match vertex count");
    }
    out << "ply\nformat ascii 1.0\nelement vertex " << V.rows() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (lab) {
        out << "property double L\nproperty double a\nproperty double lab_b\n";
    } else if (colored) {
        out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    }
    if (options.scalar_field) out << "property double value\n";
    out << "element face " << F.rows() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        out << fmt_double(V(i, 0)) << ' ' << fmt_double(V(i, 1)) << ' ' << fmt_double(V(i, 2));
        if (lab) {
            const auto& C = mesh.colors();
            out << ' ' << fmt_double(C(i, 0)) << ' ' << fmt_double(C(i, 1)) << ' ' << fmt_double(C(i, 2));
        } else if (colored) {
            const auto& C = mesh.colors();
            out << ' ' << to_u8(C(i, 0)) << ' ' << to_u8(C(i, 1)) << ' ' << to_u8(C(i, 2));
        }
        if (options.scalar_field) out << ' ' << fmt_double((*options.scalar_field)(i));
        out << '\n';
    }
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        out << "3 " << F(t, 0) << ' ' << F(t, 1) << ' ' << F(t, 2) << '\n';
    }
}

void write_off(const TexturedMesh& mesh, std::ostream& out)
{
    if (mesh.has_colors() && mesh.colorspace() != ColorSpace::srgb) {
        throw InvalidArgument("OFF output supports sRGB colors only");
    }
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    out << (mesh.has_colors() ? "COFF\n" : "OFF\n") << V.rows() << ' ' << F.rows() << " 0\n";
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        out << fmt_double(V(i, 0)) << ' ' << fmt_double(V(i, 1)) << ' ' << fmt_double(V(i, 2));
        if (mesh.has_colors()) {
            const auto& C = mesh.colors();
            out << ' ' << to_u8(C(i, 0)) << ' ' << to_u8(C(i, 1)) << ' ' << to_u8(C(i, 2)) << " 255";
        }
        out << '\n';
    }
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        out << "3 " << F(t, 0) << ' ' << F(t, 1) << ' ' << F(t, 2) << '\n';
    }
}

void write_obj(const TexturedMesh& mesh, std::ostream& out)
{
    if (mesh.has_colors() && mesh.colorspace() != ColorSpace::srgb) {
        throw InvalidArgument("OBJ output supports sRGB colors only");
    }
    const auto& V = mesh.vertices();
    const auto& F = mesh.triangles();
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        out << "v " << fmt_double(V(i, 0)) << ' ' << fmt_double(V(i, 1)) << ' ' << fmt_double(V(i, 2));
        if (mesh.has_colors()) {
            const auto& C = mesh.colors();
            out << ' ' << fmt_double(C(i, 0)) << ' ' << fmt_double(C(i, 1)) << ' ' << fmt_double(C(i, 2));
        }
        out << '\n';
    }
    for (Eigen::Index t = 0; t < F.rows(); ++t) {
        out << "f " << F(t, 0) + 1 << ' ' << F(t, 1) + 1 << ' ' << F(t, 2) + 1 << '\n';
    }
}

} // namespace

TexturedMesh load_mesh(const fs::path& path, std::optional<MeshFormat> format_hint)
{
    const std::string text = read_file(path);
    MeshFormat format = format_hint.value_or(format_from_extension(path).value_or(sniff_format(text)));
    switch (format) {
    case MeshFormat::off: return load_off(text, path.string());
    case MeshFormat::obj: return load_obj(text, path.string());
    case MeshFormat::ply: return load_ply(text, path.string());
    }
    throw InvalidArgument("unknown mesh format");
}

void save_mesh(
    const TexturedMesh& mesh,
    const fs::path& path,
    std::optional<MeshFormat> format_hint,
    const SaveOptions& options)
{
    const MeshFormat format = format_hint.value_or(format_from_extension(path).value_or(MeshFormat::ply));
    std::ostringstream out;
    switch (format) {
    case MeshFormat::ply: write_ply(mesh, out, options); break;
    case MeshFormat::off: write_off(mesh, out); break;
    case MeshFormat::obj: write_obj(mesh, out); break;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write " + path.string());
    const std::string s = out.str();
    file.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!file) throw IoError("write failed for " + path.string());
}

} // namespace geofuse
