#include <geofuse/retrieval.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace geofuse {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(TransformClass c)
{
    switch (c) {
    case TransformClass::isometry_topology: return "isometry_topology";
    case TransformClass::partiality: return "partiality";
    case TransformClass::contrast: return "contrast";
    case TransformClass::brightness: return "brightness";
    case TransformClass::hue: return "hue";
    case TransformClass::saturation: return "saturation";
    case TransformClass::noise: return "noise";
    case TransformClass::mixed: return "mixed";
    }
    return "unknown";
}

TransformClass transform_class_from_string(const std::string& s)
{
    for (auto c : all_transform_classes) {
        if (s == to_string(c)) return c;
    }
    throw ValidationError("unknown transform class '" + s + "'");
}

void BenchmarkManifest::validate() const
{
    std::set<std::string> ids;
    for (const auto& n : corpus()) {
        if (!ids.insert(n.shape_id).second) throw ValidationError("duplicate corpus shape_id '" + n.shape_id + "'");
    }
    std::set<std::string> null_ids;
    for (const auto& n : nulls) null_ids.insert(n.shape_id);
    for (const auto& q : queries) {
        if (!null_ids.count(q.shape_id)) {
            throw ValidationError("query " + q.path.string() + " references unknown null '" + q.shape_id + "'");
        }
        if (q.strength < 1 || q.strength > 5) {
            throw ValidationError("query " + q.path.string() + " has strength outside 1..5");
        }
    }
}

std::vector<NullEntry> BenchmarkManifest::corpus() const
{
    std::vector<NullEntry> all = nulls;
    all.insert(all.end(), distractors.begin(), distractors.end());
    return all;
}

namespace {

json manifest_to_json(const BenchmarkManifest& m)
{
    json j;
    j["nulls"] = json::array();
    for (const auto& n : m.nulls) j["nulls"].push_back({{"shape_id", n.shape_id}, {"path", n.path.generic_string()}});
    if (!m.distractors.empty()) {
        j["distractors"] = json::array();
        for (const auto& n : m.distractors) {
            j["distractors"].push_back({{"shape_id", n.shape_id}, {"path", n.path.generic_string()}});
        }
    }
    j["queries"] = json::array();
    for (const auto& q : m.queries) {
        j["queries"].push_back({{"shape_id", q.shape_id},
                                {"path", q.path.generic_string()},
                                {"transform_class", to_string(q.transform_class)},
                                {"strength", q.strength}});
    }
    return j;
}

} // namespace

std::string manifest_json(const BenchmarkManifest& manifest)
{
    return manifest_to_json(manifest).dump(2) + "\n";
}

BenchmarkManifest load_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("parse_error", path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path q(p);
        return q.is_absolute() ? q : base / q;
    };
    BenchmarkManifest m;
    try {
        for (const auto& n : j.at("nulls")) {
            m.nulls.push_back({n.at("shape_id").get<std::string>(), resolve(n.at("path").get<std::string>())});
        }
        if (j.contains("distractors")) {
            for (const auto& n : j.at("distractors")) {
                m.distractors.push_back(
                    {n.at("shape_id").get<std::string>(), resolve(n.at("path").get<std::string>())});
            }
        }
        for (const auto& q : j.at("queries")) {
            m.queries.push_back({q.at("shape_id").get<std::string>(),
                                 resolve(q.at("path").get<std::string>()),
                                 transform_class_from_string(q.at("transform_class").get<std::string>()),
                                 q.at("strength").get<int>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    m.validate();
    return m;
}

void save_manifest(const BenchmarkManifest& manifest, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << manifest_json(manifest);
}

double average_precision(const std::vector<bool>& relevant)
{
    double sum = 0.0;
    int hits = 0;
    for (std::size_t r = 0; r < relevant.size(); ++r) {
        if (!relevant[r]) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    if (hits == 0) throw InvalidArgument("average precision is undefined without a relevant item");
    return sum / hits;
}

std::vector<bool> relevance(const Ranking& ranking, const std::string& truth)
{
    std::vector<bool> rel;
    rel.reserve(ranking.shape_ids.size());
    for (const auto& id : ranking.shape_ids) rel.push_back(id == truth);
    return rel;
}

namespace {

/// Interpolated precision at 11 recall levels for one ranking.
std::array<double, 11> interpolated_pr(const std::vector<bool>& rel)
{
    const auto total = static_cast<double>(std::count(rel.begin(), rel.end(), true));
    std::vector<std::pair<double, double>> points; // (recall, precision)
    int hits = 0;
    for (std::size_t r = 0; r < rel.size(); ++r) {
        if (rel[r]) ++hits;
        points.emplace_back(hits / total, static_cast<double>(hits) / static_cast<double>(r + 1));
    }
    std::array<double, 11> curve{};
    for (int level = 0; level <= 10; ++level) {
        const double recall = level / 10.0;
        double best = 0.0;
        for (const auto& [rc, pr] : points) {
            if (rc + 1e-12 >= recall) best = std::max(best, pr);
        }
        curve[level] = best;
    }
    return curve;
}

} // namespace

EvalReport evaluate(const BenchmarkManifest& manifest, std::span<const Ranking> rankings)
{
    if (rankings.size() != manifest.queries.size()) {
        throw InvalidArgument("ranking count does not match the query count");
    }
    EvalReport report;
    std::map<TransformClass, std::array<std::vector<double>, 5>> by_strength;
    std::map<TransformClass, std::pair<std::array<double, 11>, int>> pr_acc;
    double ap_sum = 0.0;
    double rr_sum = 0.0;
    for (std::size_t q = 0; q < rankings.size(); ++q) {
        const auto& query = manifest.queries[q];
        const auto rel = relevance(rankings[q], query.shape_id);
        const double ap = average_precision(rel);
        const auto first = static_cast<double>(std::find(rel.begin(), rel.end(), true) - rel.begin()) + 1.0;
        // With exactly one relevant item AP equals the reciprocal rank.
        if (std::count(rel.begin(), rel.end(), true) == 1 && ap != 1.0 / first) {
            throw Error("internal_error", "AP differs from reciprocal rank on a single-relevant query");
        }
        ap_sum += ap;
        rr_sum += 1.0 / first;
        by_strength[query.transform_class][query.strength - 1].push_back(ap);
        auto& [curve, count] = pr_acc[query.transform_class];
        const auto pr = interpolated_pr(rel);
        for (int l = 0; l < 11; ++l) curve[l] += pr[l];
        ++count;
    }
    for (const auto& [cls, buckets] : by_strength) {
        auto& row = report.map_percent[cls];
        double sum = 0.0;
        std::size_t count = 0;
        for (int s = 0; s < 5; ++s) {
            for (double ap : buckets[s]) sum += ap;
            count += buckets[s].size();
            if (count > 0) row[s] = 100.0 * sum / static_cast<double>(count);
        }
    }
    for (auto& [cls, acc] : pr_acc) {
        auto curve = acc.first;
        for (double& v : curve) v /= acc.second;
        report.precision_recall[cls] = curve;
    }
    if (!rankings.empty()) {
        report.overall_map_percent = 100.0 * ap_sum / static_cast<double>(rankings.size());
        report.overall_mrr_percent = 100.0 * rr_sum / static_cast<double>(rankings.size());
    }
    return report;
}

std::string report_csv(const EvalReport& report)
{
    std::ostringstream out;
    out << "transform,1,<=2,<=3,<=4,<=5\n";
    for (auto cls : all_transform_classes) {
        auto it = report.map_percent.find(cls);
        if (it == report.map_percent.end()) continue;
        out << to_string(cls);
        for (const auto& cell : it->second) {
            out << ',';
            if (cell) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.2f", *cell);
                out << buf;
            } else {
                out << '-';
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string report_json(const EvalReport& report)
{
    json j;
    j["overall_map_percent"] = report.overall_map_percent;
    j["overall_mrr_percent"] = report.overall_mrr_percent;
    j["classes"] = json::array();
    for (auto cls : all_transform_classes) {
        auto it = report.map_percent.find(cls);
        if (it == report.map_percent.end()) continue;
        json row;
        row["transform"] = to_string(cls);
        row["map_percent"] = json::array();
        for (const auto& cell : it->second) row["map_percent"].push_back(cell ? json(*cell) : json(nullptr));
        row["precision_at_recall"] = report.precision_recall.at(cls);
        j["classes"].push_back(row);
    }
    return j.dump(2) + "\n";
}

} // namespace geofuse
