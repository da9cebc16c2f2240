#pragma once

#include <geofuse/error.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geofuse {

enum class TransformClass {
    isometry_topology,
    partiality,
    contrast,
    brightness,
    hue,
    saturation,
    noise,
    mixed,
};

inline constexpr std::array<TransformClass, 8> all_transform_classes{
    TransformClass::isometry_topology, TransformClass::partiality, TransformClass::contrast,
    TransformClass::brightness,        TransformClass::hue,        TransformClass::saturation,
    TransformClass::noise,             TransformClass::mixed,
};

const char* to_string(TransformClass c);
TransformClass transform_class_from_string(const std::string& s);

struct NullEntry
{
    std::string shape_id;
    std::filesystem::path path;
};

struct QueryEntry
{
    std::string shape_id; ///< ground-truth null
    std::filesystem::path path;
    TransformClass transform_class = TransformClass::isometry_topology;
    int strength = 1;
};

///
/// Retrieval benchmark: null shapes form the corpus, every query has
/// exactly one relevant null. Distractors join the corpus but are never
/// relevant. Paths are resolved relative to the manifest directory.
///
struct BenchmarkManifest
{
    std::vector<NullEntry> nulls;
    std::vector<NullEntry> distractors;
    std::vector<QueryEntry> queries;

    /// Throws ValidationError on unknown query ids, duplicate null ids or
    /// strengths outside 1..5.
    void validate() const;
    /// Nulls followed by distractors.
    std::vector<NullEntry> corpus() const;
};

BenchmarkManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const BenchmarkManifest& manifest, const std::filesystem::path& path);
/// Canonical JSON text (paths as stored, relative).
std::string manifest_json(const BenchmarkManifest& manifest);

struct Ranking
{
    std::vector<std::string> shape_ids; ///< ascending distance
    std::vector<double> distances;
};

///
/// Rank the corpus for every query by ascending distance, ties broken by
/// shape_id. `corpus_descriptors` is aligned with manifest.corpus() and
/// `query_descriptors` with manifest.queries.
///
template <typename Descriptor, typename DistanceFn>
std::vector<Ranking> rank_queries(
    const BenchmarkManifest& manifest,
    std::span<const Descriptor> corpus_descriptors,
    std::span<const Descriptor> query_descriptors,
    DistanceFn&& distance)
{
    const auto corpus = manifest.corpus();
    if (corpus_descriptors.size() != corpus.size() || query_descriptors.size() != manifest.queries.size()) {
        throw InvalidArgument("descriptor count does not match the manifest");
    }
    std::vector<Ranking> rankings;
    rankings.reserve(manifest.queries.size());
    for (std::size_t q = 0; q < manifest.queries.size(); ++q) {
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(corpus.size());
        for (std::size_t c = 0; c < corpus.size(); ++c) {
            scored.emplace_back(distance(query_descriptors[q], corpus_descriptors[c]), c);
        }
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return corpus[a.second].shape_id < corpus[b.second].shape_id;
        });
        Ranking r;
        for (const auto& [d, c] : scored) {
            r.shape_ids.push_back(corpus[c].shape_id);
            r.distances.push_back(d);
        }
        rankings.push_back(std::move(r));
    }
    return rankings;
}

/// Loads every shape through `descriptor_fn` (errors are rethrown naming
/// the shape) and ranks the queries.
template <typename DescriptorFn, typename DistanceFn>
std::vector<Ranking> rank_queries(
    const BenchmarkManifest& manifest,
    DescriptorFn&& descriptor_fn,
    DistanceFn&& distance)
{
    using Descriptor = std::decay_t<decltype(descriptor_fn(std::declval<const std::filesystem::path&>()))>;
    auto describe = [&](const std::string& id, const std::filesystem::path& p) {
        try {
            return descriptor_fn(p);
        } catch (const std::exception& e) {
            throw Error("descriptor_error", "descriptor failed for shape '" + id + "': " + e.what());
        }
    };
    std::vector<Descriptor> corpus;
    for (const auto& n : manifest.corpus()) corpus.push_back(describe(n.shape_id, n.path));
    std::vector<Descriptor> queries;
    for (const auto& q : manifest.queries) queries.push_back(describe(q.shape_id, q.path));
    return rank_queries<Descriptor>(manifest, corpus, queries, distance);
}

/// (1/R) sum over relevant ranks r of P(r). Throws InvalidArgument when
/// nothing is relevant.
double average_precision(const std::vector<bool>& relevant);

/// Relevance flags of a ranking against the ground-truth id.
std::vector<bool> relevance(const Ranking& ranking, const std::string& truth);

struct EvalReport
{
    /// mAP in percent per class and cumulative strength cutoff s = 1..5
    /// (index s-1); absent when no query falls in the cell.
    std::map<TransformClass, std::array<std::optional<double>, 5>> map_percent;
    /// Mean interpolated precision at recall 0, 0.1, ..., 1 per class.
    std::map<TransformClass, std::array<double, 11>> precision_recall;
    /// mAP over every query, in percent.
    double overall_map_percent = 0.0;
    /// Mean reciprocal rank over every query, in percent.
    double overall_mrr_percent = 0.0;
};

EvalReport evaluate(const BenchmarkManifest& manifest, std::span<const Ranking> rankings);

/// Table layout: one row per class present, columns 1, <=2, ..., <=5.
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);

} // namespace geofuse
