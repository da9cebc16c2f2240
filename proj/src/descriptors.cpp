#include <geofuse/descriptors.hpp>
#include <geofuse/embedding.hpp>
#include <geofuse/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace geofuse {

// ---------------------------------------------------------------------------
// Vocabulary

namespace {

int count_distinct_rows(const Eigen::Ref<const Eigen::MatrixXd>& X)
{
    std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            if (X(a, c) != X(b, c)) return X(a, c) < X(b, c);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    int distinct = order.empty() ? 0 : 1;
    for (std::size_t i = 1; i < order.size(); ++i) distinct += less(order[i - 1], order[i]);
    return distinct;
}

Eigen::Index nearest_center(const Eigen::MatrixXd& centers, const Eigen::Ref<const Eigen::RowVectorXd>& x, double* d2)
{
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        const double d = (centers.row(c) - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (d2) *d2 = best_d;
    return best;
}

double median(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

double soft_sigma2_from_centers(const Eigen::MatrixXd& centers, SoftSigmaRule rule)
{
    std::vector<double> distances;
    for (Eigen::Index a = 0; a < centers.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < centers.rows(); ++b) {
            const double d2 = (centers.row(a) - centers.row(b)).squaredNorm();
            distances.push_back(rule == SoftSigmaRule::median_squared_distance ? d2 : std::sqrt(d2));
        }
    }
    if (distances.empty()) return 1.0;
    const double sigma2 = 2.0 * median(std::move(distances));
    return sigma2 > 0.0 ? sigma2 : 1.0;
}

Vocabulary build_vocabulary(
    const Eigen::Ref<const Eigen::MatrixXd>& X,
    int v,
    std::uint64_t seed,
    const VocabularyOptions& options)
{
    if (v < 1) throw InvalidArgument("vocabulary size must be positive");
    const Eigen::Index n = X.rows();
    if (n < v || count_distinct_rows(X) < v) {
        throw InvalidArgument(
            "vocabulary of size " + std::to_string(v) + " needs at least that many distinct descriptors");
    }

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers(v, X.cols());
    {
        std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
        centers.row(0) = X.row(first(rng));
        Eigen::VectorXd d2(n);
        for (Eigen::Index i = 0; i < n; ++i) d2(i) = (X.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < v; ++c) {
            std::uniform_real_distribution<double> uniform(0.0, d2.sum());
            const double target = uniform(rng);
            double acc = 0.0;
            Eigen::Index pick = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (d2(i) <= 0.0) continue;
                acc += d2(i);
                pick = i;
                if (acc >= target) break;
            }
            centers.row(c) = X.row(pick);
            for (Eigen::Index i = 0; i < n; ++i) {
                d2(i) = std::min(d2(i), (X.row(i) - centers.row(c)).squaredNorm());
            }
        }
    }

    std::vector<Eigen::Index> assignment(static_cast<std::size_t>(n), -1);
    Eigen::VectorXd dist2(n);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index c = nearest_center(centers, X.row(i), &dist2(i));
            if (c != assignment[i]) {
                assignment[i] = c;
                changed = true;
            }
        }
        if (!changed) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(v, X.cols());
        std::vector<Eigen::Index> counts(v, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assignment[i]) += X.row(i);
            ++counts[assignment[i]];
        }
        for (int c = 0; c < v; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
                continue;
            }
            // Empty cluster: move it onto the worst-fit point.
            Eigen::Index worst = 0;
            dist2.maxCoeff(&worst);
            centers.row(c) = X.row(worst);
            dist2(worst) = 0.0;
            assignment[worst] = -1;
        }
    }

    Vocabulary vocab;
    vocab.centers = std::move(centers);
    vocab.soft_sigma2 = soft_sigma2_from_centers(vocab.centers, options.sigma_rule);
    return vocab;
}

Vocabulary build_vocabulary(
    std::span<const HksDescriptorField> fields,
    int v,
    std::uint64_t seed,
    const VocabularyOptions& options)
{
    if (fields.empty()) throw InvalidArgument("no descriptor fields to cluster");
    Eigen::Index rows = 0;
    const Eigen::Index dim = fields.front().values.cols();
    for (const auto& f : fields) {
        if (f.values.cols() != dim) throw InvalidArgument("descriptor fields differ in dimension");
        rows += f.values.rows();
    }
    Eigen::MatrixXd pooled(rows, dim);
    Eigen::Index offset = 0;
    for (const auto& f : fields) {
        pooled.middleRows(offset, f.values.rows()) = f.values;
        offset += f.values.rows();
    }
    return build_vocabulary(pooled, v, seed, options);
}

Eigen::VectorXd soft_quantize(const Vocabulary& vocab, const Eigen::Ref<const Eigen::VectorXd>& descriptor)
{
    if (descriptor.size() != vocab.dimension()) {
        throw InvalidArgument("descriptor dimension does not match the vocabulary");
    }
    Eigen::VectorXd logits(vocab.size());
    for (Eigen::Index k = 0; k < vocab.size(); ++k) {
        logits(k) = -(vocab.centers.row(k).transpose() - descriptor).squaredNorm() / (2.0 * vocab.soft_sigma2);
    }
    Eigen::VectorXd theta = (logits.array() - logits.maxCoeff()).exp().matrix();
    return theta / theta.sum();
}

BagOfFeatures bag_of_features(
    const Vocabulary& vocab,
    const HksDescriptorField& field,
    const VertexAreas& areas,
    PointWeighting weighting)
{
    if (areas.size() != field.values.rows()) throw InvalidArgument("areas do not match the descriptor field");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(vocab.size());
    for (Eigen::Index i = 0; i < field.values.rows(); ++i) {
        const double w = weighting == PointWeighting::area ? areas(i) : 1.0;
        acc += w * soft_quantize(vocab, field.values.row(i).transpose());
    }
    const double total = acc.sum();
    if (!(total > 0.0)) throw InvalidArgument("bag of features has zero total weight");
    return {acc / total, field.eta};
}

double bof_distance_single(const BagOfFeatures& b1, const BagOfFeatures& b2)
{
    if (b1.weights.size() != b2.weights.size()) throw InvalidArgument("BoF sizes differ");
    return (b1.weights - b2.weights).lpNorm<1>();
}

double bof_distance_multiscale(const BofByEta& x, const BofByEta& y, std::span<const double> etas)
{
    double total = 0.0;
    for (double eta : etas) {
        auto ix = x.find(eta);
        auto iy = y.find(eta);
        if (ix == x.end() || iy == y.end()) {
            throw InvalidArgument("missing BoF for eta=" + std::to_string(eta));
        }
        const double gap = bof_distance_single(ix->second, iy->second);
        total += (eta == 0.0 ? 1.0 : eta) * gap * gap;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Distance distributions

double DistanceDistribution::evaluate(double delta) const
{
    double value = 0.0;
    for (std::size_t b = 0; b < cdf.size(); ++b) {
        if (bin_edges[b + 1] <= delta) value = cdf[b];
        else break;
    }
    return value;
}

namespace {

template <typename Distance>
DistanceDistribution build_distribution(
    Distance&& dist,
    std::span<const int> sample,
    const VertexAreas& areas,
    int bins)
{
    if (sample.size() < 2) throw InvalidArgument("distance distribution needs at least two samples");
    if (bins < 1) throw InvalidArgument("bin count must be positive");

    struct PairSample
    {
        double d, w;
    };
    std::vector<PairSample> pairs;
    pairs.reserve(sample.size() * (sample.size() - 1) / 2);
    double max_d = 0.0;
    for (std::size_t a = 0; a < sample.size(); ++a) {
        for (std::size_t b = a + 1; b < sample.size(); ++b) {
            const double d = dist(a, b);
            if (!(d >= 0.0)) throw InvalidArgument("pairwise distance must be nonnegative");
            pairs.push_back({d, areas(sample[a]) * areas(sample[b])});
            max_d = std::max(max_d, d);
        }
    }

    DistanceDistribution out;
    if (max_d == 0.0) {
        out.bin_edges = {0.0, 0.0};
        out.cdf = {1.0};
        return out;
    }
    out.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int k = 0; k < bins; ++k) out.bin_edges[k] = max_d * k / bins;
    out.bin_edges[bins] = max_d;

    std::vector<double> mass(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (const auto& p : pairs) {
        auto b = static_cast<int>(std::ceil(p.d / max_d * bins)) - 1;
        b = std::clamp(b, 0, bins - 1);
        while (b > 0 && p.d <= out.bin_edges[b]) --b;
        while (b < bins - 1 && p.d > out.bin_edges[b + 1]) ++b;
        mass[b] += p.w;
        total += p.w;
    }
    if (!(total > 0.0)) throw InvalidArgument("sample areas sum to zero");
    out.cdf.resize(static_cast<std::size_t>(bins));
    double acc = 0.0;
    for (int b = 0; b < bins; ++b) {
        acc += mass[b];
        out.cdf[b] = std::min(acc / total, 1.0);
    }
    out.cdf.back() = 1.0;
    return out;
}

} // namespace

DistanceDistribution distance_distribution(
    const PairDistance& dist,
    std::span<const int> sample,
    const VertexAreas& areas,
    int bins)
{
    return build_distribution(
        [&](std::size_t a, std::size_t b) { return dist(sample[a], sample[b]); }, sample, areas, bins);
}

DistanceDistribution distance_distribution_from_matrix(
    const Eigen::Ref<const Eigen::MatrixXd>& distances,
    std::span<const int> sample,
    const VertexAreas& areas,
    int bins)
{
    const auto m = static_cast<Eigen::Index>(sample.size());
    if (distances.rows() != m || distances.cols() != m) {
        throw InvalidArgument("distance matrix does not match the sample size");
    }
    return build_distribution(
        [&](std::size_t a, std::size_t b) {
            return distances(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        },
        sample, areas, bins);
}

double distribution_distance(const DistanceDistribution& f1, const DistanceDistribution& f2)
{
    std::vector<double> grid = f1.bin_edges;
    grid.insert(grid.end(), f2.bin_edges.begin(), f2.bin_edges.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const double span = grid.back() - grid.front();
    if (!(span > 0.0)) return 0.0;
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        integral += std::abs(f1.evaluate(grid[k]) - f2.evaluate(grid[k])) * (grid[k + 1] - grid[k]);
    }
    return integral / span;
}

// ---------------------------------------------------------------------------
// Color histogram

ColorHistogram color_histogram(
    const TexturedMesh& mesh,
    const VertexAreas& areas,
    int bins_per_axis,
    PointWeighting weighting)
{
    if (bins_per_axis < 1) throw InvalidArgument("bins_per_axis must be positive");
    if (areas.size() != mesh.num_vertices()) throw InvalidArgument("areas do not match the mesh");
    const Colors lab = colors_as_lab(mesh);
    const int n = bins_per_axis;
    auto bin = [n](double v, double lo, double hi) {
        const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
        return std::clamp(b, 0, n - 1);
    };

    ColorHistogram hist;
    hist.bins_per_axis = n;
    hist.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * n * n);
    for (Eigen::Index i = 0; i < lab.rows(); ++i) {
        const int index = (bin(lab(i, 0), 0.0, 100.0) * n + bin(lab(i, 1), -128.0, 128.0)) * n +
                          bin(lab(i, 2), -128.0, 128.0);
        hist.weights(index) += weighting == PointWeighting::area ? areas(i) : 1.0;
    }
    const double total = hist.weights.sum();
    if (!(total > 0.0)) throw InvalidArgument("color histogram has zero total weight");
    hist.weights /= total;
    return hist;
}

double color_histogram_distance(const ColorHistogram& h1, const ColorHistogram& h2)
{
    if (h1.weights.size() != h2.weights.size()) throw InvalidArgument("histogram sizes differ");
    return (h1.weights - h2.weights).lpNorm<1>();
}

} // namespace geofuse
