#include "mardl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

namespace mardl {

namespace {

// Unbiased bounded draw by masked rejection. Spelled out (rather than
// uniform_int_distribution) so splits and seeds reproduce across platforms.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    while (true) {
        std::uint64_t draw = rng() & mask;
        if (draw < bound)
            return draw;
    }
}

void fisher_yates(std::vector<std::size_t>& values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i)
        std::swap(values[i - 1], values[bounded_draw(rng, i)]);
}

int matching_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    int distance = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        distance += a[i] != b[i] ? 1 : 0;
    return distance;
}

} // namespace

void PipelineConfig::validate() const {
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
        fail(errc::invalid_config, "sample fraction must be in (0,1]");
    if (cluster_count < 1)
        fail(errc::invalid_config, "cluster count must be at least 1");
    if (methods.empty())
        fail(errc::invalid_config, "at least one method is required");
    if (pruning.kind == PruningPolicy::Kind::threshold &&
        !(pruning.theta >= 0.0 && pruning.theta <= 1.0))
        fail(errc::invalid_config, "pruning threshold must be in [0,1]");
}

std::vector<const ComparisonReport::PointRecord*> ComparisonReport::discordant_points() const {
    std::vector<const PointRecord*> result;
    for (const auto& record : points)
        if (record.discordant)
            result.push_back(&record);
    return result;
}

double ComparisonReport::agreement_rate(std::size_t method_a, std::size_t method_b) const {
    std::size_t both = co_assigned[method_a][method_b];
    if (both == 0)
        return 1.0;
    return static_cast<double>(agreement[method_a][method_b]) / static_cast<double>(both);
}

std::pair<std::vector<DataPoint>, std::vector<DataPoint>>
sample_split(std::span<const DataPoint> points, double fraction, std::uint64_t seed) {
    if (points.empty())
        fail(errc::empty_dataset, "cannot split an empty dataset");
    if (!(fraction > 0.0 && fraction <= 1.0))
        fail(errc::invalid_config, "sample fraction must be in (0,1]");

    const std::size_t n = points.size();
    // 1e-9 guard: 0.1 * 10000 lands at 1000.0000000000001 in binary floats
    // and must not ceil to 1001.
    auto sample_size = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n) - 1e-9));
    sample_size = std::clamp<std::size_t>(sample_size, 1, n);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::mt19937_64 rng(seed);
    fisher_yates(order, rng);

    std::vector<bool> sampled(n, false);
    for (std::size_t i = 0; i < sample_size; ++i)
        sampled[order[i]] = true;

    std::pair<std::vector<DataPoint>, std::vector<DataPoint>> split;
    split.first.reserve(sample_size);
    split.second.reserve(n - sample_size);
    for (std::size_t i = 0; i < n; ++i)
        (sampled[i] ? split.first : split.second).push_back(points[i]);
    return split;
}

Clustering kmodes_cluster(const AttributeSchema& schema, std::span<const DataPoint> points,
                          int k, std::uint64_t seed) {
    if (k < 1)
        fail(errc::invalid_config, "cluster count must be at least 1");
    std::vector<DataPoint> normal;
    normal.reserve(points.size());
    for (const auto& point : points)
        normal.push_back(normalized(schema, point));

    // Distinct value vectors, first-occurrence order.
    std::vector<std::size_t> distinct;
    {
        std::set<std::vector<std::string>> seen;
        for (std::size_t i = 0; i < normal.size(); ++i)
            if (seen.insert(normal[i].values).second)
                distinct.push_back(i);
    }
    if (static_cast<std::size_t>(k) > distinct.size())
        fail(errc::too_few_points, "k exceeds the number of distinct points (" +
                                       std::to_string(distinct.size()) + ")");

    std::mt19937_64 rng(seed);
    fisher_yates(distinct, rng);
    std::vector<std::vector<std::string>> modes;
    modes.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        modes.push_back(normal[distinct[static_cast<std::size_t>(i)]].values);

    const int q = schema.attribute_count();
    std::vector<int> assignment(normal.size(), -1);
    constexpr int kMaxIterations = 100;
    for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
        std::vector<int> next(normal.size());
        for (std::size_t p = 0; p < normal.size(); ++p) {
            int best = 0;
            int best_distance = matching_distance(normal[p].values, modes[0]);
            for (int i = 1; i < k; ++i) {
                int distance = matching_distance(normal[p].values,
                                                 modes[static_cast<std::size_t>(i)]);
                if (distance < best_distance) {
                    best = i;
                    best_distance = distance;
                }
            }
            next[p] = best;
        }

        // Reseed any empty cluster with the farthest point of the largest one.
        while (true) {
            std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
            for (int label : next)
                ++sizes[static_cast<std::size_t>(label)];
            int empty = -1;
            for (int i = 0; i < k; ++i)
                if (sizes[static_cast<std::size_t>(i)] == 0) {
                    empty = i;
                    break;
                }
            if (empty < 0)
                break;
            int largest = 0;
            for (int i = 1; i < k; ++i)
                if (sizes[static_cast<std::size_t>(i)] > sizes[static_cast<std::size_t>(largest)])
                    largest = i;
            std::size_t farthest = normal.size();
            int farthest_distance = -1;
            for (std::size_t p = 0; p < normal.size(); ++p)
                if (next[p] == largest) {
                    int distance = matching_distance(
                        normal[p].values, modes[static_cast<std::size_t>(largest)]);
                    if (distance > farthest_distance) {
                        farthest = p;
                        farthest_distance = distance;
                    }
                }
            next[farthest] = empty;
            modes[static_cast<std::size_t>(empty)] = normal[farthest].values;
        }

        if (next == assignment)
            break;
        assignment = std::move(next);

        // Recompute modes: per attribute, the most frequent value, first
        // occurrence winning ties.
        for (int i = 0; i < k; ++i) {
            for (int a = 0; a < q; ++a) {
                std::unordered_map<std::string, std::size_t> counts;
                std::vector<const std::string*> order;
                for (std::size_t p = 0; p < normal.size(); ++p) {
                    if (assignment[p] != i)
                        continue;
                    const std::string& value = normal[p].values[static_cast<std::size_t>(a)];
                    auto [it, inserted] = counts.emplace(value, 0);
                    if (inserted)
                        order.push_back(&it->first);
                    ++it->second;
                }
                const std::string* best = order.front();
                for (const std::string* value : order)
                    if (counts[*value] > counts[*best])
                        best = value;
                modes[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = *best;
            }
        }
    }

    std::vector<std::vector<DataPoint>> clusters(static_cast<std::size_t>(k));
    for (std::size_t p = 0; p < normal.size(); ++p)
        clusters[static_cast<std::size_t>(assignment[p])].push_back(normal[p]);
    return Clustering(schema, std::move(clusters));
}

ComparisonReport compare_methods(std::span<const DataPoint> points,
                                 const RepresentativeModel& model,
                                 std::span<const Method> methods) {
    if (methods.empty())
        fail(errc::invalid_config, "at least one method is required");
    ComparisonReport report;
    report.methods.assign(methods.begin(), methods.end());
    const std::size_t m = methods.size();
    report.agreement.assign(m, std::vector<std::size_t>(m, 0));
    report.co_assigned.assign(m, std::vector<std::size_t>(m, 0));

    report.points.reserve(points.size());
    for (std::size_t index = 0; index < points.size(); ++index) {
        ComparisonReport::PointRecord record;
        record.index = index;
        record.row_id = points[index].row_id;
        record.by_method.reserve(m);
        for (Method method : methods)
            record.by_method.push_back(label_point(points[index], model, method));
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                const auto& la = record.by_method[a];
                const auto& lb = record.by_method[b];
                if (la.cluster && lb.cluster) {
                    ++report.co_assigned[a][b];
                    if (*la.cluster == *lb.cluster)
                        ++report.agreement[a][b];
                }
            }
        for (std::size_t a = 1; a < m; ++a)
            if (record.by_method[a].cluster != record.by_method[0].cluster)
                record.discordant = true;
        report.points.push_back(std::move(record));
    }
    return report;
}

namespace {

PipelineResult finish_pipeline(Clustering clustering, const PipelineConfig& config) {
    RepresentativeModel model = build_model(clustering, config.pruning);
    const auto& held_out = clustering.unlabeled();
    std::vector<LabelAssignment> assignments =
        label_dataset(held_out, model, config.methods.front());
    if (config.fallback_largest_cluster)
        apply_largest_cluster_fallback(assignments, model);
    ComparisonReport report = compare_methods(held_out, model, config.methods);
    return PipelineResult{std::move(clustering), std::move(model), std::move(assignments),
                          std::move(report)};
}

} // namespace

PipelineResult run_pipeline(const AttributeSchema& schema, std::span<const DataPoint> points,
                            const PipelineConfig& config) {
    config.validate();
    auto [sample, held_out] = sample_split(points, config.sample_fraction, config.seed);
    Clustering sampled = kmodes_cluster(schema, sample, config.cluster_count, config.seed);
    std::vector<std::vector<DataPoint>> clusters;
    clusters.reserve(static_cast<std::size_t>(sampled.cluster_count()));
    for (int i = 0; i < sampled.cluster_count(); ++i)
        clusters.push_back(sampled.cluster(i));
    return finish_pipeline(Clustering(schema, std::move(clusters), std::move(held_out)),
                           config);
}

PipelineResult run_pipeline(const Clustering& preclustered, const PipelineConfig& config) {
    config.validate();
    return finish_pipeline(preclustered, config);
}

} // namespace mardl
