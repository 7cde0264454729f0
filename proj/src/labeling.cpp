#include "mardl/labeling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mardl {

namespace {

constexpr double kTieTolerance = 1e-12;

using Projection = NnirLattice::PointProjection;

// A partition of the attribute set as block bitmasks, in discovery order.
using MaskPartition = std::vector<std::uint32_t>;

// Canonical sort key: descending largest block, then the restricted-growth
// string ascending. Matches the documented enumeration order.
struct PartitionKey {
    int max_block = 0;
    std::vector<std::uint8_t> growth;

    bool operator<(const PartitionKey& other) const {
        if (max_block != other.max_block)
            return max_block > other.max_block;
        return growth < other.growth;
    }
};

PartitionKey key_of(const MaskPartition& blocks, int q) {
    PartitionKey key;
    key.growth.assign(static_cast<std::size_t>(q), 0);
    std::vector<std::uint32_t> ordered(blocks);
    std::sort(ordered.begin(), ordered.end(),
              [](std::uint32_t a, std::uint32_t b) { return std::countr_zero(a) < std::countr_zero(b); });
    for (std::size_t b = 0; b < ordered.size(); ++b) {
        key.max_block = std::max(key.max_block, std::popcount(ordered[b]));
        for (int a = 0; a < q; ++a)
            if (ordered[b] & (1u << a))
                key.growth[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(b);
    }
    return key;
}

// Walks every partition of `remaining` whose blocks all satisfy `usable`,
// peeling the block that contains the lowest remaining attribute.
template <typename Usable, typename Emit>
void walk_partitions(std::uint32_t remaining, MaskPartition& blocks, const Usable& usable,
                     const Emit& emit) {
    if (remaining == 0) {
        emit(blocks);
        return;
    }
    const std::uint32_t low = remaining & (~remaining + 1);
    const std::uint32_t rest = remaining & ~low;
    std::uint32_t subset = rest;
    while (true) {
        const std::uint32_t block = low | subset;
        if (usable(block)) {
            blocks.push_back(block);
            walk_partitions(remaining & ~block, blocks, usable, emit);
            blocks.pop_back();
        }
        if (subset == 0)
            break;
        subset = (subset - 1) & rest;
    }
}

void check_attribute_cap(int q, int max_attributes) {
    if (max_attributes > 31)
        fail(errc::invalid_config, "partition cap beyond 31 attributes is unsupported");
    if (q > max_attributes)
        fail(errc::too_many_attributes,
             "point has " + std::to_string(q) + " attributes; exhaustive combination " +
                 "enumeration is capped at " + std::to_string(max_attributes));
}

// Best combination for one cluster under one of the combination rules.
// Ties on value resolve to the canonically first partition.
struct BestCombination {
    double value = 0.0;
    bool found = false;
    MaskPartition blocks;
    PartitionKey key;
};

BestCombination best_combination(const Projection& projection, int cluster, double cluster_size,
                                 Method method) {
    const int q = projection.attribute_count();
    const double inv_q = 1.0 / static_cast<double>(q);
    BestCombination best;
    auto usable = [&](std::uint32_t block) {
        const NodesetStats* stats = projection.stats(block);
        return stats && stats->counts[static_cast<std::size_t>(cluster)] > 0;
    };
    MaskPartition scratch;
    walk_partitions((1u << q) - 1u, scratch, usable,
                    [&](const MaskPartition& blocks) {
                        double value = 0.0;
                        if (method == Method::nnir_product) {
                            double product = 1.0;
                            double expected_weighting = 0.0;
                            for (std::uint32_t block : blocks) {
                                const NodesetStats& stats = *projection.stats(block);
                                product *=
                                    static_cast<double>(
                                        stats.counts[static_cast<std::size_t>(cluster)]) /
                                    cluster_size;
                                expected_weighting +=
                                    std::popcount(block) * inv_q * stats.weighting;
                            }
                            value = product * expected_weighting;
                        } else {
                            for (std::uint32_t block : blocks)
                                value += std::popcount(block) * inv_q *
                                         projection.stats(block)->importance
                                             [static_cast<std::size_t>(cluster)];
                        }
                        if (!best.found) {
                            best = {value, true, blocks, key_of(blocks, q)};
                            return;
                        }
                        if (value < best.value)
                            return;
                        PartitionKey key = key_of(blocks, q);
                        if (value > best.value || key < best.key)
                            best = {value, true, blocks, std::move(key)};
                    });
    return best;
}

NodesetCombination to_combination(const DataPoint& point, const MaskPartition& blocks, int q) {
    std::vector<Nodeset> sets;
    sets.reserve(blocks.size());
    std::vector<int> attrs;
    for (std::uint32_t block : blocks) {
        attrs.clear();
        for (int a = 0; a < q; ++a)
            if (block & (1u << a))
                attrs.push_back(a);
        sets.push_back(project_point(point, attrs));
    }
    return NodesetCombination::of(std::move(sets), q);
}

double nir_sum_score(const DataPoint& point, const NirTable& nir, int cluster) {
    double sum = 0.0;
    for (int a = 0; a < static_cast<int>(point.values.size()); ++a) {
        const NodesetStats* stats =
            nir.find({a, point.values[static_cast<std::size_t>(a)]});
        if (stats)
            sum += stats->importance[static_cast<std::size_t>(cluster)];
    }
    return sum;
}

LabelAssignment assign_from_scores(std::optional<std::int64_t> point_id,
                                   std::vector<double> scores) {
    LabelAssignment assignment;
    assignment.point_id = point_id;
    double max = 0.0;
    for (double score : scores)
        max = std::max(max, score);
    if (max > 0.0) {
        int chosen = -1;
        int at_max = 0;
        for (int i = 0; i < static_cast<int>(scores.size()); ++i)
            if (std::abs(scores[static_cast<std::size_t>(i)] - max) <= kTieTolerance) {
                ++at_max;
                if (chosen < 0)
                    chosen = i;
            }
        assignment.cluster = chosen;
        assignment.tie = at_max > 1;
    }
    assignment.scores = std::move(scores);
    return assignment;
}

} // namespace

std::string_view method_name(Method method) {
    switch (method) {
    case Method::nir_sum: return "nir-sum";
    case Method::nnir_product: return "nnir-product";
    case Method::max_sum: return "max-sum";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method method : kAllMethods)
        if (method_name(method) == name)
            return method;
    return std::nullopt;
}

std::vector<NodesetCombination> enumerate_combinations(const DataPoint& point,
                                                       const NnirLattice& lattice, int cluster,
                                                       int max_attributes) {
    if (cluster < 0 || cluster >= lattice.cluster_count())
        fail(errc::cluster_index_out_of_range, "cluster index " + std::to_string(cluster));
    const int q = lattice.attribute_count();
    check_attribute_cap(q, max_attributes);
    Projection projection = lattice.project(point);
    auto usable = [&](std::uint32_t block) {
        const NodesetStats* stats = projection.stats(block);
        return stats && stats->counts[static_cast<std::size_t>(cluster)] > 0;
    };
    std::vector<std::pair<PartitionKey, MaskPartition>> found;
    MaskPartition scratch;
    walk_partitions((1u << q) - 1u, scratch, usable, [&](const MaskPartition& blocks) {
        found.emplace_back(key_of(blocks, q), blocks);
    });
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<NodesetCombination> combinations;
    combinations.reserve(found.size());
    for (const auto& [key, blocks] : found)
        combinations.push_back(to_combination(point, blocks, q));
    return combinations;
}

double expected_combination_weight(const NodesetCombination& combination,
                                   const NnirLattice& lattice) {
    int q = 0;
    for (const auto& block : combination.blocks())
        q += block.size();
    double expected = 0.0;
    for (const auto& block : combination.blocks()) {
        const NodesetStats* stats = lattice.find(block);
        if (!stats)
            fail(errc::missing_block, "combination block is not in the lattice");
        expected += (static_cast<double>(block.size()) / q) * stats->weighting;
    }
    return expected;
}

ResemblanceScore resemblance(const DataPoint& point, int cluster,
                             const RepresentativeModel& model, Method method,
                             int max_attributes) {
    if (cluster < 0 || cluster >= model.cluster_count())
        fail(errc::cluster_index_out_of_range, "cluster index " + std::to_string(cluster));
    const DataPoint normal = normalized(model.schema, point);
    ResemblanceScore score;
    score.cluster = cluster;
    score.method = method;
    if (method == Method::nir_sum) {
        score.value = nir_sum_score(normal, model.nir, cluster);
        return score;
    }
    check_attribute_cap(model.schema.attribute_count(), max_attributes);
    Projection projection = model.nnir.project(normal);
    BestCombination best = best_combination(
        projection, cluster,
        static_cast<double>(model.cluster_sizes[static_cast<std::size_t>(cluster)]), method);
    if (best.found) {
        score.value = best.value;
        score.best_combination =
            to_combination(normal, best.blocks, model.schema.attribute_count());
    }
    return score;
}

LabelAssignment label_point(const DataPoint& point, const RepresentativeModel& model,
                            Method method, int max_attributes) {
    const DataPoint normal = normalized(model.schema, point);
    const int k = model.cluster_count();
    std::vector<double> scores(static_cast<std::size_t>(k), 0.0);
    if (method == Method::nir_sum) {
        for (int i = 0; i < k; ++i)
            scores[static_cast<std::size_t>(i)] = nir_sum_score(normal, model.nir, i);
    } else {
        check_attribute_cap(model.schema.attribute_count(), max_attributes);
        Projection projection = model.nnir.project(normal);
        for (int i = 0; i < k; ++i) {
            BestCombination best = best_combination(
                projection, i,
                static_cast<double>(model.cluster_sizes[static_cast<std::size_t>(i)]), method);
            scores[static_cast<std::size_t>(i)] = best.found ? best.value : 0.0;
        }
    }
    return assign_from_scores(normal.row_id, std::move(scores));
}

std::vector<LabelAssignment> label_dataset(std::span<const DataPoint> points,
                                           const RepresentativeModel& model, Method method,
                                           int max_attributes) {
    std::vector<LabelAssignment> assignments;
    assignments.reserve(points.size());
    for (const DataPoint& point : points)
        assignments.push_back(label_point(point, model, method, max_attributes));
    return assignments;
}

void apply_largest_cluster_fallback(std::span<LabelAssignment> assignments,
                                    const RepresentativeModel& model) {
    int largest = 0;
    for (int i = 1; i < model.cluster_count(); ++i)
        if (model.cluster_sizes[static_cast<std::size_t>(i)] >
            model.cluster_sizes[static_cast<std::size_t>(largest)])
            largest = i;
    for (auto& assignment : assignments)
        if (!assignment.cluster) {
            assignment.cluster = largest;
            assignment.fallback = true;
        }
}

} // namespace mardl
