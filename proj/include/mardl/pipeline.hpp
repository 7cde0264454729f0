#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mardl/labeling.hpp"
#include "mardl/model.hpp"
#include "mardl/representative.hpp"

namespace mardl {

struct PipelineConfig {
    double sample_fraction = 0.5;
    int cluster_count = 3;
    std::uint64_t seed = 0;
    PruningPolicy pruning = PruningPolicy::none();
    /// Methods in the comparison report; the first one also produces the
    /// pipeline's assignments.
    std::vector<Method> methods{Method::nir_sum, Method::nnir_product, Method::max_sum};
    bool fallback_largest_cluster = false;

    void validate() const;
};

/// Side-by-side labeling of the same points under several methods.
struct ComparisonReport {
    struct PointRecord {
        std::size_t index = 0;
        std::optional<std::int64_t> row_id;
        std::vector<LabelAssignment> by_method;
        /// Methods did not all reach the same outcome (cluster or unassigned).
        bool discordant = false;
    };

    std::vector<Method> methods;
    std::vector<PointRecord> points;
    /// agreement[a][b]: points assigned the same cluster by both methods;
    /// the diagonal counts points the method assigned at all.
    std::vector<std::vector<std::size_t>> agreement;
    /// co_assigned[a][b]: points assigned (to anything) by both methods.
    std::vector<std::vector<std::size_t>> co_assigned;

    std::size_t point_count() const noexcept { return points.size(); }
    std::vector<const PointRecord*> discordant_points() const;
    double agreement_rate(std::size_t method_a, std::size_t method_b) const;
};

/// Deterministic seeded split into (sample, held-out); the sample gets
/// ceil(fraction * N) points and both sides keep the input order.
std::pair<std::vector<DataPoint>, std::vector<DataPoint>>
sample_split(std::span<const DataPoint> points, double fraction, std::uint64_t seed);

/// k-modes with simple-matching dissimilarity, seeded start from k distinct
/// points, capped iteration count, and deterministic tie breaking (lowest
/// cluster index on distance ties, first-seen value on mode ties). Empty
/// clusters are reseeded with the farthest point of the largest cluster.
Clustering kmodes_cluster(const AttributeSchema& schema, std::span<const DataPoint> points,
                          int k, std::uint64_t seed);

ComparisonReport compare_methods(std::span<const DataPoint> points,
                                 const RepresentativeModel& model,
                                 std::span<const Method> methods);

struct PipelineResult {
    Clustering clustering;
    RepresentativeModel model;
    /// Held-out points labeled with the first configured method.
    std::vector<LabelAssignment> assignments;
    ComparisonReport report;
};

/// sample -> cluster -> build representatives -> label the held-out points
/// and compare the methods on them.
PipelineResult run_pipeline(const AttributeSchema& schema, std::span<const DataPoint> points,
                            const PipelineConfig& config);

/// Same, but the clustering is given (its unlabeled set is the held-out
/// data), so sampling and k-modes are skipped.
PipelineResult run_pipeline(const Clustering& preclustered, const PipelineConfig& config);

} // namespace mardl
