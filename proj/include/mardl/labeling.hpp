#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mardl/model.hpp"
#include "mardl/representative.hpp"

namespace mardl {

/// The three resemblance rules.
///
/// nir_sum:      sum of per-node importances in the cluster.
/// nnir_product: best nodeset combination by (product of block frequencies)
///               times the size-weighted mean of block weightings.
/// max_sum:      best nodeset combination by the size-weighted mean of block
///               importances in the cluster. (The rule's notation admits
///               other readings, e.g. an unweighted sum of block importances;
///               this one makes nir_sum and nnir_product agree on the
///               bundled example, which is its purpose.)
enum class Method { nir_sum, nnir_product, max_sum };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);
inline constexpr Method kAllMethods[] = {Method::nir_sum, Method::nnir_product,
                                         Method::max_sum};

/// Exhaustive partition enumeration grows with the Bell numbers; beyond this
/// many attributes labeling refuses to run (raise deliberately if you must).
inline constexpr int kMaxPartitionAttributes = 16;

struct ResemblanceScore {
    int cluster = 0;
    Method method = Method::nir_sum;
    double value = 0.0;
    /// Highest-scoring combination, for the combination-based methods.
    std::optional<NodesetCombination> best_combination;
};

struct LabelAssignment {
    std::optional<std::int64_t> point_id;
    /// Empty means unassigned: every cluster scored 0.
    std::optional<int> cluster;
    std::vector<double> scores;
    /// Set when at least two clusters share the maximum within 1e-12; the
    /// lowest index wins.
    bool tie = false;
    /// Set when the assignment came from a fallback rule, not the scores.
    bool fallback = false;
};

/// All partitions of the point's attributes whose blocks are all present in
/// the cluster's (pruned) lattice, ordered by descending largest-block size,
/// then lexicographically (restricted-growth order).
std::vector<NodesetCombination> enumerate_combinations(
    const DataPoint& point, const NnirLattice& lattice, int cluster,
    int max_attributes = kMaxPartitionAttributes);

/// Expected block weighting of a combination: blocks weighted by their share
/// of the attributes, sum of (n_u/q) * weighting(block_u).
double expected_combination_weight(const NodesetCombination& combination,
                                   const NnirLattice& lattice);

ResemblanceScore resemblance(const DataPoint& point, int cluster,
                             const RepresentativeModel& model, Method method,
                             int max_attributes = kMaxPartitionAttributes);

LabelAssignment label_point(const DataPoint& point, const RepresentativeModel& model,
                            Method method, int max_attributes = kMaxPartitionAttributes);

/// Element-wise label_point; input order preserved.
std::vector<LabelAssignment> label_dataset(std::span<const DataPoint> points,
                                           const RepresentativeModel& model, Method method,
                                           int max_attributes = kMaxPartitionAttributes);

/// Resolves unassigned points to the largest cluster (lowest index on ties)
/// and marks them as fallback assignments.
void apply_largest_cluster_fallback(std::span<LabelAssignment> assignments,
                                    const RepresentativeModel& model);

} // namespace mardl
