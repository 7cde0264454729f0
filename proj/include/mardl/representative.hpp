#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mardl/model.hpp"

namespace mardl {

/// Cross-cluster statistics of one nodeset.
///
/// `share` is the nodeset's occurrence distribution over clusters,
/// `weighting` is 1 minus its normalized entropy (1 = exclusive to one
/// cluster, 0 = spread uniformly over all of them), and `importance[i]`
/// is the in-cluster frequency times the weighting. All of these live in
/// [0, 1], and importance is exactly 0 wherever the count is 0.
struct NodesetStats {
    std::vector<std::uint64_t> counts;
    std::vector<double> share;
    double weighting = 0.0;
    std::vector<double> importance;

    std::uint64_t total() const noexcept;
    double max_importance() const noexcept;
};

NodesetStats compute_stats(std::vector<std::uint64_t> counts,
                           std::span<const std::uint64_t> cluster_sizes);

struct PruningPolicy {
    enum class Kind { none, threshold };

    Kind kind = Kind::none;
    double theta = 0.0;

    static PruningPolicy none() { return {}; }
    static PruningPolicy threshold(double theta);
};

/// Per-node importance table: every node with a positive count in at least
/// one cluster, with its cross-cluster stats.
class NirTable {
  public:
    using Entry = std::pair<Node, NodesetStats>;

    NirTable() = default;
    NirTable(int cluster_count, std::vector<Entry> entries);

    int cluster_count() const noexcept { return cluster_count_; }
    std::size_t size() const noexcept { return entries_.size(); }
    /// Sorted by (attribute, value).
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const NodesetStats* find(const Node& node) const;
    std::vector<Node> nodes_in_cluster(int cluster) const;

  private:
    int cluster_count_ = 0;
    std::vector<Entry> entries_;
};

namespace detail {

// Nodesets encoded as sorted (attribute, value-code) words; the codebook
// lives in the lattice. Used for hashed lookups on the labeling hot path.
using LatticeKey = std::vector<std::uint64_t>;

struct LatticeKeyHash {
    std::size_t operator()(const LatticeKey& key) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t word : key) {
            h ^= word;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

/// The nodeset lattice: every nodeset (sizes 1..q) with a positive count in
/// at least one cluster, minus whatever the pruning policy removed.
/// Singletons survive every policy so per-node lookups always work.
class NnirLattice {
  public:
    using Entry = std::pair<Nodeset, NodesetStats>;

    NnirLattice() = default;
    NnirLattice(int attribute_count, int cluster_count, std::vector<Entry> entries,
                PruningPolicy policy);

    int attribute_count() const noexcept { return attribute_count_; }
    int cluster_count() const noexcept { return cluster_count_; }
    std::size_t size() const noexcept { return entries_.size(); }
    /// Sorted by (nodeset size, nodes).
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const PruningPolicy& policy() const noexcept { return policy_; }

    const NodesetStats* find(const Nodeset& nodeset) const;
    /// A nodeset is in cluster i's tree when it survived pruning and occurs
    /// in that cluster.
    bool present(int cluster, const Nodeset& nodeset) const;

    /// Stats of a point's projection onto every nonempty attribute subset,
    /// indexed by attribute bitmask; null where the projected nodeset is not
    /// in the lattice. Views the lattice, so keep the lattice alive.
    class PointProjection {
      public:
        int attribute_count() const noexcept { return attribute_count_; }
        const NodesetStats* stats(std::uint32_t attribute_mask) const {
            return by_mask_[attribute_mask];
        }

      private:
        friend class NnirLattice;
        int attribute_count_ = 0;
        std::vector<const NodesetStats*> by_mask_;
    };

    PointProjection project(const DataPoint& point) const;

  private:
    int attribute_count_ = 0;
    int cluster_count_ = 0;
    std::vector<Entry> entries_;
    PruningPolicy policy_;
    std::vector<std::unordered_map<std::string, std::uint32_t>> value_codes_;
    std::unordered_map<detail::LatticeKey, std::uint32_t, detail::LatticeKeyHash> index_;

    void build_index();
};

/// Everything needed to label new points: the schema, cluster sizes, the
/// per-node table and the nodeset lattice.
struct RepresentativeModel {
    AttributeSchema schema;
    std::vector<std::uint64_t> cluster_sizes;
    NirTable nir;
    NnirLattice nnir;

    int cluster_count() const noexcept { return static_cast<int>(cluster_sizes.size()); }
};

std::uint64_t nodeset_frequency(const Clustering& clustering, int cluster, const Nodeset& nodeset);
std::vector<double> cluster_shares(std::span<const std::uint64_t> counts);

/// 1 - E(share)/log k with 0*log 0 = 0; natural log (the base cancels).
/// Values within 1e-12 of an endpoint snap to it so exclusivity and
/// uniformity are exact. k = 1 yields 1.
double entropy_weighting(std::span<const double> shares);

double importance(const Clustering& clustering, int cluster, const Nodeset& nodeset);

NirTable build_nir(const Clustering& clustering);
NnirLattice build_nnir(const Clustering& clustering,
                       const PruningPolicy& policy = PruningPolicy::none());
NnirLattice prune_threshold(const NnirLattice& lattice, double theta);
RepresentativeModel build_model(const Clustering& clustering,
                                const PruningPolicy& policy = PruningPolicy::none());

} // namespace mardl
