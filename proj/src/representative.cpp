#include "mardl/representative.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mardl {

namespace {

constexpr double kSnapTolerance = 1e-12;

std::uint64_t pack(int attribute, std::uint32_t code) {
    return (static_cast<std::uint64_t>(attribute) << 32) | code;
}

int packed_attribute(std::uint64_t word) {
    return static_cast<int>(word >> 32);
}

// (size, nodes) ordering; keeps serialized documents and iteration stable.
bool lattice_entry_less(const NnirLattice::Entry& a, const NnirLattice::Entry& b) {
    if (a.first.size() != b.first.size())
        return a.first.size() < b.first.size();
    return a.first.nodes() < b.first.nodes();
}

} // namespace

std::uint64_t NodesetStats::total() const noexcept {
    std::uint64_t sum = 0;
    for (auto count : counts)
        sum += count;
    return sum;
}

double NodesetStats::max_importance() const noexcept {
    double best = 0.0;
    for (double w : importance)
        best = std::max(best, w);
    return best;
}

NodesetStats compute_stats(std::vector<std::uint64_t> counts,
                           std::span<const std::uint64_t> cluster_sizes) {
    if (counts.size() != cluster_sizes.size())
        fail(errc::invalid_argument, "counts and cluster sizes disagree on k");
    NodesetStats stats;
    stats.counts = std::move(counts);
    stats.share = cluster_shares(stats.counts);
    stats.weighting = entropy_weighting(stats.share);
    stats.importance.resize(stats.counts.size());
    for (std::size_t i = 0; i < stats.counts.size(); ++i)
        stats.importance[i] = (static_cast<double>(stats.counts[i]) /
                               static_cast<double>(cluster_sizes[i])) *
                              stats.weighting;
    return stats;
}

PruningPolicy PruningPolicy::threshold(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        fail(errc::invalid_config, "pruning threshold must be in [0,1]");
    return {Kind::threshold, theta};
}

NirTable::NirTable(int cluster_count, std::vector<Entry> entries)
    : cluster_count_(cluster_count), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
}

const NodesetStats* NirTable::find(const Node& node) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), node,
                               [](const Entry& e, const Node& n) { return e.first < n; });
    if (it == entries_.end() || !(it->first == node))
        return nullptr;
    return &it->second;
}

std::vector<Node> NirTable::nodes_in_cluster(int cluster) const {
    if (cluster < 0 || cluster >= cluster_count_)
        fail(errc::cluster_index_out_of_range, "cluster index " + std::to_string(cluster));
    std::vector<Node> nodes;
    for (const auto& [node, stats] : entries_)
        if (stats.counts[static_cast<std::size_t>(cluster)] > 0)
            nodes.push_back(node);
    return nodes;
}

NnirLattice::NnirLattice(int attribute_count, int cluster_count, std::vector<Entry> entries,
                         PruningPolicy policy)
    : attribute_count_(attribute_count),
      cluster_count_(cluster_count),
      entries_(std::move(entries)),
      policy_(policy) {
    std::sort(entries_.begin(), entries_.end(), lattice_entry_less);
    build_index();
}

void NnirLattice::build_index() {
    value_codes_.assign(static_cast<std::size_t>(attribute_count_), {});
    index_.clear();
    index_.reserve(entries_.size());
    for (std::uint32_t i = 0; i < entries_.size(); ++i) {
        detail::LatticeKey key;
        key.reserve(static_cast<std::size_t>(entries_[i].first.size()));
        for (const auto& node : entries_[i].first.nodes()) {
            auto& codes = value_codes_[static_cast<std::size_t>(node.attribute)];
            auto [it, inserted] =
                codes.emplace(node.value, static_cast<std::uint32_t>(codes.size()));
            key.push_back(pack(node.attribute, it->second));
        }
        index_.emplace(std::move(key), i);
    }
}

const NodesetStats* NnirLattice::find(const Nodeset& nodeset) const {
    detail::LatticeKey key;
    key.reserve(static_cast<std::size_t>(nodeset.size()));
    for (const auto& node : nodeset.nodes()) {
        if (node.attribute < 0 || node.attribute >= attribute_count_)
            fail(errc::index_out_of_range, "attribute index " + std::to_string(node.attribute));
        const auto& codes = value_codes_[static_cast<std::size_t>(node.attribute)];
        auto it = codes.find(node.value);
        if (it == codes.end())
            return nullptr;
        key.push_back(pack(node.attribute, it->second));
    }
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

bool NnirLattice::present(int cluster, const Nodeset& nodeset) const {
    if (cluster < 0 || cluster >= cluster_count_)
        fail(errc::cluster_index_out_of_range, "cluster index " + std::to_string(cluster));
    const NodesetStats* stats = find(nodeset);
    return stats && stats->counts[static_cast<std::size_t>(cluster)] > 0;
}

NnirLattice::PointProjection NnirLattice::project(const DataPoint& point) const {
    const int q = attribute_count_;
    if (static_cast<int>(point.values.size()) != q)
        fail(errc::invalid_point, "point does not match the lattice's attribute count");
    if (q > 31)
        fail(errc::too_many_attributes, "projection limited to 31 attributes");

    std::vector<std::uint32_t> codes(static_cast<std::size_t>(q));
    std::uint32_t known = 0;
    for (int a = 0; a < q; ++a) {
        const auto& lookup = value_codes_[static_cast<std::size_t>(a)];
        auto it = lookup.find(point.values[static_cast<std::size_t>(a)]);
        if (it != lookup.end()) {
            codes[static_cast<std::size_t>(a)] = it->second;
            known |= 1u << a;
        }
    }

    PointProjection projection;
    projection.attribute_count_ = q;
    projection.by_mask_.assign(std::size_t{1} << q, nullptr);
    detail::LatticeKey key;
    key.reserve(static_cast<std::size_t>(q));
    for (std::uint32_t mask = 1; mask < (1u << q); ++mask) {
        if ((mask & known) != mask)
            continue; // some value never occurs anywhere: projection absent
        key.clear();
        for (int a = 0; a < q; ++a)
            if (mask & (1u << a))
                key.push_back(pack(a, codes[static_cast<std::size_t>(a)]));
        auto it = index_.find(key);
        if (it != index_.end())
            projection.by_mask_[mask] = &entries_[it->second].second;
    }
    return projection;
}

std::uint64_t nodeset_frequency(const Clustering& clustering, int cluster,
                                const Nodeset& nodeset) {
    const auto& points = clustering.cluster(cluster);
    for (const auto& node : nodeset.nodes())
        if (node.attribute >= clustering.schema().attribute_count())
            fail(errc::index_out_of_range, "attribute index " + std::to_string(node.attribute));
    std::uint64_t count = 0;
    for (const auto& point : points) {
        bool contains = true;
        for (const auto& node : nodeset.nodes())
            if (point.values[static_cast<std::size_t>(node.attribute)] != node.value) {
                contains = false;
                break;
            }
        count += contains ? 1 : 0;
    }
    return count;
}

std::vector<double> cluster_shares(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto count : counts)
        total += count;
    if (total == 0)
        fail(errc::zero_total_count, "nodeset occurs in no cluster");
    std::vector<double> shares(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        shares[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return shares;
}

double entropy_weighting(std::span<const double> shares) {
    if (shares.empty())
        fail(errc::invalid_argument, "share vector is empty");
    double sum = 0.0;
    for (double share : shares) {
        if (share < -1e-9 || share > 1.0 + 1e-9)
            fail(errc::invalid_argument, "share outside [0,1]");
        sum += share;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        fail(errc::invalid_argument, "shares do not sum to 1");
    const std::size_t k = shares.size();
    if (k == 1)
        return 1.0;
    double entropy = 0.0;
    for (double share : shares)
        if (share > 0.0)
            entropy -= share * std::log(share);
    double weighting = 1.0 - entropy / std::log(static_cast<double>(k));
    if (weighting < kSnapTolerance)
        return 0.0;
    if (weighting > 1.0 - kSnapTolerance)
        return 1.0;
    return weighting;
}

double importance(const Clustering& clustering, int cluster, const Nodeset& nodeset) {
    const int k = clustering.cluster_count();
    if (cluster < 0 || cluster >= k)
        fail(errc::cluster_index_out_of_range, "cluster index " + std::to_string(cluster));
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        counts[static_cast<std::size_t>(i)] = nodeset_frequency(clustering, i, nodeset);
    auto shares = cluster_shares(counts);
    double frequency = static_cast<double>(counts[static_cast<std::size_t>(cluster)]) /
                       static_cast<double>(clustering.cluster_size(cluster));
    return frequency * entropy_weighting(shares);
}

NirTable build_nir(const Clustering& clustering) {
    const int k = clustering.cluster_count();
    const int q = clustering.schema().attribute_count();
    std::map<Node, std::vector<std::uint64_t>> counts;
    for (int i = 0; i < k; ++i)
        for (const auto& point : clustering.cluster(i))
            for (int a = 0; a < q; ++a) {
                Node node{a, point.values[static_cast<std::size_t>(a)]};
                auto [it, inserted] =
                    counts.try_emplace(std::move(node), static_cast<std::size_t>(k), 0);
                ++it->second[static_cast<std::size_t>(i)];
            }

    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        sizes[static_cast<std::size_t>(i)] = clustering.cluster_size(i);

    std::vector<NirTable::Entry> entries;
    entries.reserve(counts.size());
    for (auto& [node, per_cluster] : counts)
        entries.emplace_back(node, compute_stats(std::move(per_cluster), sizes));
    return NirTable(k, std::move(entries));
}

namespace {

using detail::LatticeKey;
using detail::LatticeKeyHash;
using CountsByKey = std::unordered_map<LatticeKey, std::vector<std::uint64_t>, LatticeKeyHash>;

// Join two sorted (n-1)-keys sharing everything but the last word into an
// n-key candidate, then keep it only if every (n-1)-subset is frequent.
std::vector<LatticeKey> join_level(const std::vector<LatticeKey>& frequent,
                                   const CountsByKey& frequent_lookup) {
    std::vector<LatticeKey> candidates;
    const std::size_t n_prev = frequent.empty() ? 0 : frequent.front().size();
    LatticeKey subset(n_prev);
    for (std::size_t a = 0; a < frequent.size(); ++a) {
        for (std::size_t b = a + 1; b < frequent.size(); ++b) {
            if (!std::equal(frequent[a].begin(), frequent[a].end() - 1, frequent[b].begin(),
                            frequent[b].end() - 1))
                break; // sorted: once prefixes diverge, no later b matches
            if (packed_attribute(frequent[a].back()) == packed_attribute(frequent[b].back()))
                continue;
            LatticeKey candidate = frequent[a];
            candidate.push_back(frequent[b].back());
            bool closed = true;
            // The two generators are subsets by construction; check the rest.
            for (std::size_t drop = 0; drop + 2 < candidate.size() && closed; ++drop) {
                subset.clear();
                for (std::size_t j = 0; j < candidate.size(); ++j)
                    if (j != drop)
                        subset.push_back(candidate[j]);
                closed = frequent_lookup.contains(subset);
            }
            if (closed)
                candidates.push_back(std::move(candidate));
        }
    }
    return candidates;
}

} // namespace

NnirLattice build_nnir(const Clustering& clustering, const PruningPolicy& policy) {
    if (policy.kind == PruningPolicy::Kind::threshold &&
        !(policy.theta >= 0.0 && policy.theta <= 1.0))
        fail(errc::invalid_config, "pruning threshold must be in [0,1]");

    const int k = clustering.cluster_count();
    const int q = clustering.schema().attribute_count();

    // Values are interned per attribute; points become code rows.
    std::vector<std::unordered_map<std::string, std::uint32_t>> codes(
        static_cast<std::size_t>(q));
    std::vector<std::string> decode_storage;
    std::vector<std::vector<std::vector<std::uint32_t>>> encoded(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const auto& points = clustering.cluster(i);
        encoded[static_cast<std::size_t>(i)].reserve(points.size());
        for (const auto& point : points) {
            std::vector<std::uint32_t> row(static_cast<std::size_t>(q));
            for (int a = 0; a < q; ++a) {
                auto& lookup = codes[static_cast<std::size_t>(a)];
                auto [it, inserted] = lookup.emplace(point.values[static_cast<std::size_t>(a)],
                                                     static_cast<std::uint32_t>(lookup.size()));
                row[static_cast<std::size_t>(a)] = it->second;
            }
            encoded[static_cast<std::size_t>(i)].push_back(std::move(row));
        }
    }
    std::vector<std::vector<const std::string*>> decode(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
        auto& table = decode[static_cast<std::size_t>(a)];
        table.resize(codes[static_cast<std::size_t>(a)].size());
        for (const auto& [value, code] : codes[static_cast<std::size_t>(a)])
            table[code] = &value;
    }

    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        sizes[static_cast<std::size_t>(i)] = clustering.cluster_size(i);

    // Level 1 comes straight off the points.
    CountsByKey level;
    for (int i = 0; i < k; ++i)
        for (const auto& row : encoded[static_cast<std::size_t>(i)])
            for (int a = 0; a < q; ++a) {
                LatticeKey key{pack(a, row[static_cast<std::size_t>(a)])};
                auto [it, inserted] =
                    level.try_emplace(std::move(key), static_cast<std::size_t>(k), 0);
                ++it->second[static_cast<std::size_t>(i)];
            }

    std::vector<NnirLattice::Entry> entries;
    auto emit_level = [&](const CountsByKey& counted) {
        for (const auto& [key, per_cluster] : counted) {
            std::vector<Node> nodes;
            nodes.reserve(key.size());
            for (std::uint64_t word : key) {
                int attribute = packed_attribute(word);
                std::uint32_t code = static_cast<std::uint32_t>(word);
                nodes.push_back(
                    {attribute, *decode[static_cast<std::size_t>(attribute)][code]});
            }
            entries.emplace_back(Nodeset::of(std::move(nodes)),
                                 compute_stats(per_cluster, sizes));
        }
    };
    emit_level(level);

    // Higher levels: candidates by join, then one counting pass that probes
    // each point's n-attribute projections against the candidate set.
    std::vector<int> combo;
    for (int n = 2; n <= q && !level.empty(); ++n) {
        std::vector<LatticeKey> frequent;
        frequent.reserve(level.size());
        for (const auto& [key, per_cluster] : level)
            frequent.push_back(key);
        std::sort(frequent.begin(), frequent.end());

        CountsByKey next;
        for (auto& candidate : join_level(frequent, level))
            next.try_emplace(std::move(candidate), static_cast<std::size_t>(k), 0);
        if (next.empty())
            break;

        LatticeKey probe(static_cast<std::size_t>(n));
        for (int i = 0; i < k; ++i)
            for (const auto& row : encoded[static_cast<std::size_t>(i)]) {
                combo.assign(static_cast<std::size_t>(n), 0);
                for (int j = 0; j < n; ++j)
                    combo[static_cast<std::size_t>(j)] = j;
                while (true) {
                    for (int j = 0; j < n; ++j) {
                        int a = combo[static_cast<std::size_t>(j)];
                        probe[static_cast<std::size_t>(j)] =
                            pack(a, row[static_cast<std::size_t>(a)]);
                    }
                    auto it = next.find(probe);
                    if (it != next.end())
                        ++it->second[static_cast<std::size_t>(i)];
                    // next n-combination of {0..q-1}
                    int j = n - 1;
                    while (j >= 0 && combo[static_cast<std::size_t>(j)] == q - n + j)
                        --j;
                    if (j < 0)
                        break;
                    ++combo[static_cast<std::size_t>(j)];
                    for (int l = j + 1; l < n; ++l)
                        combo[static_cast<std::size_t>(l)] =
                            combo[static_cast<std::size_t>(l - 1)] + 1;
                }
            }

        std::erase_if(next, [](const auto& item) {
            for (auto count : item.second)
                if (count > 0)
                    return false;
            return true;
        });
        emit_level(next);
        level = std::move(next);
    }

    NnirLattice lattice(q, k, std::move(entries), PruningPolicy::none());
    if (policy.kind == PruningPolicy::Kind::threshold)
        return prune_threshold(lattice, policy.theta);
    return lattice;
}

NnirLattice prune_threshold(const NnirLattice& lattice, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        fail(errc::invalid_config, "pruning threshold must be in [0,1]");
    std::vector<NnirLattice::Entry> kept;
    kept.reserve(lattice.entries().size());
    for (const auto& entry : lattice.entries())
        if (entry.first.size() == 1 || entry.second.max_importance() >= theta)
            kept.push_back(entry);
    return NnirLattice(lattice.attribute_count(), lattice.cluster_count(), std::move(kept),
                       PruningPolicy::threshold(theta));
}

RepresentativeModel build_model(const Clustering& clustering, const PruningPolicy& policy) {
    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(clustering.cluster_count()));
    for (int i = 0; i < clustering.cluster_count(); ++i)
        sizes[static_cast<std::size_t>(i)] = clustering.cluster_size(i);
    return RepresentativeModel{clustering.schema(), std::move(sizes), build_nir(clustering),
                               build_nnir(clustering, policy)};
}

} // namespace mardl
