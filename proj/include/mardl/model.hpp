#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mardl/errors.hpp"

namespace mardl {

/// Ordered list of categorical attribute names. Values are discovered from
/// data, so the schema itself is just the column layout.
class AttributeSchema {
  public:
    explicit AttributeSchema(std::vector<std::string> names);

    int attribute_count() const noexcept { return static_cast<int>(names_.size()); }
    const std::string& name(int attribute) const;
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::optional<int> index_of(const std::string& name) const;

    bool operator==(const AttributeSchema&) const = default;

  private:
    std::vector<std::string> names_;
};

/// One row of categorical values, one per schema attribute. `row_id` is the
/// source row when the point came from a file.
struct DataPoint {
    std::vector<std::string> values;
    std::optional<std::int64_t> row_id;
};

// Trims ASCII whitespace from both ends; values compare as exact strings
// after this, with no case folding.
std::string trim(std::string_view text);
DataPoint normalized(const AttributeSchema& schema, const DataPoint& point);

/// An (attribute, value) pair. The attribute index disambiguates equal values
/// from different columns.
struct Node {
    int attribute = 0;
    std::string value;

    auto operator<=>(const Node&) const = default;
};

std::string to_string(const AttributeSchema& schema, const Node& node);

/// A set of nodes over pairwise-distinct attributes, stored sorted by
/// attribute index so equality and hashing ignore construction order.
class Nodeset {
  public:
    static Nodeset of(std::vector<Node> nodes);

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    int size() const noexcept { return static_cast<int>(nodes_.size()); }

    bool operator==(const Nodeset&) const = default;
    auto operator<=>(const Nodeset&) const = default;

  private:
    Nodeset() = default;
    std::vector<Node> nodes_;
};

Nodeset validate_nodeset(std::vector<Node> nodes);
std::string to_string(const AttributeSchema& schema, const Nodeset& nodeset);

/// A partition of a point's attributes into attribute-disjoint nodesets whose
/// union restores the full point.
class NodesetCombination {
  public:
    static NodesetCombination of(std::vector<Nodeset> blocks, int attribute_count);

    const std::vector<Nodeset>& blocks() const noexcept { return blocks_; }
    int block_count() const noexcept { return static_cast<int>(blocks_.size()); }

    bool operator==(const NodesetCombination&) const = default;

  private:
    NodesetCombination() = default;
    std::vector<Nodeset> blocks_;
};

std::string to_string(const AttributeSchema& schema, const NodesetCombination& combination);

/// A clustering result: k clusters of points plus an optional unlabeled set.
/// Immutable once constructed; all points are validated and trimmed.
class Clustering {
  public:
    Clustering(AttributeSchema schema,
               std::vector<std::vector<DataPoint>> clusters,
               std::vector<DataPoint> unlabeled = {});

    const AttributeSchema& schema() const noexcept { return schema_; }
    int cluster_count() const noexcept { return static_cast<int>(clusters_.size()); }
    const std::vector<DataPoint>& cluster(int index) const;
    std::size_t cluster_size(int index) const { return cluster(index).size(); }
    std::size_t total_clustered() const noexcept;
    const std::vector<DataPoint>& unlabeled() const noexcept { return unlabeled_; }

  private:
    AttributeSchema schema_;
    std::vector<std::vector<DataPoint>> clusters_;
    std::vector<DataPoint> unlabeled_;
};

Nodeset project_point(const DataPoint& point, std::span<const int> attributes);

} // namespace mardl
