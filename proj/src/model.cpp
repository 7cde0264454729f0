#include "mardl/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace mardl {

AttributeSchema::AttributeSchema(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty())
        fail(errc::invalid_config, "schema needs at least one attribute");
    std::unordered_set<std::string> seen;
    for (auto& name : names_) {
        name = trim(name);
        if (name.empty())
            fail(errc::duplicate_header, "empty attribute name");
        if (name.find('=') != std::string::npos)
            fail(errc::invalid_config, "attribute name may not contain '=': " + name);
        if (!seen.insert(name).second)
            fail(errc::duplicate_header, "duplicate attribute name: " + name);
    }
}

const std::string& AttributeSchema::name(int attribute) const {
    if (attribute < 0 || attribute >= attribute_count())
        fail(errc::index_out_of_range, "attribute index " + std::to_string(attribute));
    return names_[static_cast<std::size_t>(attribute)];
}

std::optional<int> AttributeSchema::index_of(const std::string& name) const {
    for (int a = 0; a < attribute_count(); ++a)
        if (names_[static_cast<std::size_t>(a)] == name)
            return a;
    return std::nullopt;
}

std::string trim(std::string_view text) {
    const auto* ws = " \t\r\n\f\v";
    auto begin = text.find_first_not_of(ws);
    if (begin == std::string_view::npos)
        return {};
    auto end = text.find_last_not_of(ws);
    return std::string(text.substr(begin, end - begin + 1));
}

DataPoint normalized(const AttributeSchema& schema, const DataPoint& point) {
    if (static_cast<int>(point.values.size()) != schema.attribute_count())
        fail(errc::invalid_point,
             "point has " + std::to_string(point.values.size()) + " values, schema has " +
                 std::to_string(schema.attribute_count()) + " attributes");
    DataPoint out{point.values, point.row_id};
    for (auto& value : out.values) {
        value = trim(value);
        if (value.empty())
            fail(errc::missing_value, "point has an empty value");
    }
    return out;
}

std::string to_string(const AttributeSchema& schema, const Node& node) {
    return schema.name(node.attribute) + "=" + node.value;
}

Nodeset Nodeset::of(std::vector<Node> nodes) {
    if (nodes.empty())
        fail(errc::empty_nodeset, "nodeset needs at least one node");
    std::sort(nodes.begin(), nodes.end());
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i].attribute == nodes[i - 1].attribute)
            fail(errc::duplicate_attribute,
                 "two nodes on attribute " + std::to_string(nodes[i].attribute));
    Nodeset set;
    set.nodes_ = std::move(nodes);
    return set;
}

Nodeset validate_nodeset(std::vector<Node> nodes) {
    return Nodeset::of(std::move(nodes));
}

std::string to_string(const AttributeSchema& schema, const Nodeset& nodeset) {
    std::string out = "{";
    for (std::size_t i = 0; i < nodeset.nodes().size(); ++i) {
        if (i > 0)
            out += ",";
        out += to_string(schema, nodeset.nodes()[i]);
    }
    return out + "}";
}

NodesetCombination NodesetCombination::of(std::vector<Nodeset> blocks, int attribute_count) {
    std::set<int> covered;
    int total = 0;
    for (const auto& block : blocks) {
        for (const auto& node : block.nodes()) {
            if (node.attribute < 0 || node.attribute >= attribute_count)
                fail(errc::index_out_of_range,
                     "attribute index " + std::to_string(node.attribute));
            if (!covered.insert(node.attribute).second)
                fail(errc::duplicate_attribute,
                     "blocks overlap on attribute " + std::to_string(node.attribute));
        }
        total += block.size();
    }
    if (total != attribute_count)
        fail(errc::invalid_argument, "blocks cover " + std::to_string(total) + " of " +
                                         std::to_string(attribute_count) + " attributes");
    // Canonical block order: by the smallest attribute in each block.
    std::sort(blocks.begin(), blocks.end(), [](const Nodeset& a, const Nodeset& b) {
        return a.nodes().front().attribute < b.nodes().front().attribute;
    });
    NodesetCombination combination;
    combination.blocks_ = std::move(blocks);
    return combination;
}

std::string to_string(const AttributeSchema& schema, const NodesetCombination& combination) {
    std::string out;
    for (std::size_t i = 0; i < combination.blocks().size(); ++i) {
        if (i > 0)
            out += "+";
        out += to_string(schema, combination.blocks()[i]);
    }
    return out;
}

Clustering::Clustering(AttributeSchema schema,
                       std::vector<std::vector<DataPoint>> clusters,
                       std::vector<DataPoint> unlabeled)
    : schema_(std::move(schema)), clusters_(std::move(clusters)), unlabeled_(std::move(unlabeled)) {
    if (clusters_.empty())
        fail(errc::invalid_clustering, "clustering needs at least one cluster");
    std::unordered_set<std::int64_t> ids;
    auto check = [&](DataPoint& point) {
        point = normalized(schema_, point);
        if (point.row_id && !ids.insert(*point.row_id).second)
            fail(errc::invalid_clustering,
                 "row id " + std::to_string(*point.row_id) + " appears twice");
    };
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        if (clusters_[i].empty())
            fail(errc::invalid_clustering, "cluster " + std::to_string(i) + " is empty");
        for (auto& point : clusters_[i])
            check(point);
    }
    for (auto& point : unlabeled_)
        check(point);
}

const std::vector<DataPoint>& Clustering::cluster(int index) const {
    if (index < 0 || index >= cluster_count())
        fail(errc::cluster_index_out_of_range, "cluster index " + std::to_string(index));
    return clusters_[static_cast<std::size_t>(index)];
}

std::size_t Clustering::total_clustered() const noexcept {
    std::size_t total = 0;
    for (const auto& cluster : clusters_)
        total += cluster.size();
    return total;
}

Nodeset project_point(const DataPoint& point, std::span<const int> attributes) {
    if (attributes.empty())
        fail(errc::empty_nodeset, "projection needs at least one attribute");
    std::vector<Node> nodes;
    nodes.reserve(attributes.size());
    for (int attribute : attributes) {
        if (attribute < 0 || attribute >= static_cast<int>(point.values.size()))
            fail(errc::index_out_of_range, "attribute index " + std::to_string(attribute));
        nodes.push_back({attribute, point.values[static_cast<std::size_t>(attribute)]});
    }
    return Nodeset::of(std::move(nodes));
}

} // namespace mardl
