#include "mardl/io.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include <json.hpp>

namespace mardl {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kModelFormat = "mardl-model";
constexpr std::string_view kReportFormat = "mardl-report";

std::string shortest(double value) {
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, end);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows; // already trimmed where unquoted
};

RawTable parse_csv(std::string_view text) {
    RawTable table;
    std::vector<std::string> record;
    std::string cell;
    bool quoted = false;       // current cell was quoted
    bool in_quotes = false;
    bool at_cell_start = true;
    std::size_t i = 0;

    auto push_cell = [&]() {
        record.push_back(quoted ? cell : trim(cell));
        cell.clear();
        quoted = false;
        at_cell_start = true;
    };
    auto push_record = [&]() {
        push_cell();
        if (table.header.empty())
            table.header = std::move(record);
        else
            table.rows.push_back(std::move(record));
        record.clear();
    };

    bool any = !text.empty();
    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
            }
            ++i;
            continue;
        }
        switch (c) {
        case '"':
            if (at_cell_start && cell.empty()) {
                in_quotes = true;
                quoted = true;
                at_cell_start = false;
            } else {
                cell += c;
            }
            break;
        case ',':
            push_cell();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            push_record();
            break;
        case '\n':
            push_record();
            break;
        default:
            cell += c;
            at_cell_start = false;
            break;
        }
        ++i;
    }
    if (in_quotes)
        fail(errc::malformed_document, "unterminated quote in CSV input");
    // Final record when the file does not end in a newline.
    if (!cell.empty() || !record.empty() ||
        (any && table.header.empty()))
        push_record();
    return table;
}

bool needs_quoting(const std::string& cell) {
    if (cell.empty())
        return false;
    if (cell.find_first_of(",\"\n\r") != std::string::npos)
        return true;
    return trim(cell) != cell;
}

void append_cell(std::string& out, const std::string& cell) {
    if (!needs_quoting(cell)) {
        out += cell;
        return;
    }
    out += '"';
    for (char c : cell) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
}

ordered_json stats_to_json(const NodesetStats& stats) {
    ordered_json entry;
    entry["counts"] = stats.counts;
    entry["share"] = stats.share;
    entry["weighting"] = stats.weighting;
    entry["importance"] = stats.importance;
    return entry;
}

NodesetStats stats_from_json(const ordered_json& entry, std::size_t k) {
    NodesetStats stats;
    stats.counts = entry.at("counts").get<std::vector<std::uint64_t>>();
    stats.share = entry.at("share").get<std::vector<double>>();
    stats.weighting = entry.at("weighting").get<double>();
    stats.importance = entry.at("importance").get<std::vector<double>>();
    if (stats.counts.size() != k || stats.share.size() != k || stats.importance.size() != k)
        fail(errc::malformed_document, "stats vectors disagree with k");
    return stats;
}

std::string node_to_text(const AttributeSchema& schema, const Node& node) {
    return to_string(schema, node);
}

Node node_from_text(const AttributeSchema& schema, const std::string& text) {
    auto pos = text.find('=');
    if (pos == std::string::npos)
        fail(errc::malformed_document, "node is not name=value: " + text);
    auto attribute = schema.index_of(text.substr(0, pos));
    if (!attribute)
        fail(errc::malformed_document, "unknown attribute in node: " + text);
    return Node{*attribute, text.substr(pos + 1)};
}

ordered_json pruning_to_json(const PruningPolicy& policy) {
    ordered_json out;
    if (policy.kind == PruningPolicy::Kind::threshold) {
        out["kind"] = "threshold";
        out["theta"] = policy.theta;
    } else {
        out["kind"] = "none";
    }
    return out;
}

PruningPolicy pruning_from_json(const ordered_json& doc) {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "none")
        return PruningPolicy::none();
    if (kind == "threshold")
        return PruningPolicy::threshold(doc.at("theta").get<double>());
    fail(errc::malformed_document, "unknown pruning kind: " + kind);
}

} // namespace

ParsedTable parse_table(std::string_view text) {
    RawTable raw = parse_csv(text);
    if (raw.header.empty())
        fail(errc::empty_dataset, "input has no header row");

    std::optional<std::size_t> cluster_column;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
        if (raw.header[c] == kClusterColumn) {
            if (cluster_column)
                fail(errc::duplicate_header, "duplicate __cluster column");
            cluster_column = c;
        } else {
            names.push_back(raw.header[c]);
        }
    }
    if (names.empty())
        fail(errc::empty_dataset, "no attribute columns in header");
    for (std::size_t a = 0; a < names.size(); ++a)
        for (std::size_t b = a + 1; b < names.size(); ++b)
            if (names[a] == names[b])
                fail(errc::duplicate_header, "duplicate attribute name: " + names[a]);

    ParsedTable table{AttributeSchema(names), {}, cluster_column.has_value(), {}};
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const auto& row = raw.rows[r];
        const std::string where = "row " + std::to_string(r + 2); // header is row 1
        if (row.size() != raw.header.size())
            fail(errc::ragged_row, where + " has " + std::to_string(row.size()) +
                                       " cells, expected " + std::to_string(raw.header.size()));
        DataPoint point;
        point.row_id = static_cast<std::int64_t>(r);
        point.values.reserve(names.size());
        std::optional<int> label;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (cluster_column && c == *cluster_column) {
                if (row[c].empty())
                    continue; // unlabeled row
                int value = 0;
                auto [end, ec] =
                    std::from_chars(row[c].data(), row[c].data() + row[c].size(), value);
                if (ec != std::errc{} || end != row[c].data() + row[c].size() || value < 0)
                    fail(errc::bad_cluster_label,
                         where + " has a bad __cluster label: " + row[c]);
                label = value;
            } else {
                if (row[c].empty())
                    fail(errc::missing_value,
                         where + " is missing a value for " +
                             names[point.values.size()]);
                point.values.push_back(row[c]);
            }
        }
        table.points.push_back(std::move(point));
        if (cluster_column)
            table.cluster_labels.push_back(label);
    }
    return table;
}

std::string emit_table(const AttributeSchema& schema, std::span<const DataPoint> points,
                       std::span<const std::optional<int>> cluster_labels) {
    const bool with_labels = !cluster_labels.empty();
    if (with_labels && cluster_labels.size() != points.size())
        fail(errc::invalid_argument, "one cluster label per point required");
    std::string out;
    for (std::size_t a = 0; a < schema.names().size(); ++a) {
        if (a > 0)
            out += ',';
        append_cell(out, schema.names()[a]);
    }
    if (with_labels) {
        out += ',';
        out += kClusterColumn;
    }
    out += '\n';
    for (std::size_t r = 0; r < points.size(); ++r) {
        for (std::size_t c = 0; c < points[r].values.size(); ++c) {
            if (c > 0)
                out += ',';
            append_cell(out, points[r].values[c]);
        }
        if (with_labels) {
            out += ',';
            if (cluster_labels[r])
                out += std::to_string(*cluster_labels[r]);
        }
        out += '\n';
    }
    return out;
}

Clustering to_clustering(const ParsedTable& table) {
    if (!table.has_cluster_column)
        fail(errc::bad_cluster_label, "input has no __cluster column");
    int k = 0;
    for (const auto& label : table.cluster_labels)
        if (label)
            k = std::max(k, *label + 1);
    if (k == 0)
        fail(errc::bad_cluster_label, "no row has a cluster label");
    std::vector<std::vector<DataPoint>> clusters(static_cast<std::size_t>(k));
    std::vector<DataPoint> unlabeled;
    for (std::size_t r = 0; r < table.points.size(); ++r) {
        if (table.cluster_labels[r])
            clusters[static_cast<std::size_t>(*table.cluster_labels[r])].push_back(
                table.points[r]);
        else
            unlabeled.push_back(table.points[r]);
    }
    for (int i = 0; i < k; ++i)
        if (clusters[static_cast<std::size_t>(i)].empty())
            fail(errc::bad_cluster_label, "cluster " + std::to_string(i) + " has no rows");
    return Clustering(table.schema, std::move(clusters), std::move(unlabeled));
}

std::string serialize_model(const RepresentativeModel& model) {
    ordered_json doc;
    doc["format"] = kModelFormat;
    doc["format_version"] = kModelFormatVersion;
    doc["schema"] = model.schema.names();
    doc["k"] = model.cluster_count();
    doc["cluster_sizes"] = model.cluster_sizes;
    doc["pruning"] = pruning_to_json(model.nnir.policy());

    ordered_json nir = ordered_json::array();
    for (const auto& [node, stats] : model.nir.entries()) {
        ordered_json entry;
        entry["node"] = node_to_text(model.schema, node);
        entry.update(stats_to_json(stats));
        nir.push_back(std::move(entry));
    }
    doc["nir"] = std::move(nir);

    ordered_json nnir = ordered_json::array();
    for (const auto& [nodeset, stats] : model.nnir.entries()) {
        ordered_json entry;
        std::vector<std::string> nodes;
        nodes.reserve(nodeset.nodes().size());
        for (const auto& node : nodeset.nodes())
            nodes.push_back(node_to_text(model.schema, node));
        entry["nodeset"] = std::move(nodes);
        entry.update(stats_to_json(stats));
        nnir.push_back(std::move(entry));
    }
    doc["nnir"] = std::move(nnir);
    return doc.dump(2) + "\n";
}

RepresentativeModel deserialize_model(std::string_view text) {
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded())
        fail(errc::malformed_document, "model document is not valid JSON");
    try {
        if (doc.value("format", std::string{}) != kModelFormat)
            fail(errc::malformed_document, "not a model document");
        const int version = doc.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            fail(errc::version_mismatch,
                 "unsupported model format version " + std::to_string(version));

        AttributeSchema schema(doc.at("schema").get<std::vector<std::string>>());
        auto sizes = doc.at("cluster_sizes").get<std::vector<std::uint64_t>>();
        const auto k = doc.at("k").get<std::size_t>();
        if (k == 0 || sizes.size() != k)
            fail(errc::malformed_document, "cluster_sizes disagree with k");
        PruningPolicy policy = pruning_from_json(doc.at("pruning"));

        std::vector<NirTable::Entry> nir_entries;
        for (const auto& entry : doc.at("nir")) {
            Node node = node_from_text(schema, entry.at("node").get<std::string>());
            nir_entries.emplace_back(std::move(node), stats_from_json(entry, k));
        }
        std::vector<NnirLattice::Entry> nnir_entries;
        for (const auto& entry : doc.at("nnir")) {
            std::vector<Node> nodes;
            for (const auto& text_node : entry.at("nodeset"))
                nodes.push_back(node_from_text(schema, text_node.get<std::string>()));
            nnir_entries.emplace_back(Nodeset::of(std::move(nodes)),
                                      stats_from_json(entry, k));
        }
        return RepresentativeModel{
            schema, std::move(sizes),
            NirTable(static_cast<int>(k), std::move(nir_entries)),
            NnirLattice(schema.attribute_count(), static_cast<int>(k),
                        std::move(nnir_entries), policy)};
    } catch (const ordered_json::exception& e) {
        fail(errc::malformed_document, std::string("model document: ") + e.what());
    }
}

std::string serialize_assignments(std::span<const LabelAssignment> assignments) {
    std::string out = "row_id,cluster,score,tie,status\n";
    for (const auto& assignment : assignments) {
        if (assignment.point_id)
            out += std::to_string(*assignment.point_id);
        out += ',';
        if (assignment.cluster)
            out += std::to_string(*assignment.cluster);
        out += ',';
        if (assignment.cluster)
            out += shortest(assignment.scores[static_cast<std::size_t>(*assignment.cluster)]);
        out += ',';
        out += assignment.tie ? "true" : "false";
        out += ',';
        out += !assignment.cluster ? "unassigned" : (assignment.fallback ? "fallback" : "assigned");
        out += '\n';
    }
    return out;
}

std::string serialize_report(const ComparisonReport& report) {
    ordered_json doc;
    doc["format"] = kReportFormat;
    doc["format_version"] = 1;
    ordered_json methods = ordered_json::array();
    for (Method method : report.methods)
        methods.push_back(std::string(method_name(method)));
    doc["methods"] = std::move(methods);
    doc["n_points"] = report.point_count();
    doc["agreement"] = report.agreement;
    doc["co_assigned"] = report.co_assigned;
    ordered_json rates = ordered_json::array();
    for (std::size_t a = 0; a < report.methods.size(); ++a) {
        ordered_json row = ordered_json::array();
        for (std::size_t b = 0; b < report.methods.size(); ++b)
            row.push_back(report.agreement_rate(a, b));
        rates.push_back(std::move(row));
    }
    doc["agreement_rates"] = std::move(rates);

    auto record_to_json = [&](const ComparisonReport::PointRecord& record) {
        ordered_json item;
        item["index"] = record.index;
        if (record.row_id)
            item["row_id"] = *record.row_id;
        else
            item["row_id"] = nullptr;
        ordered_json labels;
        ordered_json ties;
        ordered_json scores;
        for (std::size_t m = 0; m < report.methods.size(); ++m) {
            const auto name = std::string(method_name(report.methods[m]));
            const auto& assignment = record.by_method[m];
            if (assignment.cluster)
                labels[name] = *assignment.cluster;
            else
                labels[name] = nullptr;
            ties[name] = assignment.tie;
            scores[name] = assignment.scores;
        }
        item["labels"] = std::move(labels);
        item["ties"] = std::move(ties);
        item["scores"] = std::move(scores);
        return item;
    };

    ordered_json points = ordered_json::array();
    for (const auto& record : report.points)
        points.push_back(record_to_json(record));
    doc["points"] = std::move(points);

    ordered_json discordant = ordered_json::array();
    for (const auto* record : report.discordant_points())
        discordant.push_back(record_to_json(*record));
    doc["discordant"] = std::move(discordant);
    return doc.dump(2) + "\n";
}

} // namespace mardl
