#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mardl/labeling.hpp"
#include "mardl/model.hpp"
#include "mardl/pipeline.hpp"
#include "mardl/representative.hpp"

namespace mardl {

/// Reserved CSV column holding 0-based integer cluster labels; rows with an
/// empty label are the unlabeled set.
inline constexpr std::string_view kClusterColumn = "__cluster";

struct ParsedTable {
    AttributeSchema schema;
    std::vector<DataPoint> points; // row_id = 0-based data row index
    bool has_cluster_column = false;
    std::vector<std::optional<int>> cluster_labels; // parallel to points when present
};

/// CSV with a header row: comma separated, double-quote quoting, LF or CRLF.
/// Unquoted cells are trimmed; empty data cells are rejected with their row.
ParsedTable parse_table(std::string_view text);

/// LF line endings; cells quoted only when they need it.
std::string emit_table(const AttributeSchema& schema, std::span<const DataPoint> points,
                       std::span<const std::optional<int>> cluster_labels = {});

/// Groups a parsed table by its cluster labels (0..k-1, no gaps); rows with
/// no label become the unlabeled set.
Clustering to_clustering(const ParsedTable& table);

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document; integer counts stay exact and reals round-trip
/// bit-identically, so serialize(deserialize(text)) == text.
std::string serialize_model(const RepresentativeModel& model);
RepresentativeModel deserialize_model(std::string_view text);

/// CSV: row_id, cluster, score, tie, status.
std::string serialize_assignments(std::span<const LabelAssignment> assignments);

/// Versioned JSON with per-point scores, agreement counts and rates, and the
/// discordant points.
std::string serialize_report(const ComparisonReport& report);

/// The bundled demo dataset: three attributes, three clusters of five points,
/// four unlabeled points.
Clustering example_clustering();

/// Text walkthrough of the bundled dataset: the clusters, the entropy
/// weightings and per-method scores for the focus point (b,f,b), and where
/// the three labeling rules disagree. Byte-identical across runs.
std::string demo_report();

} // namespace mardl
