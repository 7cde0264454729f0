#include <cstdio>

#include "mardl/io.hpp"

namespace mardl {

namespace {

std::string fmt4(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.4g", value);
    return buffer;
}

DataPoint row(std::vector<std::string> values, std::optional<std::int64_t> id = std::nullopt) {
    return DataPoint{std::move(values), id};
}

std::string point_text(const DataPoint& point) {
    std::string out = "(";
    for (std::size_t i = 0; i < point.values.size(); ++i) {
        if (i > 0)
            out += ',';
        out += point.values[i];
    }
    return out + ")";
}

double combination_score(const NodesetCombination& combination, const RepresentativeModel& model,
                         int cluster, Method method) {
    const double q = static_cast<double>(model.schema.attribute_count());
    const double m = static_cast<double>(model.cluster_sizes[static_cast<std::size_t>(cluster)]);
    if (method == Method::nnir_product) {
        double product = 1.0;
        for (const auto& block : combination.blocks())
            product *= static_cast<double>(
                           model.nnir.find(block)->counts[static_cast<std::size_t>(cluster)]) /
                       m;
        return product * expected_combination_weight(combination, model.nnir);
    }
    double sum = 0.0;
    for (const auto& block : combination.blocks())
        sum += (block.size() / q) *
               model.nnir.find(block)->importance[static_cast<std::size_t>(cluster)];
    return sum;
}

} // namespace

Clustering example_clustering() {
    AttributeSchema schema({"A1", "A2", "A3"});
    std::vector<std::vector<DataPoint>> clusters{
        {row({"a", "m", "c"}), row({"b", "m", "b"}), row({"c", "f", "c"}), row({"a", "m", "a"}),
         row({"a", "m", "c"})},
        {row({"c", "f", "a"}), row({"c", "m", "a"}), row({"c", "f", "a"}), row({"a", "f", "b"}),
         row({"b", "m", "a"})},
        {row({"c", "m", "c"}), row({"c", "f", "b"}), row({"c", "m", "b"}), row({"b", "m", "c"}),
         row({"a", "f", "a"})},
    };
    std::vector<DataPoint> unlabeled{row({"a", "m", "c"}, 0), row({"c", "m", "a"}, 1),
                                     row({"b", "f", "b"}, 2), row({"a", "f", "c"}, 3)};
    return Clustering(std::move(schema), std::move(clusters), std::move(unlabeled));
}

std::string demo_report() {
    const Clustering clustering = example_clustering();
    const RepresentativeModel model = build_model(clustering);
    const AttributeSchema& schema = model.schema;
    const int k = model.cluster_count();
    const DataPoint focus = row({"b", "f", "b"});

    std::string out;
    out += "Bundled example dataset\n";
    out += "=======================\n";
    out += "attributes:";
    for (const auto& name : schema.names())
        out += " " + name;
    out += "\n\n";
    for (int i = 0; i < k; ++i) {
        out += "cluster " + std::to_string(i) + ":";
        for (const auto& point : clustering.cluster(i))
            out += " " + point_text(point);
        out += "\n";
    }
    out += "unlabeled:";
    for (const auto& point : clustering.unlabeled())
        out += " " + point_text(point);
    out += "\n";

    out += "\nFocus point " + point_text(focus) + "\n";
    out += "===================\n";
    out += "entropy weightings f:\n";
    std::vector<Nodeset> weighted;
    for (int a = 0; a < schema.attribute_count(); ++a)
        weighted.push_back(project_point(focus, std::vector<int>{a}));
    weighted.push_back(project_point(focus, std::vector<int>{0, 2}));
    weighted.push_back(project_point(focus, std::vector<int>{1, 2}));
    for (const auto& nodeset : weighted) {
        const NodesetStats* stats = model.nnir.find(nodeset);
        out += "  f" + to_string(schema, nodeset) + " = " +
               (stats ? fmt4(stats->weighting) : "absent") + "\n";
    }

    out += "\nnnir-product, valid combinations and scores:\n";
    for (int i = 0; i < k; ++i) {
        out += "  cluster " + std::to_string(i) + ":\n";
        for (const auto& combination : enumerate_combinations(focus, model.nnir, i))
            out += "    " + to_string(schema, combination) + " -> " +
                   fmt4(combination_score(combination, model, i, Method::nnir_product)) + "\n";
        ResemblanceScore score = resemblance(focus, i, model, Method::nnir_product);
        out += "  R_nnir(cluster " + std::to_string(i) + ") = " + fmt4(score.value);
        if (score.best_combination)
            out += " via " + to_string(schema, *score.best_combination);
        out += "\n";
    }

    out += "\nnir-sum, per-node importance terms:\n";
    for (int i = 0; i < k; ++i) {
        out += "  cluster " + std::to_string(i) + ":";
        double sum = 0.0;
        for (int a = 0; a < schema.attribute_count(); ++a) {
            const NodesetStats* stats =
                model.nir.find({a, focus.values[static_cast<std::size_t>(a)]});
            double w = stats ? stats->importance[static_cast<std::size_t>(i)] : 0.0;
            sum += w;
            out += std::string(a > 0 ? " + " : " ") + fmt4(w);
        }
        out += "; R_nir(cluster " + std::to_string(i) + ") = " + fmt4(sum) + "\n";
    }

    out += "\nmax-sum, best combinations:\n";
    for (int i = 0; i < k; ++i) {
        ResemblanceScore score = resemblance(focus, i, model, Method::max_sum);
        out += "  R_maxsum(cluster " + std::to_string(i) + ") = " + fmt4(score.value);
        if (score.best_combination)
            out += " via " + to_string(schema, *score.best_combination);
        out += "\n";
    }

    out += "\nlabels for " + point_text(focus) + ":\n";
    std::vector<std::optional<int>> labels;
    for (Method method : kAllMethods) {
        LabelAssignment assignment = label_point(focus, model, method);
        labels.push_back(assignment.cluster);
        out += "  " + std::string(method_name(method)) + " -> " +
               (assignment.cluster ? "cluster " + std::to_string(*assignment.cluster)
                                   : "unassigned") +
               "\n";
    }
    if (labels[0] != labels[1])
        out += "nir-sum disagrees with nnir-product on " + point_text(focus) + "; ";
    else
        out += "nir-sum agrees with nnir-product on " + point_text(focus) + "; ";
    out += labels[2] == labels[1] ? "max-sum agrees with nnir-product.\n"
                                  : "max-sum disagrees with nnir-product.\n";

    out += "\nAll unlabeled points\n";
    out += "====================\n";
    for (const auto& point : clustering.unlabeled()) {
        out += "row " + std::to_string(point.row_id.value_or(-1)) + " " + point_text(point) + ":";
        bool first = true;
        for (Method method : kAllMethods) {
            LabelAssignment assignment = label_point(point, model, method);
            out += std::string(first ? " " : ", ") + std::string(method_name(method)) + " -> " +
                   (assignment.cluster ? "cluster " + std::to_string(*assignment.cluster)
                                       : "unassigned");
            first = false;
        }
        out += "\n";
    }
    return out;
}

} // namespace mardl
