#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mardl/io.hpp"

namespace {

using namespace mardl;

// Exit codes: 0 ok, 2 bad input, 3 bad configuration.
int exit_code_for(const Error& error) {
    switch (error.code()) {
    case errc::invalid_config:
    case errc::too_few_points:
    case errc::too_many_attributes:
        return 3;
    default:
        return 2;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(errc::io_error, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(errc::io_error, "cannot open " + path + " for writing");
    out << content;
    if (!out)
        fail(errc::io_error, "failed writing " + path);
}

Method require_method(const std::string& name) {
    auto method = parse_method(name);
    if (!method)
        fail(errc::invalid_config, "unknown method: " + name);
    return *method;
}

std::vector<Method> parse_methods(const std::string& list) {
    if (list == "all")
        return {kAllMethods, kAllMethods + std::size(kAllMethods)};
    std::vector<Method> methods;
    std::stringstream stream(list);
    std::string item;
    while (std::getline(stream, item, ','))
        methods.push_back(require_method(trim(item)));
    if (methods.empty())
        fail(errc::invalid_config, "no methods given");
    return methods;
}

void check_schema_matches(const AttributeSchema& input, const AttributeSchema& model) {
    if (input.names() != model.names())
        fail(errc::invalid_point, "input columns do not match the model schema");
}

int run_cluster(const std::string& input, int k, std::uint64_t seed, const std::string& out) {
    ParsedTable table = parse_table(read_file(input));
    if (table.has_cluster_column)
        fail(errc::bad_cluster_label, "input already has a __cluster column");
    if (table.points.empty())
        fail(errc::empty_dataset, "input has no data rows");
    Clustering clustering = kmodes_cluster(table.schema, table.points, k, seed);
    std::vector<std::optional<int>> labels(table.points.size());
    for (int i = 0; i < clustering.cluster_count(); ++i)
        for (const auto& point : clustering.cluster(i))
            labels[static_cast<std::size_t>(*point.row_id)] = i;
    write_output(out, emit_table(table.schema, table.points, labels));
    return 0;
}

int run_represent(const std::string& input, std::optional<double> theta,
                  const std::string& out) {
    Clustering clustering = to_clustering(parse_table(read_file(input)));
    PruningPolicy policy =
        theta ? PruningPolicy::threshold(*theta) : PruningPolicy::none();
    write_output(out, serialize_model(build_model(clustering, policy)));
    return 0;
}

int run_label(const std::string& model_path, const std::string& input,
              const std::string& method_name, const std::string& fallback,
              const std::string& out) {
    Method method = require_method(method_name);
    if (!fallback.empty() && fallback != "largest-cluster")
        fail(errc::invalid_config, "unknown fallback: " + fallback);
    RepresentativeModel model = deserialize_model(read_file(model_path));
    ParsedTable table = parse_table(read_file(input));
    check_schema_matches(table.schema, model.schema);
    auto assignments = label_dataset(table.points, model, method);
    if (!fallback.empty())
        apply_largest_cluster_fallback(assignments, model);
    write_output(out, serialize_assignments(assignments));
    return 0;
}

int run_compare(const std::string& model_path, const std::string& input,
                const std::string& methods_list, const std::string& out) {
    std::vector<Method> methods = parse_methods(methods_list);
    RepresentativeModel model = deserialize_model(read_file(model_path));
    ParsedTable table = parse_table(read_file(input));
    check_schema_matches(table.schema, model.schema);
    write_output(out, serialize_report(compare_methods(table.points, model, methods)));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster representatives and maximal-resemblance labeling "
                 "for categorical data"};
    app.require_subcommand(1);

    std::string input, model_path, out, method = "nnir-product", methods = "all", fallback;
    int k = 3;
    std::uint64_t seed = 0;
    double theta = 0.0;

    auto* cluster = app.add_subcommand("cluster", "k-modes cluster a CSV dataset");
    cluster->add_option("--input", input, "input CSV")->required();
    cluster->add_option("--k", k, "number of clusters");
    cluster->add_option("--seed", seed, "random seed");
    cluster->add_option("--out", out, "output CSV (stdout when omitted)");

    auto* represent = app.add_subcommand(
        "represent", "build the representative model of a clustered CSV");
    represent->add_option("--input", input, "clustered CSV with a __cluster column")
        ->required();
    auto* theta_option =
        represent->add_option("--prune-theta", theta, "importance threshold for pruning");
    represent->add_option("--out", out, "output model JSON (stdout when omitted)");

    auto* label = app.add_subcommand("label", "label points by maximal resemblance");
    label->add_option("--model", model_path, "model JSON")->required();
    label->add_option("--input", input, "CSV of points to label")->required();
    label->add_option("--method", method, "nir-sum, nnir-product or max-sum");
    label->add_option("--fallback", fallback, "largest-cluster to force-assign score-0 points");
    label->add_option("--out", out, "output assignments CSV (stdout when omitted)");

    auto* compare = app.add_subcommand("compare", "label under several methods and compare");
    compare->add_option("--model", model_path, "model JSON")->required();
    compare->add_option("--input", input, "CSV of points to label")->required();
    compare->add_option("--methods", methods, "comma-separated list or 'all'");
    compare->add_option("--out", out, "output report JSON (stdout when omitted)");

    auto* demo = app.add_subcommand("demo", "walk through the bundled example dataset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        return 3;
    }

    try {
        if (cluster->parsed())
            return run_cluster(input, k, seed, out);
        if (represent->parsed())
            return run_represent(
                input, theta_option->count() ? std::optional<double>(theta) : std::nullopt,
                out);
        if (label->parsed())
            return run_label(model_path, input, method, fallback, out);
        if (compare->parsed())
            return run_compare(model_path, input, methods, out);
        if (demo->parsed()) {
            std::cout << demo_report();
            return 0;
        }
    } catch (const Error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return exit_code_for(error);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
