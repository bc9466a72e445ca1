#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "safernet/errors.hpp"
#include "safernet/infer.hpp"
#include "safernet/ingest.hpp"
#include "safernet/json_io.hpp"
#include "safernet/learn.hpp"
#include "safernet/network.hpp"
#include "safernet/route.hpp"

namespace {

using nlohmann::json;
using namespace safernet;

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

void emit(const std::optional<std::string>& out_path, const json& j) {
    std::string text = j.dump(2) + "\n";
    if (out_path) {
        write_text(*out_path, text);
    } else {
        std::cout << text;
    }
}

json score_json(double score) {
    if (std::isinf(score)) return "inf";
    return score;
}

// One manifest per command run, written beside the primary output.
struct ManifestWriter {
    json manifest;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit ManifestWriter(const std::string& command) {
        manifest["command"] = command;
        manifest["tool_version"] = kVersion;
        manifest["inputs"] = json::object();
        manifest["config"] = json::object();
    }

    void input(const std::string& name, const std::string& path) {
        manifest["inputs"][name] = {{"path", path}, {"fnv1a64", fnv1a_hex(read_file(path))}};
    }

    void write(const std::string& path) {
        manifest["duration_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_text(path, manifest.dump(2) + "\n");
    }
};

std::string manifest_path_for(const std::optional<std::string>& explicit_path,
                              const std::optional<std::string>& out_path, const std::string& command) {
    if (explicit_path) return *explicit_path;
    if (out_path) return *out_path + ".manifest.json";
    return "safernet_" + command + ".manifest.json";
}

ImputationMode impute_mode(const std::string& name) {
    if (name == "reject") return ImputationMode::Reject;
    if (name == "mode") return ImputationMode::ColumnMode;
    if (name == "sample") return ImputationMode::MarginalSample;
    throw InvalidConfig("unknown imputation mode '" + name + "' (expected reject|mode|sample)");
}

std::vector<int> ordering_from_names(const std::string& csv, const Schema& schema) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string name;
    while (std::getline(ss, name, ',')) {
        auto idx = schema.index_of(name);
        if (!idx) throw InvalidConfig("ordering names unknown variable '" + name + "'");
        out.push_back(*idx);
    }
    return out;
}

// Evidence for one edge at one point in time: snapshot evidence merged
// with W/PD derived from the timestamp when the snapshot leaves them out.
Evidence edge_evidence(const Schema& schema, const std::map<std::string, Evidence>& per_edge,
                       const std::string& edge_id, std::optional<std::int64_t> when) {
    Evidence ev;
    auto it = per_edge.find(edge_id);
    if (it != per_edge.end()) ev = it->second;
    if (when) {
        if (auto w = schema.index_of("W"); w && !ev.contains(*w)) {
            ev.assignments[*w] = week_state_from_time(*when);
        }
        if (auto pd = schema.index_of("PD"); pd && !ev.contains(*pd)) {
            ev.assignments[*pd] = part_of_day_from_time(*when);
        }
    }
    return ev;
}

json route_json(const Route& route) {
    json j;
    j["edges"] = route.edge_ids;
    j["nodes"] = route.node_labels;
    j["p_route"] = route.safety;
    j["score"] = score_json(route.score);
    return j;
}

Route route_for_snapshot(const BayesianNetwork& bn, const RoadGraph& graph, const Snapshot& snapshot,
                         const std::string& from, const std::string& to) {
    std::map<std::string, Evidence> per_edge;
    for (const auto& edge : graph.edges) {
        per_edge[edge.id] = edge_evidence(bn.schema(), snapshot.evidence_per_edge, edge.id,
                                          snapshot.timestamp.empty()
                                              ? std::optional<std::int64_t>{}
                                              : std::optional<std::int64_t>{snapshot.epoch_seconds});
    }
    auto states = assign_safety(graph, bn, per_edge);
    if (from == to) {
        Route degenerate;
        if (graph.node_index(from) < 0) throw UnknownNode("unknown node '" + from + "'");
        degenerate.node_labels = {from};
        degenerate.safety = 1.0;
        degenerate.score = route_score(1.0);
        return degenerate;
    }
    return safest_route(graph, states, from, to);
}

int cmd_learn(const std::string& data_path, const std::optional<std::string>& out_path,
              const std::optional<std::string>& manifest_path, const std::string& ordering_csv, int max_parents,
              int prior_counts, const std::string& impute, std::uint64_t seed, double split_fraction) {
    ManifestWriter manifest("learn");
    manifest.input("data", data_path);

    Schema schema = case_study_schema();
    RawTable table = parse_csv_file(data_path);

    ImputationPolicy policy;
    policy.mode = impute_mode(impute);
    policy.seed = seed;
    ParseReport report;
    Dataset dataset = parse_dataset(table, schema, policy, &report);

    json report_json;
    report_json["imputed_per_column"] = report.imputed_per_column;
    report_json["total_imputed"] = report.total_imputed;
    report_json["records"] = dataset.records.size();
    std::cerr << report_json.dump() << "\n";

    auto [train, test] = train_test_split(dataset, split_fraction, seed);

    K2Config config;
    config.max_parents = max_parents;
    config.prior_counts = prior_counts;
    if (!ordering_csv.empty()) config.ordering = ordering_from_names(ordering_csv, schema);
    DagStructure structure = k2_search(train, config);
    BayesianNetwork bn = learn_parameters(train, structure);

    std::string text = network_to_json(bn);
    if (out_path) {
        write_text(*out_path, text);
    } else {
        std::cout << text;
    }

    std::vector<double> node_scores;
    for (int i = 0; i < schema.size(); ++i) {
        node_scores.push_back(k2_log_score(count_stats(train, i, structure.parents[i]), prior_counts));
    }
    json ordering_names = json::array();
    if (config.ordering.empty()) {
        for (const auto& v : schema.variables()) ordering_names.push_back(v.name);
    } else {
        for (int i : config.ordering) ordering_names.push_back(schema.variable(i).name);
    }
    manifest.manifest["config"] = {{"ordering", ordering_names},
                                   {"max_parents", max_parents},
                                   {"prior_counts", prior_counts},
                                   {"impute", impute},
                                   {"seed", seed},
                                   {"split", split_fraction}};
    manifest.manifest["dataset_hash"] = fnv1a_hex(read_file(data_path));
    manifest.manifest["train_records"] = train.records.size();
    manifest.manifest["test_records"] = test.records.size();
    manifest.manifest["node_log_scores"] = node_scores;
    manifest.write(manifest_path_for(manifest_path, out_path, "learn"));
    return 0;
}

int cmd_infer(const std::string& network_path, const std::string& evidence_path,
              const std::optional<std::string>& out_path, const std::optional<std::string>& manifest_path) {
    ManifestWriter manifest("infer");
    manifest.input("network", network_path);
    manifest.input("evidence", evidence_path);

    BayesianNetwork bn = load_network(network_path);
    Evidence ev = load_evidence(evidence_path, bn.schema());
    double pc = collision_probability(bn, ev);
    json out;
    out["p_collision"] = pc;
    out["p_safety"] = 1.0 - pc;
    emit(out_path, out);
    manifest.write(manifest_path_for(manifest_path, out_path, "infer"));
    return 0;
}

int cmd_route(const std::string& network_path, const std::string& graph_path,
              const std::optional<std::string>& snapshot_path, const std::string& from, const std::string& to,
              const std::optional<std::string>& out_path, const std::optional<std::string>& manifest_path) {
    ManifestWriter manifest("route");
    manifest.input("network", network_path);
    manifest.input("graph", graph_path);

    BayesianNetwork bn = load_network(network_path);
    RoadGraph graph = load_graph(graph_path);

    Snapshot snapshot;
    if (snapshot_path) {
        manifest.input("snapshot", *snapshot_path);
        SnapshotSeries series = load_snapshots(*snapshot_path, graph, bn.schema());
        if (series.snapshots.size() != 1) {
            throw InvalidConfig("route expects exactly one snapshot; use replay for a series");
        }
        snapshot = series.snapshots.front();
    }

    Route route = route_for_snapshot(bn, graph, snapshot, from, to);
    emit(out_path, route_json(route));
    manifest.manifest["config"] = {{"from", from}, {"to", to}};
    manifest.write(manifest_path_for(manifest_path, out_path, "route"));
    return 0;
}

int cmd_replay(const std::string& network_path, const std::string& graph_path, const std::string& snapshots_path,
               const std::string& from, const std::string& to, const std::optional<std::string>& out_path,
               const std::optional<std::string>& plot_csv_path, const std::optional<std::string>& manifest_path) {
    ManifestWriter manifest("replay");
    manifest.input("network", network_path);
    manifest.input("graph", graph_path);
    manifest.input("snapshots", snapshots_path);

    BayesianNetwork bn = load_network(network_path);
    RoadGraph graph = load_graph(graph_path);
    SnapshotSeries series = load_snapshots(snapshots_path, graph, bn.schema());

    json entries = json::array();
    std::string best_time;
    double best_score = -1.0;
    std::vector<std::string> prev_edges;
    double prev_score = 0.0;
    bool have_prev = false;
    std::ostringstream plot_csv;
    plot_csv << "time,score\n";

    for (const Snapshot& snapshot : series.snapshots) {
        Route route = route_for_snapshot(bn, graph, snapshot, from, to);
        json entry;
        entry["time"] = snapshot.timestamp;
        entry["nodes"] = route.node_labels;
        entry["edges"] = route.edge_ids;
        entry["p_route"] = route.safety;
        entry["score"] = score_json(route.score);
        entry["route_changed"] = have_prev && route.edge_ids != prev_edges;
        entry["score_changed"] =
            have_prev && route.edge_ids == prev_edges && route.score != prev_score;
        entries.push_back(std::move(entry));
        plot_csv << snapshot.timestamp << "," << route.score << "\n";
        if (route.score > best_score) {
            best_score = route.score;
            best_time = snapshot.timestamp;
        }
        prev_edges = route.edge_ids;
        prev_score = route.score;
        have_prev = true;
    }

    json report;
    report["entries"] = std::move(entries);
    if (!best_time.empty()) report["argmax_score_time"] = best_time;
    emit(out_path, report);
    if (plot_csv_path) write_text(*plot_csv_path, plot_csv.str());

    manifest.manifest["config"] = {{"from", from}, {"to", to}};
    manifest.write(manifest_path_for(manifest_path, out_path, "replay"));
    return 0;
}

int cmd_validate(const std::optional<std::string>& network_path, const std::optional<std::string>& graph_path,
                 const std::optional<std::string>& data_path, const std::optional<std::string>& snapshots_path) {
    std::optional<BayesianNetwork> bn;
    if (network_path) {
        bn = load_network(*network_path);
        std::cerr << "network ok: " << bn->schema().size() << " variables\n";
    }
    std::optional<RoadGraph> graph;
    if (graph_path) {
        graph = load_graph(*graph_path);
        std::cerr << "graph ok: " << graph->nodes.size() << " nodes, " << graph->edges.size() << " edges\n";
    }
    if (data_path) {
        ImputationPolicy reject_policy;
        reject_policy.mode = ImputationMode::Reject;
        Dataset d = parse_dataset(parse_csv_file(*data_path), bn ? bn->schema() : case_study_schema(),
                                  reject_policy);
        std::cerr << "data ok: " << d.records.size() << " records\n";
    }
    if (snapshots_path) {
        if (!graph) throw InvalidConfig("--snapshots validation needs --graph");
        SnapshotSeries s = load_snapshots(*snapshots_path, *graph, bn ? bn->schema() : case_study_schema());
        std::cerr << "snapshots ok: " << s.snapshots.size() << " entries\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"safernet: collision-aware route planning over a learned Bayesian network"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string data_path, network_path, graph_path, snapshots_path, evidence_path;
    std::string from, to;
    std::string ordering_csv;
    std::string impute = "mode";
    int max_parents = 3;
    int prior_counts = 1;
    std::uint64_t seed = 0;
    double split_fraction = 0.8;
    std::optional<std::string> out_path, manifest_path, plot_csv_path;
    std::optional<std::string> v_network, v_graph, v_data, v_snapshots;

    auto* learn = app.add_subcommand("learn", "learn structure and parameters from accident records");
    learn->add_option("--data", data_path, "accident records CSV")->required();
    learn->add_option("--out", out_path, "network JSON output (default stdout)");
    learn->add_option("--ordering", ordering_csv, "comma-separated variable ordering");
    learn->add_option("--max-parents", max_parents, "parent cap per node");
    learn->add_option("--prior-counts", prior_counts, "scoring prior pseudo-count per cell");
    learn->add_option("--impute", impute, "missing-value policy: reject|mode|sample");
    learn->add_option("--seed", seed, "seed for split and sampling imputation");
    learn->add_option("--split", split_fraction, "training fraction");
    learn->add_option("--manifest", manifest_path, "manifest output path");

    auto* infer = app.add_subcommand("infer", "collision/safety probability under evidence");
    infer->add_option("--network", network_path, "network JSON")->required();
    infer->add_option("--evidence", evidence_path, "evidence JSON (name -> state label)")->required();
    infer->add_option("--out", out_path, "output path (default stdout)");
    infer->add_option("--manifest", manifest_path, "manifest output path");

    auto* route = app.add_subcommand("route", "safest route for one snapshot");
    route->add_option("--network", network_path)->required();
    route->add_option("--graph", graph_path)->required();
    route->add_option("--snapshot", snapshots_path, "single-snapshot JSON (optional)");
    route->add_option("--from", from)->required();
    route->add_option("--to", to)->required();
    route->add_option("--out", out_path, "output path (default stdout)");
    route->add_option("--manifest", manifest_path, "manifest output path");

    auto* replay = app.add_subcommand("replay", "safest route per snapshot of a series");
    replay->add_option("--network", network_path)->required();
    replay->add_option("--graph", graph_path)->required();
    replay->add_option("--snapshots", snapshots_path)->required();
    replay->add_option("--from", from)->required();
    replay->add_option("--to", to)->required();
    replay->add_option("--out", out_path, "report path (default stdout)");
    replay->add_option("--plot-csv", plot_csv_path, "per-snapshot (time, score) CSV");
    replay->add_option("--manifest", manifest_path, "manifest output path");

    auto* validate = app.add_subcommand("validate", "lint input files");
    validate->add_option("--network", v_network);
    validate->add_option("--graph", v_graph);
    validate->add_option("--data", v_data);
    validate->add_option("--snapshots", v_snapshots);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (learn->parsed()) {
            return cmd_learn(data_path, out_path, manifest_path, ordering_csv, max_parents, prior_counts, impute,
                             seed, split_fraction);
        }
        if (infer->parsed()) {
            return cmd_infer(network_path, evidence_path, out_path, manifest_path);
        }
        if (route->parsed()) {
            return cmd_route(network_path, graph_path,
                             snapshots_path.empty() ? std::optional<std::string>{} : snapshots_path, from, to,
                             out_path, manifest_path);
        }
        if (replay->parsed()) {
            return cmd_replay(network_path, graph_path, snapshots_path, from, to, out_path, plot_csv_path,
                              manifest_path);
        }
        if (validate->parsed()) {
            return cmd_validate(v_network, v_graph, v_data, v_snapshots);
        }
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
