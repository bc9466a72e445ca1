#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safernet/errors.hpp"
#include "safernet/infer.hpp"
#include "safernet/ingest.hpp"
#include "safernet/json_io.hpp"
#include "safernet/learn.hpp"
#include "safernet/route.hpp"

namespace py = pybind11;
using namespace safernet;

namespace {

Evidence evidence_from_dict(const Schema& schema, const std::map<std::string, std::string>& evidence) {
    Evidence ev;
    for (const auto& [name, label] : evidence) {
        auto var = schema.index_of(name);
        if (!var) throw UnknownState("unknown variable '" + name + "'");
        auto state = schema.variable(*var).state_index(label);
        if (!state) throw UnknownState("unknown state '" + label + "' for variable '" + name + "'");
        ev.assignments[*var] = *state;
    }
    return ev;
}

BayesianNetwork learn_from_csv(const std::string& csv_path, const std::vector<std::string>& ordering,
                               int max_parents, int prior_counts, const std::string& impute, std::uint64_t seed,
                               double split) {
    Schema schema = case_study_schema();
    ImputationPolicy policy;
    policy.seed = seed;
    if (impute == "reject") policy.mode = ImputationMode::Reject;
    else if (impute == "mode") policy.mode = ImputationMode::ColumnMode;
    else if (impute == "sample") policy.mode = ImputationMode::MarginalSample;
    else throw InvalidConfig("unknown imputation mode '" + impute + "'");

    Dataset dataset = parse_dataset(parse_csv_file(csv_path), schema, policy);
    auto [train, test] = train_test_split(dataset, split, seed);

    K2Config config;
    config.max_parents = max_parents;
    config.prior_counts = prior_counts;
    for (const auto& name : ordering) {
        auto idx = schema.index_of(name);
        if (!idx) throw InvalidConfig("ordering names unknown variable '" + name + "'");
        config.ordering.push_back(*idx);
    }
    return learn_parameters(train, k2_search(train, config));
}

py::dict route_to_dict(const Route& route) {
    py::dict d;
    d["edges"] = route.edge_ids;
    d["nodes"] = route.node_labels;
    d["p_route"] = route.safety;
    d["score"] = route.score;
    return d;
}

}  // namespace

PYBIND11_MODULE(_safernet, m) {
    m.doc() = "Bayesian-network road-safety model and safest-route engine";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<ComputeError>(m, "ComputeError", PyExc_RuntimeError);

    py::class_<BayesianNetwork>(m, "Network")
        .def_static("from_json", &network_from_json, py::arg("text"))
        .def_static("load", &load_network, py::arg("path"))
        .def("to_json", &network_to_json)
        .def("save", &save_network, py::arg("path"))
        .def("variables",
             [](const BayesianNetwork& bn) {
                 std::vector<std::string> names;
                 for (const auto& v : bn.schema().variables()) names.push_back(v.name);
                 return names;
             })
        .def("parents",
             [](const BayesianNetwork& bn, const std::string& name) {
                 auto idx = bn.schema().index_of(name);
                 if (!idx) throw UnknownState("unknown variable '" + name + "'");
                 std::vector<std::string> out;
                 for (int p : bn.structure().parents[*idx]) out.push_back(bn.schema().variable(p).name);
                 return out;
             })
        .def("marginal",
             [](const BayesianNetwork& bn, const std::string& query,
                const std::map<std::string, std::string>& evidence) {
                 auto idx = bn.schema().index_of(query);
                 if (!idx) throw UnknownState("unknown variable '" + query + "'");
                 auto marginal = eliminate_marginal(bn, *idx, evidence_from_dict(bn.schema(), evidence));
                 py::dict out;
                 const auto& spec = bn.schema().variable(*idx);
                 for (int k = 0; k < spec.cardinality(); ++k) {
                     out[py::str(spec.states[k])] = marginal.probabilities[k];
                 }
                 return out;
             },
             py::arg("query"), py::arg("evidence") = std::map<std::string, std::string>{})
        .def("collision_probability",
             [](const BayesianNetwork& bn, const std::map<std::string, std::string>& evidence) {
                 return collision_probability(bn, evidence_from_dict(bn.schema(), evidence));
             },
             py::arg("evidence") = std::map<std::string, std::string>{})
        .def("safety_probability",
             [](const BayesianNetwork& bn, const std::map<std::string, std::string>& evidence) {
                 return safety_probability(bn, evidence_from_dict(bn.schema(), evidence));
             },
             py::arg("evidence") = std::map<std::string, std::string>{});

    py::class_<RoadGraph>(m, "RoadGraph")
        .def_static("load", &load_graph, py::arg("path"))
        .def("nodes", [](const RoadGraph& g) { return g.nodes; })
        .def("edge_ids", [](const RoadGraph& g) {
            std::vector<std::string> ids;
            for (const auto& e : g.edges) ids.push_back(e.id);
            return ids;
        });

    m.def("learn", &learn_from_csv, py::arg("csv_path"), py::arg("ordering") = std::vector<std::string>{},
          py::arg("max_parents") = 3, py::arg("prior_counts") = 1, py::arg("impute") = "mode",
          py::arg("seed") = 0, py::arg("split") = 0.8,
          "Learn a network from an accident-records CSV over the case-study schema.");

    m.def("route_safety", &route_safety, py::arg("probabilities"));
    m.def("edge_weight", &edge_weight, py::arg("safety"));
    m.def("route_score", &route_score, py::arg("p_route"));

    m.def(
        "safest_route",
        [](const BayesianNetwork& bn, const RoadGraph& graph,
           const std::map<std::string, std::map<std::string, std::string>>& evidence_per_edge,
           const std::string& source, const std::string& dest) {
            std::map<std::string, Evidence> per_edge;
            for (const auto& edge : graph.edges) {
                auto it = evidence_per_edge.find(edge.id);
                per_edge[edge.id] =
                    it == evidence_per_edge.end() ? Evidence{} : evidence_from_dict(bn.schema(), it->second);
            }
            auto states = assign_safety(graph, bn, per_edge);
            return route_to_dict(safest_route(graph, states, source, dest));
        },
        py::arg("network"), py::arg("graph"), py::arg("evidence_per_edge"), py::arg("source"), py::arg("dest"),
        "Assign per-edge safety under evidence, then return the safest route.");

    m.def("case_study_variables", [] {
        Schema schema = case_study_schema();
        std::vector<std::string> names;
        for (const auto& v : schema.variables()) names.push_back(v.name);
        return names;
    });
}
