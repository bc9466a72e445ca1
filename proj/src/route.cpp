#include "safernet/route.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include "safernet/errors.hpp"

namespace safernet {

void RoadGraph::validate() const {
    std::set<std::string> labels;
    for (const auto& n : nodes) {
        if (!labels.insert(n).second) throw ParseError("duplicate node label '" + n + "'");
    }
    std::set<std::string> ids;
    for (const auto& e : edges) {
        if (!ids.insert(e.id).second) throw ParseError("duplicate edge id '" + e.id + "'");
        if (!labels.count(e.tail)) throw UnknownNode("edge '" + e.id + "' tail '" + e.tail + "' is not a node");
        if (!labels.count(e.head)) throw UnknownNode("edge '" + e.id + "' head '" + e.head + "' is not a node");
    }
}

int RoadGraph::node_index(const std::string& label) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == label) return static_cast<int>(i);
    }
    return -1;
}

const RoadGraph::Edge* RoadGraph::find_edge(const std::string& id) const {
    for (const auto& e : edges) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

std::map<std::string, SegmentState> assign_safety(const RoadGraph& graph, const BayesianNetwork& bn,
                                                  const std::map<std::string, Evidence>& evidence_per_edge) {
    const Schema& schema = bn.schema();
    std::map<std::string, SegmentState> out;
    for (const auto& edge : graph.edges) {
        auto it = evidence_per_edge.find(edge.id);
        if (it == evidence_per_edge.end()) {
            throw UnknownEdge("no evidence entry for edge '" + edge.id + "'");
        }
        Evidence merged = it->second;
        for (const auto& [var_name, state_label] : edge.static_attrs) {
            auto var = schema.index_of(var_name);
            if (!var) {
                throw UnknownState("edge '" + edge.id + "': unknown variable '" + var_name + "'");
            }
            auto state = schema.variable(*var).state_index(state_label);
            if (!state) {
                throw UnknownState("edge '" + edge.id + "': unknown state '" + state_label + "' of '" + var_name +
                                   "'");
            }
            auto existing = merged.assignments.find(*var);
            if (existing != merged.assignments.end()) {
                if (existing->second != *state) {
                    throw ConflictingEvidence("edge '" + edge.id + "': variable '" + var_name +
                                              "' has conflicting static and dynamic values");
                }
            } else {
                merged.assignments[*var] = *state;
            }
        }
        try {
            out[edge.id] = SegmentState{edge.id, safety_probability(bn, merged)};
        } catch (const ComputeError& e) {
            throw ZeroEvidenceLikelihood("edge '" + edge.id + "': " + e.what());
        }
    }
    return out;
}

double route_safety(const std::vector<double>& probabilities) {
    double log_sum = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0 && p <= 1.0)) throw NonPositiveProbability("segment safety must be in (0, 1]");
        log_sum += std::log(p);
    }
    return std::exp(log_sum);
}

double edge_weight(double safety) {
    if (!(safety > 0.0)) throw NonPositiveProbability("segment safety must be positive");
    return -std::log(safety);
}

Route safest_route(const RoadGraph& graph, const std::map<std::string, SegmentState>& states,
                   const std::string& source, const std::string& dest) {
    graph.validate();
    const int n = static_cast<int>(graph.nodes.size());
    const int src = graph.node_index(source);
    const int dst = graph.node_index(dest);
    if (src < 0) throw UnknownNode("unknown node '" + source + "'");
    if (dst < 0) throw UnknownNode("unknown node '" + dest + "'");

    struct Label {
        double dist = std::numeric_limits<double>::infinity();
        std::vector<std::string> edge_seq;
        int prev_node = -1;
    };
    std::vector<Label> labels(n);
    labels[src].dist = 0.0;

    struct Adj {
        int head;
        double weight;
        const RoadGraph::Edge* edge;
    };
    std::vector<std::vector<Adj>> adj(n);
    for (const auto& edge : graph.edges) {
        auto it = states.find(edge.id);
        if (it == states.end()) throw UnknownEdge("no segment state for edge '" + edge.id + "'");
        const double p = it->second.safety;
        if (p <= 0.0) continue;  // zero-safety segments are excluded from routing
        adj[graph.node_index(edge.tail)].push_back({graph.node_index(edge.head), edge_weight(p), &edge});
    }
    // Deterministic relaxation order within a node.
    for (auto& a : adj) {
        std::sort(a.begin(), a.end(), [](const Adj& x, const Adj& y) { return x.edge->id < y.edge->id; });
    }

    // Preference order among equal-distance paths: fewer edges, then
    // lexicographically smaller edge-id sequence.
    auto better_tie = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    };

    using QueueEntry = std::pair<double, int>;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    queue.push({0.0, src});
    std::vector<bool> done(n, false);

    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (done[u] || d > labels[u].dist) continue;
        done[u] = true;
        for (const Adj& a : adj[u]) {
            const double nd = labels[u].dist + a.weight;
            std::vector<std::string> seq = labels[u].edge_seq;
            seq.push_back(a.edge->id);
            if (nd < labels[a.head].dist ||
                (nd == labels[a.head].dist && better_tie(seq, labels[a.head].edge_seq))) {
                labels[a.head].dist = nd;
                labels[a.head].edge_seq = std::move(seq);
                labels[a.head].prev_node = u;
                queue.push({nd, a.head});
                done[a.head] = false;
            }
        }
    }

    if (std::isinf(labels[dst].dist) && src != dst) {
        throw Unreachable("no route from '" + source + "' to '" + dest + "'");
    }

    Route route;
    route.edge_ids = labels[dst].edge_seq;
    route.node_labels.push_back(source);
    std::vector<double> probs;
    for (const auto& id : route.edge_ids) {
        const auto* e = graph.find_edge(id);
        route.node_labels.push_back(e->head);
        probs.push_back(states.at(id).safety);
    }
    route.safety = route_safety(probs);
    route.score = route_score(route.safety);
    return route;
}

double route_score(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw NonPositiveProbability("route safety must be in [0, 1]");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-p);
}

}  // namespace safernet
