#pragma once

#include <map>
#include <string>
#include <vector>

#include "safernet/infer.hpp"
#include "safernet/network.hpp"

namespace safernet {

/// Directed road network. An undirected road is represented as two
/// directed edges sharing static attributes.
struct RoadGraph {
    struct Edge {
        std::string id;
        std::string tail;
        std::string head;
        /// Static attributes, variable name -> state label.
        std::map<std::string, std::string> static_attrs;
    };

    std::vector<std::string> nodes;
    std::vector<Edge> edges;

    /// Throws on duplicate node labels, duplicate edge ids, or endpoints
    /// that are not nodes.
    void validate() const;

    int node_index(const std::string& label) const;  // -1 if unknown
    const Edge* find_edge(const std::string& id) const;
};

/// Per-segment safety probability, the p_i attached to each routed edge.
struct SegmentState {
    std::string edge_id;
    double safety = 1.0;  // in (0, 1]
};

struct Route {
    std::vector<std::string> edge_ids;
    std::vector<std::string> node_labels;  // tail of first edge .. head of last
    double safety = 1.0;                   // product of segment safeties
    double score = 0.0;                    // -ln(1 - safety); +inf when safety == 1
};

/// Infers a SegmentState for every edge: the edge's static attributes
/// merged with its dynamic evidence feed the collision query. A variable
/// supplied by both sources with different values is ConflictingEvidence.
/// Every edge must have an entry in evidence_per_edge (possibly empty).
std::map<std::string, SegmentState> assign_safety(const RoadGraph& graph, const BayesianNetwork& bn,
                                                  const std::map<std::string, Evidence>& evidence_per_edge);

/// Product of segment safety probabilities, accumulated as exp(sum of logs).
double route_safety(const std::vector<double>& probabilities);

/// Shortest-path weight of a segment: -ln(p). Throws NonPositiveProbability
/// for p <= 0.
double edge_weight(double safety);

/// Dijkstra over -ln(p) weights; maximizes route safety. Ties between
/// equal-distance paths prefer fewer edges, then the lexicographically
/// smaller edge-id sequence. Throws UnknownNode / Unreachable.
Route safest_route(const RoadGraph& graph, const std::map<std::string, SegmentState>& states,
                   const std::string& source, const std::string& dest);

/// Safest-route score -ln(1 - p); +infinity at p = 1 (rendered "inf" at
/// file boundaries).
double route_score(double route_safety_probability);

}  // namespace safernet
