#pragma once

#include <string>

#include "safernet/infer.hpp"
#include "safernet/network.hpp"

namespace safernet {

/// Interchange format for learned networks: a JSON document with fields
/// `schema` (array of {name, states, role?}), `parents` (array of arrays)
/// and `cpts` (array of flat row-major tables).
std::string network_to_json(const BayesianNetwork& bn);
BayesianNetwork network_from_json(const std::string& text);
BayesianNetwork load_network(const std::string& path);
void save_network(const BayesianNetwork& bn, const std::string& path);

/// Evidence file: JSON map of variable name -> state label.
Evidence evidence_from_json_text(const std::string& text, const Schema& schema);
Evidence load_evidence(const std::string& path, const Schema& schema);

}  // namespace safernet
