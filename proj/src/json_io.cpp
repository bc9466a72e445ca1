#include "safernet/json_io.hpp"

#include <fstream>

#include <json.hpp>

#include "safernet/errors.hpp"

namespace safernet {

namespace {

using nlohmann::json;

const char* role_name(VariableRole role) {
    switch (role) {
        case VariableRole::Static: return "static";
        case VariableRole::Dynamic: return "dynamic";
        case VariableRole::Target: return "target";
        default: return "";
    }
}

VariableRole role_from_name(const std::string& name) {
    if (name == "static") return VariableRole::Static;
    if (name == "dynamic") return VariableRole::Dynamic;
    if (name == "target") return VariableRole::Target;
    if (name.empty()) return VariableRole::Unspecified;
    throw ParseError("unknown variable role '" + name + "'");
}

}  // namespace

std::string network_to_json(const BayesianNetwork& bn) {
    json j;
    j["schema"] = json::array();
    for (const auto& var : bn.schema().variables()) {
        json v;
        v["name"] = var.name;
        v["states"] = var.states;
        if (var.role != VariableRole::Unspecified) v["role"] = role_name(var.role);
        j["schema"].push_back(std::move(v));
    }
    j["parents"] = bn.structure().parents;
    j["cpts"] = json::array();
    for (const auto& cpt : bn.cpts()) {
        j["cpts"].push_back(cpt.table());
    }
    return j.dump(2) + "\n";
}

BayesianNetwork network_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
    try {
        std::vector<VariableSpec> vars;
        for (const auto& v : j.at("schema")) {
            VariableSpec spec;
            spec.name = v.at("name").get<std::string>();
            spec.states = v.at("states").get<std::vector<std::string>>();
            if (v.contains("role")) spec.role = role_from_name(v["role"].get<std::string>());
            vars.push_back(std::move(spec));
        }
        Schema schema(std::move(vars));

        DagStructure structure;
        structure.parents = j.at("parents").get<std::vector<std::vector<int>>>();

        std::vector<Cpt> cpts;
        const auto& tables = j.at("cpts");
        if (tables.size() != static_cast<std::size_t>(schema.size())) {
            throw SchemaMismatch("expected one CPT table per variable");
        }
        for (int i = 0; i < schema.size(); ++i) {
            cpts.emplace_back(i, structure.parents.at(i), parent_config_count(structure.parents.at(i), schema),
                              schema.variable(i).cardinality(), tables[i].get<std::vector<double>>());
        }
        return BayesianNetwork(std::move(schema), std::move(structure), std::move(cpts));
    } catch (const json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
}

BayesianNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return network_from_json(text);
}

void save_network(const BayesianNetwork& bn, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << network_to_json(bn);
}

Evidence evidence_from_json_text(const std::string& text, const Schema& schema) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("evidence JSON: ") + e.what());
    }
    Evidence ev;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto var = schema.index_of(it.key());
        if (!var) throw UnknownState("evidence: unknown variable '" + it.key() + "'");
        const VariableSpec& spec = schema.variable(*var);
        std::string label = it.value().get<std::string>();
        auto state = spec.state_index(label);
        if (!state) {
            throw UnknownState("evidence: unknown state '" + label + "' for variable '" + spec.name + "'");
        }
        ev.assignments[*var] = *state;
    }
    return ev;
}

Evidence load_evidence(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return evidence_from_json_text(text, schema);
}

}  // namespace safernet
