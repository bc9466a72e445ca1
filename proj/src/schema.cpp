#include "safernet/schema.hpp"

#include <unordered_set>

#include "safernet/errors.hpp"

namespace safernet {

std::optional<int> VariableSpec::state_index(const std::string& label) const {
    for (int k = 0; k < cardinality(); ++k) {
        if (states[k] == label) return k;
    }
    return std::nullopt;
}

Schema::Schema(std::vector<VariableSpec> variables) : vars_(std::move(variables)) {
    std::unordered_set<std::string> names;
    for (const auto& v : vars_) {
        if (v.cardinality() < 2) {
            throw SchemaMismatch("variable '" + v.name + "' needs at least 2 states");
        }
        if (!names.insert(v.name).second) {
            throw SchemaMismatch("duplicate variable name '" + v.name + "'");
        }
        std::unordered_set<std::string> labels;
        for (const auto& s : v.states) {
            if (!labels.insert(s).second) {
                throw SchemaMismatch("duplicate state label '" + s + "' in variable '" + v.name + "'");
            }
        }
    }
}

std::optional<int> Schema::index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i) {
        if (vars_[i].name == name) return i;
    }
    return std::nullopt;
}

void Dataset::validate() const {
    const int n = schema.size();
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (static_cast<int>(rec.size()) != n) {
            throw SchemaMismatch("record " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                                 " values, schema has " + std::to_string(n));
        }
        for (int i = 0; i < n; ++i) {
            if (rec[i] >= schema.variable(i).cardinality()) {
                throw SchemaMismatch("record " + std::to_string(r) + ": state " + std::to_string(rec[i]) +
                                     " out of range for variable '" + schema.variable(i).name + "'");
            }
        }
    }
}

Schema case_study_schema() {
    using R = VariableRole;
    return Schema{{
        {"TR", {"highway", "district_or_province_road"}, R::Static},
        {"TRL", {"one_lane", "separated_lanes"}, R::Static},
        {"RF",
         {"bad_surface", "faulty_signals", "faulty_lighting", "road_works", "queue", "downhill", "curve",
          "bad_visibility"},
         R::Dynamic},
        {"WC", {"normal", "rain", "fog", "wind", "snow", "hail", "other"}, R::Dynamic},
        {"RC", {"dry", "wet", "snow", "clean", "dirty"}, R::Dynamic},
        {"LC", {"daylight", "twilight", "public_lighting", "night"}, R::Dynamic},
        {"W", {"week", "weekend"}, R::Dynamic},
        {"PD", {"morning_rush", "morning", "noon", "evening_rush", "evening", "night"}, R::Dynamic},
        {"C", {"none", "collision"}, R::Target},
        {"V", {"low", "normal", "high"}, R::Dynamic},
        {"VD", {"low", "high"}, R::Dynamic},
        {"LCB", {"not_frequent", "frequent"}, R::Dynamic},
        {"RZ", {"none", "commercial", "residential"}, R::Static},
    }};
}

}  // namespace safernet
