#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace safernet {

/// Whether an attribute is stable over a trip (static), changes hour to
/// hour (dynamic), or is the inference target.
enum class VariableRole { Unspecified, Static, Dynamic, Target };

struct VariableSpec {
    std::string name;
    std::vector<std::string> states;
    VariableRole role = VariableRole::Unspecified;

    int cardinality() const { return static_cast<int>(states.size()); }

    /// Index of a state label, or nullopt if unknown.
    std::optional<int> state_index(const std::string& label) const;
};

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<VariableSpec> variables);

    const std::vector<VariableSpec>& variables() const { return vars_; }
    const VariableSpec& variable(int i) const { return vars_.at(i); }
    int size() const { return static_cast<int>(vars_.size()); }

    std::optional<int> index_of(const std::string& name) const;

private:
    std::vector<VariableSpec> vars_;
};

/// One observation row: a state index per schema variable, schema order.
using Record = std::vector<std::uint8_t>;

struct Dataset {
    Schema schema;
    std::vector<Record> records;

    /// Throws SchemaMismatch if any record disagrees with the schema.
    void validate() const;
};

/// The 13-variable road-safety schema of the case study, with roles
/// assigned (TR/TRL/RZ static, C the target, the rest dynamic).
Schema case_study_schema();

/// Name of the collision target variable.
inline constexpr const char* kCollisionVariable = "C";

}  // namespace safernet
