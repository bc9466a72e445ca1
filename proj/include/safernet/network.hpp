#pragma once

#include <cstddef>
#include <vector>

#include "safernet/dag.hpp"
#include "safernet/schema.hpp"

namespace safernet {

/// Mixed-radix rank of a parent configuration. Parents are taken in
/// ascending variable-index order with the lowest-index parent most
/// significant: rank = ((s_1 * r_2 + s_2) * r_3 + s_3) ...
/// This convention is shared by CPT rows, sufficient-statistics rows and
/// the serialized network format.
std::size_t parent_config_rank(const std::vector<int>& parents, const Schema& schema, const Record& assignment);

/// Product of parent cardinalities; 1 for a parentless variable.
std::size_t parent_config_count(const std::vector<int>& parents, const Schema& schema);

/// Conditional probability table for one variable: parent_configs rows
/// of cardinality columns, stored row-major.
class Cpt {
public:
    /// Validates shape, entry range and row normalization (each row must
    /// sum to 1 within 1e-12; out-of-tolerance input is rejected, never
    /// renormalized).
    Cpt(int variable, std::vector<int> parents, std::size_t parent_configs, int cardinality,
        std::vector<double> table);

    int variable() const { return variable_; }
    const std::vector<int>& parents() const { return parents_; }
    std::size_t parent_configs() const { return parent_configs_; }
    int cardinality() const { return cardinality_; }
    const std::vector<double>& table() const { return table_; }

    double at(std::size_t row, int state) const { return table_[row * cardinality_ + state]; }

    static constexpr double kRowSumTolerance = 1e-12;

private:
    int variable_;
    std::vector<int> parents_;
    std::size_t parent_configs_;
    int cardinality_;
    std::vector<double> table_;
};

class BayesianNetwork {
public:
    /// Validates CPT dimensions against schema and structure, and the
    /// structure's acyclicity.
    BayesianNetwork(Schema schema, DagStructure structure, std::vector<Cpt> cpts);

    const Schema& schema() const { return schema_; }
    const DagStructure& structure() const { return structure_; }
    const std::vector<Cpt>& cpts() const { return cpts_; }
    const Cpt& cpt(int variable) const { return cpts_.at(variable); }
    const std::vector<int>& topological_order() const { return topo_order_; }

private:
    Schema schema_;
    DagStructure structure_;
    std::vector<Cpt> cpts_;
    std::vector<int> topo_order_;
};

/// P(X = assignment) as the product of CPT factors, accumulated in log
/// domain. Returns 0 if any factor is 0. Throws SchemaMismatch on a
/// malformed assignment.
double joint_probability(const BayesianNetwork& bn, const Record& assignment);

}  // namespace safernet
