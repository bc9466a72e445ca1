#include "safernet/network.hpp"

#include <cmath>
#include <string>

#include "safernet/errors.hpp"

namespace safernet {

std::size_t parent_config_rank(const std::vector<int>& parents, const Schema& schema, const Record& assignment) {
    std::size_t rank = 0;
    for (int p : parents) {
        rank = rank * schema.variable(p).cardinality() + assignment[p];
    }
    return rank;
}

std::size_t parent_config_count(const std::vector<int>& parents, const Schema& schema) {
    std::size_t q = 1;
    for (int p : parents) q *= schema.variable(p).cardinality();
    return q;
}

Cpt::Cpt(int variable, std::vector<int> parents, std::size_t parent_configs, int cardinality,
         std::vector<double> table)
    : variable_(variable),
      parents_(std::move(parents)),
      parent_configs_(parent_configs),
      cardinality_(cardinality),
      table_(std::move(table)) {
    if (cardinality_ < 2) throw SchemaMismatch("CPT cardinality must be >= 2");
    if (table_.size() != parent_configs_ * static_cast<std::size_t>(cardinality_)) {
        throw SchemaMismatch("CPT for variable " + std::to_string(variable_) + " has " +
                             std::to_string(table_.size()) + " entries, expected " +
                             std::to_string(parent_configs_ * cardinality_));
    }
    for (std::size_t j = 0; j < parent_configs_; ++j) {
        double sum = 0.0;
        for (int k = 0; k < cardinality_; ++k) {
            double v = at(j, k);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw SchemaMismatch("CPT entry out of [0,1] at row " + std::to_string(j));
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw SchemaMismatch("CPT row " + std::to_string(j) + " of variable " + std::to_string(variable_) +
                                 " sums to " + std::to_string(sum));
        }
    }
}

BayesianNetwork::BayesianNetwork(Schema schema, DagStructure structure, std::vector<Cpt> cpts)
    : schema_(std::move(schema)), structure_(std::move(structure)), cpts_(std::move(cpts)) {
    if (structure_.size() != schema_.size()) {
        throw SchemaMismatch("structure covers " + std::to_string(structure_.size()) + " variables, schema has " +
                             std::to_string(schema_.size()));
    }
    topo_order_ = validate_dag(structure_);
    if (cpts_.size() != static_cast<std::size_t>(schema_.size())) {
        throw SchemaMismatch("expected one CPT per variable");
    }
    for (int i = 0; i < schema_.size(); ++i) {
        const Cpt& c = cpts_[i];
        if (c.variable() != i || c.parents() != structure_.parents[i] ||
            c.cardinality() != schema_.variable(i).cardinality() ||
            c.parent_configs() != parent_config_count(structure_.parents[i], schema_)) {
            throw SchemaMismatch("CPT of variable " + std::to_string(i) +
                                 " inconsistent with structure or schema");
        }
    }
}

double joint_probability(const BayesianNetwork& bn, const Record& assignment) {
    const Schema& schema = bn.schema();
    if (static_cast<int>(assignment.size()) != schema.size()) {
        throw SchemaMismatch("assignment length " + std::to_string(assignment.size()) + ", schema size " +
                             std::to_string(schema.size()));
    }
    for (int i = 0; i < schema.size(); ++i) {
        if (assignment[i] >= schema.variable(i).cardinality()) {
            throw SchemaMismatch("assignment state out of range for variable '" + schema.variable(i).name + "'");
        }
    }
    double log_p = 0.0;
    for (int i = 0; i < schema.size(); ++i) {
        const Cpt& c = bn.cpt(i);
        double factor = c.at(parent_config_rank(c.parents(), schema, assignment), assignment[i]);
        if (factor == 0.0) return 0.0;
        log_p += std::log(factor);
    }
    return std::exp(log_p);
}

}  // namespace safernet
