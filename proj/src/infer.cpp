#include "safernet/infer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "safernet/errors.hpp"

namespace safernet {

void Evidence::validate(const Schema& schema) const {
    for (auto [var, state] : assignments) {
        if (var < 0 || var >= schema.size()) {
            throw SchemaMismatch("evidence variable index " + std::to_string(var) + " out of range");
        }
        if (state < 0 || state >= schema.variable(var).cardinality()) {
            throw SchemaMismatch("evidence state " + std::to_string(state) + " out of range for variable '" +
                                 schema.variable(var).name + "'");
        }
    }
}

MarginalDistribution enumerate_marginal(const BayesianNetwork& bn, int query, const Evidence& evidence,
                                        std::size_t enumeration_cap) {
    const Schema& schema = bn.schema();
    evidence.validate(schema);
    if (query < 0 || query >= schema.size()) throw SchemaMismatch("query variable out of range");
    if (evidence.contains(query)) throw SchemaMismatch("query variable appears in evidence");

    std::vector<int> free_vars;
    std::size_t space = 1;
    for (int i = 0; i < schema.size(); ++i) {
        if (!evidence.contains(i)) {
            free_vars.push_back(i);
            space *= schema.variable(i).cardinality();
            if (space > enumeration_cap) {
                throw StateSpaceTooLarge("enumeration space exceeds cap of " + std::to_string(enumeration_cap));
            }
        }
    }

    Record assignment(schema.size(), 0);
    for (auto [var, state] : evidence.assignments) assignment[var] = static_cast<std::uint8_t>(state);

    MarginalDistribution out;
    out.variable = query;
    out.probabilities.assign(schema.variable(query).cardinality(), 0.0);

    // Odometer over the unobserved variables.
    for (std::size_t it = 0; it < space; ++it) {
        out.probabilities[assignment[query]] += joint_probability(bn, assignment);
        for (std::size_t d = free_vars.size(); d-- > 0;) {
            int v = free_vars[d];
            if (++assignment[v] < schema.variable(v).cardinality()) break;
            assignment[v] = 0;
        }
    }

    double total = 0.0;
    for (double p : out.probabilities) total += p;
    if (total <= 0.0) throw ZeroEvidenceLikelihood("evidence has probability 0 under the network");
    for (double& p : out.probabilities) p /= total;
    return out;
}

namespace {

// Factor over a sorted list of variables; values indexed mixed-radix with
// the lowest-index variable most significant (same convention as CPT rows).
struct Factor {
    std::vector<int> vars;
    std::vector<double> values;
};

std::size_t factor_size(const std::vector<int>& vars, const Schema& schema) {
    std::size_t s = 1;
    for (int v : vars) s *= schema.variable(v).cardinality();
    return s;
}

std::size_t rank_of(const std::vector<int>& vars, const Schema& schema, const std::vector<int>& states) {
    std::size_t rank = 0;
    for (int v : vars) rank = rank * schema.variable(v).cardinality() + states[v];
    return rank;
}

// CPT factor restricted by evidence: observed variables are dropped from
// the scope and the table sliced accordingly.
Factor restricted_cpt_factor(const BayesianNetwork& bn, int variable, const Evidence& evidence) {
    const Schema& schema = bn.schema();
    const Cpt& cpt = bn.cpt(variable);

    std::vector<int> scope = cpt.parents();
    scope.insert(std::upper_bound(scope.begin(), scope.end(), variable), variable);

    Factor f;
    for (int v : scope) {
        if (!evidence.contains(v)) f.vars.push_back(v);
    }
    f.values.assign(factor_size(f.vars, schema), 0.0);

    std::vector<int> states(schema.size(), 0);
    for (auto [v, s] : evidence.assignments) states[v] = s;

    // Enumerate the free part of the scope.
    std::vector<int> free_scope = f.vars;
    std::size_t n_free = f.values.size();
    for (int v : free_scope) states[v] = 0;
    for (std::size_t it = 0; it < n_free; ++it) {
        Record rec(schema.size(), 0);
        for (int v : scope) rec[v] = static_cast<std::uint8_t>(states[v]);
        std::size_t row = parent_config_rank(cpt.parents(), schema, rec);
        f.values[rank_of(f.vars, schema, states)] = cpt.at(row, states[variable]);
        for (std::size_t d = free_scope.size(); d-- > 0;) {
            int v = free_scope[d];
            if (++states[v] < schema.variable(v).cardinality()) break;
            states[v] = 0;
        }
    }
    return f;
}

Factor multiply(const Factor& a, const Factor& b, const Schema& schema) {
    Factor out;
    std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
    out.values.assign(factor_size(out.vars, schema), 0.0);

    std::vector<int> states(schema.size(), 0);
    for (std::size_t it = 0; it < out.values.size(); ++it) {
        out.values[it] = a.values[rank_of(a.vars, schema, states)] * b.values[rank_of(b.vars, schema, states)];
        for (std::size_t d = out.vars.size(); d-- > 0;) {
            int v = out.vars[d];
            if (++states[v] < schema.variable(v).cardinality()) break;
            states[v] = 0;
        }
    }
    return out;
}

Factor sum_out(const Factor& f, int variable, const Schema& schema) {
    Factor out;
    for (int v : f.vars) {
        if (v != variable) out.vars.push_back(v);
    }
    out.values.assign(factor_size(out.vars, schema), 0.0);

    std::vector<int> states(schema.size(), 0);
    for (std::size_t it = 0; it < f.values.size(); ++it) {
        out.values[rank_of(out.vars, schema, states)] += f.values[it];
        for (std::size_t d = f.vars.size(); d-- > 0;) {
            int v = f.vars[d];
            if (++states[v] < schema.variable(v).cardinality()) break;
            states[v] = 0;
        }
    }
    return out;
}

}  // namespace

MarginalDistribution eliminate_marginal(const BayesianNetwork& bn, int query, const Evidence& evidence) {
    const Schema& schema = bn.schema();
    evidence.validate(schema);
    if (query < 0 || query >= schema.size()) throw SchemaMismatch("query variable out of range");
    if (evidence.contains(query)) throw SchemaMismatch("query variable appears in evidence");

    std::vector<Factor> factors;
    for (int i = 0; i < schema.size(); ++i) {
        factors.push_back(restricted_cpt_factor(bn, i, evidence));
    }

    std::vector<int> to_eliminate;
    for (int i = 0; i < schema.size(); ++i) {
        if (i != query && !evidence.contains(i)) to_eliminate.push_back(i);
    }

    while (!to_eliminate.empty()) {
        // Min-degree: eliminate the variable whose combined factor has the
        // smallest scope; ties by lowest variable index.
        int best_var = -1;
        std::size_t best_degree = 0;
        for (int v : to_eliminate) {
            std::set<int> scope;
            for (const Factor& f : factors) {
                if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end()) {
                    scope.insert(f.vars.begin(), f.vars.end());
                }
            }
            if (best_var < 0 || scope.size() < best_degree) {
                best_var = v;
                best_degree = scope.size();
            }
        }

        std::vector<Factor> touching;
        std::vector<Factor> rest;
        for (Factor& f : factors) {
            if (std::find(f.vars.begin(), f.vars.end(), best_var) != f.vars.end()) {
                touching.push_back(std::move(f));
            } else {
                rest.push_back(std::move(f));
            }
        }
        Factor product = std::move(touching.front());
        for (std::size_t i = 1; i < touching.size(); ++i) {
            product = multiply(product, touching[i], schema);
        }
        rest.push_back(sum_out(product, best_var, schema));
        factors = std::move(rest);
        to_eliminate.erase(std::find(to_eliminate.begin(), to_eliminate.end(), best_var));
    }

    Factor result{{}, {1.0}};
    for (const Factor& f : factors) result = multiply(result, f, schema);

    MarginalDistribution out;
    out.variable = query;
    out.probabilities.assign(schema.variable(query).cardinality(), 0.0);
    std::vector<int> states(schema.size(), 0);
    double total = 0.0;
    for (int k = 0; k < schema.variable(query).cardinality(); ++k) {
        states[query] = k;
        out.probabilities[k] = result.values[rank_of(result.vars, schema, states)];
        total += out.probabilities[k];
    }
    if (total <= 0.0) throw ZeroEvidenceLikelihood("evidence has probability 0 under the network");
    for (double& p : out.probabilities) p /= total;
    return out;
}

double collision_probability(const BayesianNetwork& bn, const Evidence& evidence) {
    auto c = bn.schema().index_of(kCollisionVariable);
    if (!c) throw MissingCollisionVariable("schema has no collision variable 'C'");
    auto spec = bn.schema().variable(*c);
    auto collision_state = spec.state_index("collision");
    int state = collision_state ? *collision_state : 1;
    return eliminate_marginal(bn, *c, evidence).probabilities[state];
}

double safety_probability(const BayesianNetwork& bn, const Evidence& evidence) {
    return 1.0 - collision_probability(bn, evidence);
}

}  // namespace safernet
