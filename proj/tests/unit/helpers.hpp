#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "safernet/learn.hpp"
#include "safernet/network.hpp"
#include "safernet/schema.hpp"

namespace safernet::testing {

inline Schema binary_schema(int n) {
    std::vector<VariableSpec> vars;
    for (int i = 0; i < n; ++i) {
        vars.push_back({"X" + std::to_string(i), {"0", "1"}, VariableRole::Dynamic});
    }
    return Schema(std::move(vars));
}

inline Schema mixed_schema(const std::vector<int>& cardinalities) {
    std::vector<VariableSpec> vars;
    for (std::size_t i = 0; i < cardinalities.size(); ++i) {
        std::vector<std::string> states;
        for (int k = 0; k < cardinalities[i]; ++k) states.push_back("s" + std::to_string(k));
        vars.push_back({"X" + std::to_string(i), std::move(states), VariableRole::Dynamic});
    }
    return Schema(std::move(vars));
}

/// Network with random structure (parents only from lower indices) and
/// random strictly-positive CPTs.
inline BayesianNetwork random_network(std::mt19937_64& rng, const Schema& schema, int max_parents) {
    const int n = schema.size();
    DagStructure structure;
    structure.parents.assign(n, {});
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> n_parents(0, std::min(max_parents, i));
        int count = n_parents(rng);
        std::vector<int> pool(i);
        for (int p = 0; p < i; ++p) pool[p] = p;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(count);
        std::sort(pool.begin(), pool.end());
        structure.parents[i] = pool;
    }

    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<Cpt> cpts;
    for (int i = 0; i < n; ++i) {
        const int r = schema.variable(i).cardinality();
        const std::size_t q = parent_config_count(structure.parents[i], schema);
        std::vector<double> table(q * r);
        for (std::size_t j = 0; j < q; ++j) {
            double sum = 0.0;
            for (int k = 0; k < r; ++k) {
                table[j * r + k] = unit(rng);
                sum += table[j * r + k];
            }
            double acc = 0.0;
            for (int k = 0; k < r; ++k) {
                table[j * r + k] /= sum;
                acc += table[j * r + k];
            }
            table[j * r + r - 1] += 1.0 - acc;
        }
        cpts.emplace_back(i, structure.parents[i], q, r, std::move(table));
    }
    return BayesianNetwork(schema, std::move(structure), std::move(cpts));
}

/// Ancestral sampling in topological order.
inline Dataset sample_dataset(const BayesianNetwork& bn, std::size_t n_records, std::mt19937_64& rng) {
    Dataset out{bn.schema(), {}};
    out.records.reserve(n_records);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t rec_i = 0; rec_i < n_records; ++rec_i) {
        Record rec(bn.schema().size(), 0);
        for (int v : bn.topological_order()) {
            const Cpt& cpt = bn.cpt(v);
            const std::size_t row = parent_config_rank(cpt.parents(), bn.schema(), rec);
            double u = unit(rng);
            int state = 0;
            double acc = 0.0;
            for (int k = 0; k < cpt.cardinality(); ++k) {
                acc += cpt.at(row, k);
                if (u < acc) {
                    state = k;
                    break;
                }
                state = k;
            }
            rec[v] = static_cast<std::uint8_t>(state);
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

/// Parentless-chain helper: A -> B with the given probabilities.
inline BayesianNetwork chain_ab(double p_a1, double p_b1_given_a0, double p_b1_given_a1) {
    Schema schema = binary_schema(2);
    DagStructure structure;
    structure.parents = {{}, {0}};
    std::vector<Cpt> cpts;
    cpts.emplace_back(0, std::vector<int>{}, 1, 2, std::vector<double>{1.0 - p_a1, p_a1});
    cpts.emplace_back(1, std::vector<int>{0}, 2, 2,
                      std::vector<double>{1.0 - p_b1_given_a0, p_b1_given_a0, 1.0 - p_b1_given_a1, p_b1_given_a1});
    return BayesianNetwork(schema, std::move(structure), std::move(cpts));
}

}  // namespace safernet::testing
