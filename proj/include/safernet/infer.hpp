#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "safernet/network.hpp"

namespace safernet {

/// Partial assignment: variable index -> observed state index.
struct Evidence {
    std::map<int, int> assignments;

    bool contains(int variable) const { return assignments.count(variable) > 0; }

    /// Throws SchemaMismatch on out-of-range variables or states.
    void validate(const Schema& schema) const;
};

struct MarginalDistribution {
    int variable = 0;
    std::vector<double> probabilities;
};

/// Default cap on the joint state space enumerated by enumerate_marginal
/// (product of cardinalities of the unobserved variables).
inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// Brute-force P(query | evidence): sums the joint over all completions
/// and normalizes. Exponential; the oracle against which elimination is
/// checked. Throws StateSpaceTooLarge above the cap and
/// ZeroEvidenceLikelihood when the evidence has probability 0.
MarginalDistribution enumerate_marginal(const BayesianNetwork& bn, int query, const Evidence& evidence,
                                        std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Exact P(query | evidence) by variable elimination: factors restricted
/// by evidence, non-query variables summed out in min-degree order (ties
/// by lowest index), result normalized.
MarginalDistribution eliminate_marginal(const BayesianNetwork& bn, int query, const Evidence& evidence);

/// P(C = collision | evidence). Throws MissingCollisionVariable if the
/// schema has no C variable.
double collision_probability(const BayesianNetwork& bn, const Evidence& evidence);

/// 1 - collision_probability.
double safety_probability(const BayesianNetwork& bn, const Evidence& evidence);

}  // namespace safernet
