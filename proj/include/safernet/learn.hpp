#pragma once

#include <cstdint>
#include <vector>

#include "safernet/network.hpp"
#include "safernet/schema.hpp"

namespace safernet {

/// Per-variable counts over a dataset: counts[j*r + k] is the number of
/// records where the variable takes state k under its j-th parent
/// configuration (rows ranked by the parent_config_rank convention).
struct SufficientStats {
    int variable = 0;
    std::vector<int> parent_set;
    std::size_t parent_configs = 1;
    int cardinality = 0;
    std::vector<std::int64_t> counts;      // q rows * r columns, row-major
    std::vector<std::int64_t> row_totals;  // q entries

    std::int64_t at(std::size_t row, int state) const { return counts[row * cardinality + state]; }
};

struct K2Config {
    /// Variable ordering (the prior knowledge); parents of a node are
    /// drawn only from its predecessors. Empty means schema order.
    std::vector<int> ordering;
    int max_parents = 3;
    /// The scoring prior pseudo-count per CPT cell; 1 gives the K2 metric.
    int prior_counts = 1;
};

/// Symmetric Dirichlet prior for parameter estimation: alpha pseudo-counts
/// per CPT cell.
struct DirichletPrior {
    double alpha = 1.0;
};

/// Single-pass exact counting. parent_set must exclude the variable.
SufficientStats count_stats(const Dataset& dataset, int variable, const std::vector<int>& parent_set);

/// Log of the node's factor of the Bayesian scoring metric with a flat
/// integer prior of prior_counts per cell:
///   sum_j [ lgamma(r*c) - lgamma(r*c + N_j) + sum_k (lgamma(c + N_jk) - lgamma(c)) ]
/// With prior_counts = 1 this is the K2 metric's node factor. The full
/// network log-score is the sum of node factors (the structure prior is
/// uniform, hence dropped).
double k2_log_score(const SufficientStats& stats, int prior_counts = 1);

/// Greedy structure search over the config ordering: for each variable,
/// repeatedly add the single predecessor that maximally increases
/// k2_log_score, stopping when nothing improves or max_parents is hit.
/// Ties between candidates are broken by lowest candidate index.
DagStructure k2_search(const Dataset& dataset, const K2Config& config);

/// Posterior-mean CPTs: theta_jk = (alpha + N_jk) / (r*alpha + N_j).
/// Rows with no data reduce to the normalized prior.
BayesianNetwork learn_parameters(const Dataset& dataset, const DagStructure& structure,
                                 const DirichletPrior& prior = {});

}  // namespace safernet
