#include "safernet/learn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "safernet/errors.hpp"

namespace safernet {

SufficientStats count_stats(const Dataset& dataset, int variable, const std::vector<int>& parent_set) {
    const Schema& schema = dataset.schema;
    if (variable < 0 || variable >= schema.size()) {
        throw SchemaMismatch("variable index " + std::to_string(variable) + " out of range");
    }
    for (int p : parent_set) {
        if (p < 0 || p >= schema.size()) {
            throw SchemaMismatch("parent index " + std::to_string(p) + " out of range");
        }
        if (p == variable) throw SchemaMismatch("variable cannot be its own parent");
    }

    SufficientStats stats;
    stats.variable = variable;
    stats.parent_set = parent_set;
    stats.parent_configs = parent_config_count(parent_set, schema);
    stats.cardinality = schema.variable(variable).cardinality();
    stats.counts.assign(stats.parent_configs * stats.cardinality, 0);
    stats.row_totals.assign(stats.parent_configs, 0);

    for (const Record& rec : dataset.records) {
        std::size_t row = parent_config_rank(parent_set, schema, rec);
        ++stats.counts[row * stats.cardinality + rec[variable]];
        ++stats.row_totals[row];
    }
    return stats;
}

double k2_log_score(const SufficientStats& stats, int prior_counts) {
    if (prior_counts < 1) throw InvalidConfig("prior_counts must be a positive integer");
    const int r = stats.cardinality;
    const double c = static_cast<double>(prior_counts);
    const double lg_row_prior = std::lgamma(r * c);
    const double lg_cell_prior = std::lgamma(c);

    double score = 0.0;
    for (std::size_t j = 0; j < stats.parent_configs; ++j) {
        score += lg_row_prior - std::lgamma(r * c + static_cast<double>(stats.row_totals[j]));
        for (int k = 0; k < r; ++k) {
            score += std::lgamma(c + static_cast<double>(stats.at(j, k))) - lg_cell_prior;
        }
    }
    return score;
}

DagStructure k2_search(const Dataset& dataset, const K2Config& config) {
    const Schema& schema = dataset.schema;
    const int n = schema.size();

    std::vector<int> ordering = config.ordering;
    if (ordering.empty()) {
        ordering.resize(n);
        for (int i = 0; i < n; ++i) ordering[i] = i;
    }
    if (static_cast<int>(ordering.size()) != n) {
        throw InvalidConfig("ordering has " + std::to_string(ordering.size()) + " entries, schema has " +
                            std::to_string(n));
    }
    std::vector<bool> seen(n, false);
    for (int v : ordering) {
        if (v < 0 || v >= n || seen[v]) throw InvalidConfig("ordering is not a permutation of the variables");
        seen[v] = true;
    }
    if (config.max_parents < 0 || config.max_parents > n - 1) {
        throw InvalidConfig("max_parents must be in [0, " + std::to_string(n - 1) + "]");
    }
    if (config.prior_counts < 1) throw InvalidConfig("prior_counts must be a positive integer");

    DagStructure structure;
    structure.parents.assign(n, {});

    for (int pos = 0; pos < n; ++pos) {
        const int node = ordering[pos];
        std::vector<int> parents;
        double best = k2_log_score(count_stats(dataset, node, parents), config.prior_counts);

        while (static_cast<int>(parents.size()) < config.max_parents) {
            int best_candidate = -1;
            double best_gain_score = best;
            for (int prev = 0; prev < pos; ++prev) {
                const int cand = ordering[prev];
                if (std::find(parents.begin(), parents.end(), cand) != parents.end()) continue;
                std::vector<int> trial = parents;
                trial.insert(std::upper_bound(trial.begin(), trial.end(), cand), cand);
                double s = k2_log_score(count_stats(dataset, node, trial), config.prior_counts);
                if (s > best_gain_score ||
                    (s == best_gain_score && best_candidate >= 0 && cand < best_candidate)) {
                    best_gain_score = s;
                    best_candidate = cand;
                }
            }
            if (best_candidate < 0) break;
            parents.insert(std::upper_bound(parents.begin(), parents.end(), best_candidate), best_candidate);
            best = best_gain_score;
        }
        structure.parents[node] = parents;
    }
    return structure;
}

BayesianNetwork learn_parameters(const Dataset& dataset, const DagStructure& structure,
                                 const DirichletPrior& prior) {
    if (prior.alpha <= 0.0) throw InvalidConfig("Dirichlet alpha must be positive");
    const Schema& schema = dataset.schema;
    if (structure.size() != schema.size()) {
        throw SchemaMismatch("structure covers " + std::to_string(structure.size()) + " variables, schema has " +
                             std::to_string(schema.size()));
    }
    validate_dag(structure);

    std::vector<Cpt> cpts;
    cpts.reserve(schema.size());
    for (int i = 0; i < schema.size(); ++i) {
        SufficientStats stats = count_stats(dataset, i, structure.parents[i]);
        const int r = stats.cardinality;
        std::vector<double> table(stats.parent_configs * r);
        for (std::size_t j = 0; j < stats.parent_configs; ++j) {
            const double denom = r * prior.alpha + static_cast<double>(stats.row_totals[j]);
            double sum = 0.0;
            for (int k = 0; k < r; ++k) {
                table[j * r + k] = (prior.alpha + static_cast<double>(stats.at(j, k))) / denom;
                sum += table[j * r + k];
            }
            // Fold the rounding residual into the largest entry so the row
            // sums to 1 within the Cpt tolerance.
            auto row = table.begin() + j * r;
            *std::max_element(row, row + r) += 1.0 - sum;
        }
        cpts.emplace_back(i, structure.parents[i], stats.parent_configs, r, std::move(table));
    }
    return BayesianNetwork(schema, structure, std::move(cpts));
}

}  // namespace safernet
