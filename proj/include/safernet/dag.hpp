#pragma once

#include <vector>

namespace safernet {

/// Directed acyclic structure over schema variables: parents[i] is the
/// sorted, duplicate-free list of parent indices of variable i.
struct DagStructure {
    std::vector<std::vector<int>> parents;

    int size() const { return static_cast<int>(parents.size()); }
};

/// Topological ordering with every parent before its child, ties broken
/// by ascending index. Throws CyclicStructure (reporting one cycle) if
/// the graph is not a DAG; also rejects self-parents, duplicates and
/// out-of-range indices.
std::vector<int> validate_dag(const DagStructure& structure);

}  // namespace safernet
