#include "safernet/dag.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "safernet/errors.hpp"

namespace safernet {

namespace {

// Walks parent links from a node stuck in the Kahn residue until a node
// repeats, then formats that cycle for the error message.
std::string find_cycle(const DagStructure& s, const std::vector<bool>& removed) {
    const int n = s.size();
    std::vector<int> seen_at(n, -1);
    std::vector<int> path;
    int cur = 0;
    while (removed[cur]) ++cur;
    while (seen_at[cur] < 0) {
        seen_at[cur] = static_cast<int>(path.size());
        path.push_back(cur);
        for (int p : s.parents[cur]) {
            if (!removed[p]) {
                cur = p;
                break;
            }
        }
    }
    std::string msg = "cycle:";
    for (std::size_t i = seen_at[cur]; i < path.size(); ++i) {
        msg += " " + std::to_string(path[i]);
    }
    msg += " -> " + std::to_string(cur);
    return msg;
}

}  // namespace

std::vector<int> validate_dag(const DagStructure& structure) {
    const int n = structure.size();
    std::vector<int> remaining(n, 0);
    for (int i = 0; i < n; ++i) {
        std::set<int> uniq;
        for (int p : structure.parents[i]) {
            if (p < 0 || p >= n) {
                throw CyclicStructure("parent index " + std::to_string(p) + " out of range for node " +
                                      std::to_string(i));
            }
            if (p == i) throw CyclicStructure("node " + std::to_string(i) + " is its own parent");
            if (!uniq.insert(p).second) {
                throw CyclicStructure("duplicate parent " + std::to_string(p) + " of node " + std::to_string(i));
            }
        }
        remaining[i] = static_cast<int>(uniq.size());
    }

    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
        for (int p : structure.parents[i]) children[p].push_back(i);
    }

    // Kahn with an ordered ready set for the ascending-index tie rule.
    std::set<int> ready;
    for (int i = 0; i < n; ++i) {
        if (remaining[i] == 0) ready.insert(i);
    }
    std::vector<int> order;
    std::vector<bool> removed(n, false);
    order.reserve(n);
    while (!ready.empty()) {
        int v = *ready.begin();
        ready.erase(ready.begin());
        removed[v] = true;
        order.push_back(v);
        for (int c : children[v]) {
            if (--remaining[c] == 0) ready.insert(c);
        }
    }
    if (static_cast<int>(order.size()) != n) {
        throw CyclicStructure(find_cycle(structure, removed));
    }
    return order;
}

}  // namespace safernet
