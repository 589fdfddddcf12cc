#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pairaudit/common.hpp"

namespace pairaudit {

// Reusable BFS scratch for khop_neighbor_count; one per thread when querying in
// parallel.
struct KhopScratch {
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
};

// Undirected multigraph over interned sentence nodes. One edge per pair
// occurrence; repeated pairs accumulate multiplicity; self-pairs are stored as
// self-loops. Matrix conventions follow the undirected multigraph adjacency
// matrix: A[u][v] = multiplicity for u != v, A[u][u] = 2 * self_loop_count(u),
// so degree(u) = row sum = occurrence count of the sentence.
class ComparisonGraph {
public:
    ComparisonGraph() = default;

    static ComparisonGraph build(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                 std::size_t n_nodes);

    std::size_t n_nodes() const { return adjacency_.size(); }
    std::uint64_t n_edges() const { return n_edges_; }  // pair occurrences, self-loops counted once

    std::uint64_t degree(std::uint32_t u) const { return degree_[u]; }
    std::uint32_t self_loop_count(std::uint32_t u) const { return self_loops_[u]; }

    // Edge-index lookup: multiplicity of the normalized (u, v) edge, u != v.
    std::uint32_t multiplicity(std::uint32_t u, std::uint32_t v) const;

    // A[u][v] including the diagonal convention above.
    std::uint64_t walk_weight(std::uint32_t u, std::uint32_t v) const;

    // Number of length-k walks between u and v with multiplicities (A^k[u][v]).
    // k must be 2 or 3.
    std::uint64_t walk_count(std::uint32_t u, std::uint32_t v, int k) const;

    // Nodes at shortest-path distance exactly k from u (u excluded), or within
    // k when `within` is set. k must be 2 or 3.
    std::uint64_t khop_neighbor_count(std::uint32_t u, int k, bool within = false,
                                      KhopScratch* scratch = nullptr) const;

    // Distinct neighbors, multiplicity ignored; u itself appears when it has a
    // self-loop. Sorted by node id.
    std::vector<std::uint32_t> neighbor_set(std::uint32_t u) const;

    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& row(std::uint32_t u) const {
        return adjacency_[u];
    }

    // Edge-list export: `u <tab> v <tab> multiplicity` lines (self-loops as
    // u == v with the loop count), sorted by (u, v).
    void write_edge_list(std::ostream& out) const;

private:
    // per node: sorted (neighbor != u, multiplicity)
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adjacency_;
    std::vector<std::uint32_t> self_loops_;
    std::vector<std::uint64_t> degree_;
    std::uint64_t n_edges_ = 0;
};

}  // namespace pairaudit
