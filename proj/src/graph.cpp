#include "pairaudit/graph.hpp"

#include <algorithm>
#include <limits>

namespace pairaudit {

ComparisonGraph ComparisonGraph::build(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                       std::size_t n_nodes) {
    ComparisonGraph g;
    g.adjacency_.assign(n_nodes, {});
    g.self_loops_.assign(n_nodes, 0);
    g.degree_.assign(n_nodes, 0);
    g.n_edges_ = edges.size();

    for (const auto& [u, v] : edges) {
        if (u == v) {
            ++g.self_loops_[u];
        } else {
            g.adjacency_[u].emplace_back(v, 1);
            g.adjacency_[v].emplace_back(u, 1);
        }
    }
    // collapse parallel entries into multiplicities; sorting makes the build
    // independent of record order
    for (auto& row : g.adjacency_) {
        std::sort(row.begin(), row.end());
        std::size_t w = 0;
        for (std::size_t r = 0; r < row.size();) {
            std::size_t r2 = r;
            std::uint32_t mult = 0;
            while (r2 < row.size() && row[r2].first == row[r].first) {
                mult += row[r2].second;
                ++r2;
            }
            row[w++] = {row[r].first, mult};
            r = r2;
        }
        row.resize(w);
        row.shrink_to_fit();
    }
    for (std::size_t u = 0; u < n_nodes; ++u) {
        std::uint64_t d = 2ull * g.self_loops_[u];
        for (const auto& [v, m] : g.adjacency_[u]) d += m;
        g.degree_[u] = d;
    }
    return g;
}

std::uint32_t ComparisonGraph::multiplicity(std::uint32_t u, std::uint32_t v) const {
    const auto& row = adjacency_[u];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(v, std::uint32_t{0}));
    if (it != row.end() && it->first == v) return it->second;
    return 0;
}

std::uint64_t ComparisonGraph::walk_weight(std::uint32_t u, std::uint32_t v) const {
    if (u == v) return 2ull * self_loops_[u];
    return multiplicity(u, v);
}

std::uint64_t ComparisonGraph::walk_count(std::uint32_t u, std::uint32_t v, int k) const {
    if (k == 2) {
        std::uint64_t total = 0;
        for (const auto& [z, m] : adjacency_[u]) total += std::uint64_t{m} * walk_weight(z, v);
        if (self_loops_[u]) total += walk_weight(u, u) * walk_weight(u, v);
        return total;
    }
    if (k == 3) {
        // A^3[u][v] = sum_z1 A[u][z1] * A^2[z1][v]
        std::uint64_t total = 0;
        auto step = [&](std::uint32_t z1, std::uint64_t w1) { total += w1 * walk_count(z1, v, 2); };
        for (const auto& [z1, m] : adjacency_[u]) step(z1, m);
        if (self_loops_[u]) step(u, walk_weight(u, u));
        return total;
    }
    throw std::invalid_argument("walk_count: k must be 2 or 3");
}

std::uint64_t ComparisonGraph::khop_neighbor_count(std::uint32_t u, int k, bool within,
                                                   KhopScratch* scratch) const {
    if (k != 2 && k != 3) throw std::invalid_argument("khop_neighbor_count: k must be 2 or 3");
    KhopScratch local;
    KhopScratch& sc = scratch ? *scratch : local;
    if (sc.stamp.size() != n_nodes() || sc.epoch == std::numeric_limits<std::uint32_t>::max()) {
        sc.stamp.assign(n_nodes(), 0);
        sc.epoch = 0;
    }
    const std::uint32_t mark = ++sc.epoch;
    // bounded BFS over the simple (de-duplicated) adjacency
    sc.stamp[u] = mark;
    std::vector<std::uint32_t> frontier{u};
    std::uint64_t exact = 0, cumulative = 0;
    for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
        std::vector<std::uint32_t> next;
        for (std::uint32_t x : frontier) {
            for (const auto& [y, m] : adjacency_[x]) {
                (void)m;
                if (sc.stamp[y] != mark) {
                    sc.stamp[y] = mark;
                    next.push_back(y);
                }
            }
        }
        if (depth == k) exact = next.size();
        cumulative += next.size();
        frontier = std::move(next);
    }
    return within ? cumulative : exact;
}

void ComparisonGraph::write_edge_list(std::ostream& out) const {
    for (std::uint32_t u = 0; u < adjacency_.size(); ++u) {
        if (self_loops_[u]) out << u << '\t' << u << '\t' << self_loops_[u] << '\n';
        for (const auto& [v, m] : adjacency_[u]) {
            if (v >= u) out << u << '\t' << v << '\t' << m << '\n';
        }
    }
}

std::vector<std::uint32_t> ComparisonGraph::neighbor_set(std::uint32_t u) const {
    std::vector<std::uint32_t> out;
    out.reserve(adjacency_[u].size() + 1);
    for (const auto& [v, m] : adjacency_[u]) {
        (void)m;
        out.push_back(v);
    }
    if (self_loops_[u]) {
        out.insert(std::lower_bound(out.begin(), out.end(), u), u);
    }
    return out;
}

}  // namespace pairaudit
