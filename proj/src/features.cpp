#include "pairaudit/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pairaudit {

FeatureMatrix FeatureMatrix::with_columns(std::vector<std::string> column_names, std::size_t n_rows) {
    FeatureMatrix m;
    m.names = std::move(column_names);
    m.rows = n_rows;
    m.values.assign(n_rows * m.names.size(), 0.0);
    return m;
}

FeatureMatrix FeatureMatrix::hcat(const FeatureMatrix& a, const FeatureMatrix& b) {
    if (a.rows != b.rows) throw std::invalid_argument("hcat: row count mismatch");
    FeatureMatrix m;
    m.names = a.names;
    m.names.insert(m.names.end(), b.names.begin(), b.names.end());
    m.rows = a.rows;
    m.values.resize(m.rows * m.cols());
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* dst = m.values.data() + r * m.cols();
        std::copy_n(a.row_ptr(r), a.cols(), dst);
        std::copy_n(b.row_ptr(r), b.cols(), dst + a.cols());
    }
    return m;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& row_ids) const {
    FeatureMatrix m;
    m.names = names;
    m.rows = row_ids.size();
    m.values.reserve(m.rows * cols());
    for (std::size_t r : row_ids) {
        m.values.insert(m.values.end(), row_ptr(r), row_ptr(r) + cols());
    }
    return m;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& column_ids) const {
    FeatureMatrix m;
    for (std::size_t c : column_ids) m.names.push_back(names.at(c));
    m.rows = rows;
    m.values.reserve(rows * column_ids.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c : column_ids) m.values.push_back(at(r, c));
    }
    return m;
}

void FeatureMatrix::write_tsv(std::ostream& out, const std::vector<std::size_t>& pair_ids) const {
    out << "pair_id";
    for (const auto& n : names) out << '\t' << n;
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        out << pair_ids[r];
        for (std::size_t c = 0; c < cols(); ++c) out << '\t' << format_double(at(r, c));
        out << '\n';
    }
}

LeakageFeatures leakage_features(const ComparisonGraph& g, std::uint32_t u, std::uint32_t v) {
    return {g.degree(u), g.degree(v), g.walk_count(u, v, 2)};
}

std::array<std::uint64_t, 8> extended_features(const ComparisonGraph& g, std::uint32_t u, std::uint32_t v,
                                               bool khop_within, KhopScratch* scratch) {
    return {
        g.degree(u),
        g.degree(v),
        g.walk_count(u, v, 2),
        g.walk_count(u, v, 3),
        g.khop_neighbor_count(u, 2, khop_within, scratch),
        g.khop_neighbor_count(v, 2, khop_within, scratch),
        g.khop_neighbor_count(u, 3, khop_within, scratch),
        g.khop_neighbor_count(v, 3, khop_within, scratch),
    };
}

LinkIndices link_indices(const ComparisonGraph& g, std::uint32_t u, std::uint32_t v) {
    const auto nu = g.neighbor_set(u);
    const auto nv = g.neighbor_set(v);

    LinkIndices idx{0.0, 0.0, 0.0, 0.0};
    std::size_t common = 0;
    std::size_t i = 0, j = 0;
    while (i < nu.size() && j < nv.size()) {
        if (nu[i] < nv[j]) {
            ++i;
        } else if (nu[i] > nv[j]) {
            ++j;
        } else {
            const std::uint64_t dz = g.degree(nu[i]);
            ++common;
            if (dz > 0) idx.resource_allocation += 1.0 / static_cast<double>(dz);
            if (dz >= 2) idx.adamic_adar += 1.0 / std::log(static_cast<double>(dz));
            ++i;
            ++j;
        }
    }
    const std::size_t uni = nu.size() + nv.size() - common;
    idx.jaccard = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
    idx.preferential_attachment = static_cast<double>(g.degree(u)) * static_cast<double>(g.degree(v));
    return idx;
}

FeatureMatrix leakage_matrix(const ComparisonGraph& g,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs, int threads) {
    auto m = FeatureMatrix::with_columns({"s1_freq", "s2_freq", "s1s2_inter"}, pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t r) {
        const auto f = leakage_features(g, pairs[r].first, pairs[r].second);
        m.at(r, 0) = static_cast<double>(f.s1_freq);
        m.at(r, 1) = static_cast<double>(f.s2_freq);
        m.at(r, 2) = static_cast<double>(f.s1s2_inter);
    });
    return m;
}

FeatureMatrix extended_matrix(const ComparisonGraph& g,
                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                              bool khop_within, int threads) {
    auto m = FeatureMatrix::with_columns({"s1_freq", "s2_freq", "paths_2hop", "paths_3hop", "nbrs_2hop_s1",
                                          "nbrs_2hop_s2", "nbrs_3hop_s1", "nbrs_3hop_s2"},
                                         pairs.size());
    // per-thread BFS scratch; results are slot-addressed so the schedule cannot
    // affect the output
    parallel_for(pairs.size(), threads, [&](std::size_t r) {
        thread_local KhopScratch scratch;
        const auto f = extended_features(g, pairs[r].first, pairs[r].second, khop_within, &scratch);
        for (std::size_t c = 0; c < 8; ++c) m.at(r, c) = static_cast<double>(f[c]);
    });
    return m;
}

FeatureMatrix link_index_matrix(const ComparisonGraph& g,
                                const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                                int threads) {
    auto m = FeatureMatrix::with_columns(
        {"resource_allocation", "jaccard", "preferential_attachment", "adamic_adar"}, pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t r) {
        const auto idx = link_indices(g, pairs[r].first, pairs[r].second);
        m.at(r, 0) = idx.resource_allocation;
        m.at(r, 1) = idx.jaccard;
        m.at(r, 2) = idx.preferential_attachment;
        m.at(r, 3) = idx.adamic_adar;
    });
    return m;
}

}  // namespace pairaudit
