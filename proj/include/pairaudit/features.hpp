#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pairaudit/graph.hpp"

namespace pairaudit {

// Row-major matrix with named columns; the common currency between feature
// extraction, classifiers and the TSV export.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::size_t rows = 0;
    std::vector<double> values;

    std::size_t cols() const { return names.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
    const double* row_ptr(std::size_t r) const { return values.data() + r * cols(); }

    static FeatureMatrix with_columns(std::vector<std::string> column_names, std::size_t n_rows);
    static FeatureMatrix hcat(const FeatureMatrix& a, const FeatureMatrix& b);
    FeatureMatrix select_rows(const std::vector<std::size_t>& row_ids) const;
    FeatureMatrix select_columns(const std::vector<std::size_t>& column_ids) const;

    // header + one row per pair_id
    void write_tsv(std::ostream& out, const std::vector<std::size_t>& pair_ids) const;
};

struct LeakageFeatures {
    std::uint64_t s1_freq;
    std::uint64_t s2_freq;
    std::uint64_t s1s2_inter;  // A^2[u][v]: 2-hop walks = common-neighbor count
};

LeakageFeatures leakage_features(const ComparisonGraph& g, std::uint32_t u, std::uint32_t v);

// (deg u, deg v, A^2[u,v], A^3[u,v], 2hop nbrs u, 2hop nbrs v, 3hop nbrs u,
// 3hop nbrs v); the first three coincide with LeakageFeatures.
std::array<std::uint64_t, 8> extended_features(const ComparisonGraph& g, std::uint32_t u, std::uint32_t v,
                                               bool khop_within = false, KhopScratch* scratch = nullptr);

// Classical link-prediction indices over de-duplicated neighbor sets.
//   resource_allocation = sum over common neighbors z of 1/deg(z)
//   jaccard             = |common| / |union|            (0 when the union is empty)
//   preferential_attachment = deg(u) * deg(v)
//   adamic_adar         = sum over common z with deg(z) >= 2 of 1/ln(deg(z))
struct LinkIndices {
    double resource_allocation;
    double jaccard;
    double preferential_attachment;
    double adamic_adar;
};

LinkIndices link_indices(const ComparisonGraph& g, std::uint32_t u, std::uint32_t v);

// Batch extractors; row i corresponds to pairs[i]. Deterministic regardless of
// thread count.
FeatureMatrix leakage_matrix(const ComparisonGraph& g,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs, int threads);
FeatureMatrix extended_matrix(const ComparisonGraph& g,
                              const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                              bool khop_within, int threads);
FeatureMatrix link_index_matrix(const ComparisonGraph& g,
                                const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                                int threads);

}  // namespace pairaudit
