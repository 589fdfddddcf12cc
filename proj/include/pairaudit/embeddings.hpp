#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "pairaudit/graph.hpp"

namespace pairaudit {

struct DeepWalkParams {
    int dim = 64;
    int walks_per_node = 10;
    int walk_length = 40;
    int window = 5;  // fixed half-width, tokens on each side
    int negatives = 5;
    int epochs = 3;
    double learning_rate = 0.025;
    std::uint64_t seed = 0;
};

// Per-node vectors from truncated random walks + skip-gram with negative
// sampling. Nodes with degree 0 keep the zero vector.
struct EmbeddingTable {
    int dim = 0;
    std::size_t n_nodes = 0;
    std::vector<double> vectors;  // n_nodes * dim, row-major
    DeepWalkParams params;

    const double* row(std::uint32_t u) const { return vectors.data() + static_cast<std::size_t>(u) * dim; }

    // Text format: header "pairaudit-embeddings 1 <n> <dim>", then one
    // "<node id> <v0> ... <v{dim-1}>" line per node.
    void save(std::ostream& out) const;
    static EmbeddingTable load(std::istream& in);
};

// Walks choose neighbors proportionally to edge multiplicity (self-loops with
// weight 2L). Each walk draws from its own (seed, epoch, node, walk) stream, so
// the corpus does not depend on scheduling; gradient updates run on a single
// deterministic schedule.
EmbeddingTable deepwalk_train(const ComparisonGraph& g, const DeepWalkParams& params);

// d element-wise products followed by the dot product (length dim + 1).
std::vector<double> edge_embedding_features(const EmbeddingTable& emb, std::uint32_t u, std::uint32_t v);

std::vector<std::string> edge_embedding_feature_names(int dim);

// Negative-sampling loss for one (center, positive context, negatives) triple
// and its analytic gradients; the same math the training loop applies.
double sgns_loss(const std::vector<double>& center, const std::vector<double>& positive,
                 const std::vector<std::vector<double>>& negatives);
void sgns_grad(const std::vector<double>& center, const std::vector<double>& positive,
               const std::vector<std::vector<double>>& negatives, std::vector<double>& grad_center,
               std::vector<double>& grad_positive, std::vector<std::vector<double>>& grad_negatives);

}  // namespace pairaudit
