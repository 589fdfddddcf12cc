#include "pairaudit/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pairaudit {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// cumulative multiplicity table per node for O(log deg) neighbor sampling;
// entry order: sorted adjacency, then the self-loop weight
struct WalkSampler {
    std::vector<std::uint32_t> targets;
    std::vector<std::uint64_t> cumulative;
    std::uint64_t total = 0;

    void build(const ComparisonGraph& g, std::uint32_t u) {
        targets.clear();
        cumulative.clear();
        std::uint64_t acc = 0;
        for (const auto& [v, m] : g.row(u)) {
            acc += m;
            targets.push_back(v);
            cumulative.push_back(acc);
        }
        if (g.self_loop_count(u)) {
            acc += 2ull * g.self_loop_count(u);
            targets.push_back(u);
            cumulative.push_back(acc);
        }
        total = acc;
    }

    std::uint32_t sample(Rng& rng) const {
        const std::uint64_t r = rng.next_index(total);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        return targets[static_cast<std::size_t>(it - cumulative.begin())];
    }
};

}  // namespace

double sgns_loss(const std::vector<double>& center, const std::vector<double>& positive,
                 const std::vector<std::vector<double>>& negatives) {
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    double loss = -std::log(std::max(sigmoid(dot(center, positive)), 1e-300));
    for (const auto& n : negatives) loss += -std::log(std::max(sigmoid(-dot(center, n)), 1e-300));
    return loss;
}

void sgns_grad(const std::vector<double>& center, const std::vector<double>& positive,
               const std::vector<std::vector<double>>& negatives, std::vector<double>& grad_center,
               std::vector<double>& grad_positive, std::vector<std::vector<double>>& grad_negatives) {
    const std::size_t d = center.size();
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
        return s;
    };
    grad_center.assign(d, 0.0);
    grad_positive.assign(d, 0.0);
    grad_negatives.assign(negatives.size(), std::vector<double>(d, 0.0));

    const double gp = sigmoid(dot(center, positive)) - 1.0;  // dL/dz for the positive pair
    for (std::size_t i = 0; i < d; ++i) {
        grad_center[i] += gp * positive[i];
        grad_positive[i] += gp * center[i];
    }
    for (std::size_t k = 0; k < negatives.size(); ++k) {
        const double gn = sigmoid(dot(center, negatives[k]));
        for (std::size_t i = 0; i < d; ++i) {
            grad_center[i] += gn * negatives[k][i];
            grad_negatives[k][i] += gn * center[i];
        }
    }
}

EmbeddingTable deepwalk_train(const ComparisonGraph& g, const DeepWalkParams& params) {
    if (params.dim < 1) throw UsageError("deepwalk: dim must be >= 1");
    if (params.walk_length < 2) throw UsageError("deepwalk: walk_length must be >= 2");
    if (params.walks_per_node < 1 || params.epochs < 1) {
        throw UsageError("deepwalk: walks_per_node and epochs must be >= 1");
    }

    const std::size_t n = g.n_nodes();
    const int d = params.dim;
    EmbeddingTable table;
    table.dim = d;
    table.n_nodes = n;
    table.params = params;
    table.vectors.assign(n * static_cast<std::size_t>(d), 0.0);

    if (n == 0) throw UsageError("deepwalk: graph is empty");

    std::vector<double> context(n * static_cast<std::size_t>(d), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        if (g.degree(static_cast<std::uint32_t>(u)) == 0) continue;  // isolated stays zero
        Rng rng(mix64(params.seed, 0x696e6974ULL, u));               // "init"
        double* row = table.vectors.data() + u * d;
        for (int i = 0; i < d; ++i) row[i] = (rng.next_double() - 0.5) / d;
    }

    // negative sampling: degree^0.75 over non-isolated nodes
    std::vector<double> noise_cum(n, 0.0);
    double noise_total = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        const double deg = static_cast<double>(g.degree(static_cast<std::uint32_t>(u)));
        noise_total += deg > 0 ? std::pow(deg, 0.75) : 0.0;
        noise_cum[u] = noise_total;
    }
    if (noise_total <= 0) return table;  // no edges at all
    auto sample_negative = [&](Rng& rng) -> std::uint32_t {
        const double r = rng.next_double() * noise_total;
        const auto it = std::upper_bound(noise_cum.begin(), noise_cum.end(), r);
        return static_cast<std::uint32_t>(std::min<std::size_t>(it - noise_cum.begin(), n - 1));
    };

    std::vector<WalkSampler> samplers(n);
    for (std::size_t u = 0; u < n; ++u) samplers[u].build(g, static_cast<std::uint32_t>(u));

    const std::uint64_t total_walks =
        static_cast<std::uint64_t>(params.epochs) * n * static_cast<std::uint64_t>(params.walks_per_node);
    std::uint64_t walks_done = 0;

    std::vector<std::uint32_t> walk;
    std::vector<double> neu1e(static_cast<std::size_t>(d));
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (std::size_t start = 0; start < n; ++start) {
            if (g.degree(static_cast<std::uint32_t>(start)) == 0) {
                walks_done += static_cast<std::uint64_t>(params.walks_per_node);
                continue;
            }
            for (int w = 0; w < params.walks_per_node; ++w) {
                Rng rng(mix64(mix64(params.seed, 0x77616c6bULL, static_cast<std::uint64_t>(epoch)),
                              start, static_cast<std::uint64_t>(w)));  // "walk"
                const double progress = static_cast<double>(walks_done) / static_cast<double>(total_walks);
                const double lr = params.learning_rate * std::max(1.0 - progress, 1e-4);
                ++walks_done;

                walk.clear();
                std::uint32_t cur = static_cast<std::uint32_t>(start);
                walk.push_back(cur);
                for (int step = 1; step < params.walk_length; ++step) {
                    if (samplers[cur].total == 0) break;
                    cur = samplers[cur].sample(rng);
                    walk.push_back(cur);
                }

                for (std::size_t i = 0; i < walk.size(); ++i) {
                    double* center = table.vectors.data() + static_cast<std::size_t>(walk[i]) * d;
                    const std::size_t lo = i >= static_cast<std::size_t>(params.window)
                                               ? i - static_cast<std::size_t>(params.window)
                                               : 0;
                    const std::size_t hi = std::min(walk.size() - 1, i + static_cast<std::size_t>(params.window));
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        const std::uint32_t target = walk[j];
                        std::fill(neu1e.begin(), neu1e.end(), 0.0);
                        // positive target then `negatives` noise draws; a draw
                        // that hits the positive target is skipped (word2vec
                        // convention)
                        for (int k = 0; k <= params.negatives; ++k) {
                            std::uint32_t out_node;
                            double label;
                            if (k == 0) {
                                out_node = target;
                                label = 1.0;
                            } else {
                                out_node = sample_negative(rng);
                                if (out_node == target) continue;
                                label = 0.0;
                            }
                            double* out_row = context.data() + static_cast<std::size_t>(out_node) * d;
                            double z = 0;
                            for (int t = 0; t < d; ++t) z += center[t] * out_row[t];
                            const double gradient = (sigmoid(z) - label) * lr;
                            for (int t = 0; t < d; ++t) {
                                neu1e[static_cast<std::size_t>(t)] += gradient * out_row[t];
                                out_row[t] -= gradient * center[t];
                            }
                        }
                        for (int t = 0; t < d; ++t) center[t] -= neu1e[static_cast<std::size_t>(t)];
                    }
                }
            }
        }
    }
    return table;
}

std::vector<double> edge_embedding_features(const EmbeddingTable& emb, std::uint32_t u, std::uint32_t v) {
    std::vector<double> out(static_cast<std::size_t>(emb.dim) + 1);
    const double* a = emb.row(u);
    const double* b = emb.row(v);
    double dot = 0;
    for (int i = 0; i < emb.dim; ++i) {
        out[static_cast<std::size_t>(i)] = a[i] * b[i];
        dot += a[i] * b[i];
    }
    out[static_cast<std::size_t>(emb.dim)] = dot;
    return out;
}

std::vector<std::string> edge_embedding_feature_names(int dim) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(dim) + 1);
    for (int i = 0; i < dim; ++i) names.push_back("emb_prod_" + std::to_string(i));
    names.push_back("emb_dot");
    return names;
}

void EmbeddingTable::save(std::ostream& out) const {
    out << "pairaudit-embeddings 1 " << n_nodes << ' ' << dim << '\n';
    for (std::size_t u = 0; u < n_nodes; ++u) {
        out << u;
        const double* r = row(static_cast<std::uint32_t>(u));
        for (int i = 0; i < dim; ++i) out << ' ' << format_double(r[i]);
        out << '\n';
    }
}

EmbeddingTable EmbeddingTable::load(std::istream& in) {
    std::string magic;
    int version = 0;
    EmbeddingTable table;
    in >> magic >> version >> table.n_nodes >> table.dim;
    if (!in || magic != "pairaudit-embeddings" || version != 1) {
        throw DataError("embedding file: bad header");
    }
    if (table.dim < 1) throw DataError("embedding file: bad dimension");
    table.vectors.assign(table.n_nodes * static_cast<std::size_t>(table.dim), 0.0);
    for (std::size_t k = 0; k < table.n_nodes; ++k) {
        std::size_t id = 0;
        in >> id;
        if (!in || id >= table.n_nodes) throw DataError("embedding file: bad node id");
        double* r = table.vectors.data() + id * static_cast<std::size_t>(table.dim);
        for (int i = 0; i < table.dim; ++i) in >> r[i];
        if (!in) throw DataError("embedding file: truncated vector for node " + std::to_string(id));
    }
    return table;
}

}  // namespace pairaudit
