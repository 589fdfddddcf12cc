#include "pairaudit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pairaudit {

namespace {

int infer_n_classes(const std::vector<int>& y) {
    int n_classes = 0;
    for (int label : y) {
        if (label < 0) throw DataError("labels must be non-negative class indices");
        n_classes = std::max(n_classes, label + 1);
    }
    return n_classes;
}

void check_matrix(const FeatureMatrix& X, const std::vector<int>& y, const std::vector<double>& weights) {
    if (X.rows != y.size()) throw DataError("feature/label row count mismatch");
    if (!weights.empty() && weights.size() != y.size()) throw DataError("weight vector length mismatch");
    for (std::size_t i = 0; i < X.values.size(); ++i) {
        if (std::isnan(X.values[i])) {
            throw DataError("NaN feature value at row " + std::to_string(i / X.cols()) + ", column " +
                            std::to_string(i % X.cols()));
        }
    }
    for (double w : weights) {
        if (!(w >= 0) || std::isnan(w)) throw DataError("sample weights must be non-negative");
    }
}

struct TreeGrower {
    const FeatureMatrix& X;
    const std::vector<int>& y;
    const std::vector<double>& weights;  // per original sample
    const ForestParams& params;
    std::uint64_t tree_seed;
    int n_classes;
    int mtry;

    Tree tree;
    std::vector<std::uint32_t> samples;  // bootstrap sample ids, partitioned in place

    struct SortedValue {
        double value;
        std::uint32_t position;  // index into the node's span, keeps sorting stable
    };
    std::vector<SortedValue> sorted;
    std::vector<int> feature_pool;

    void grow_root() {
        tree.nodes.clear();
        tree.leaf_probs.clear();
        grow(0, samples.size(), 0, 1);
    }

    // returns node index
    std::int32_t grow(std::size_t begin, std::size_t end, int depth, std::uint64_t path) {
        const std::int32_t node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        std::vector<double> class_w(static_cast<std::size_t>(n_classes), 0.0);
        double total_w = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double w = weights[samples[i]];
            class_w[static_cast<std::size_t>(y[samples[i]])] += w;
            total_w += w;
        }
        const std::size_t count = end - begin;
        int present = 0;
        for (double w : class_w) present += w > 0 ? 1 : 0;

        const bool stop = depth >= params.max_depth || present <= 1 ||
                          count < 2 * static_cast<std::size_t>(params.min_leaf);
        if (!stop) {
            if (try_split(begin, end, class_w, total_w, depth, path, node_id)) return node_id;
        }
        make_leaf(node_id, class_w, total_w, count);
        return node_id;
    }

    void make_leaf(std::int32_t node_id, const std::vector<double>& class_w, double total_w,
                   std::size_t count) {
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = -1;
        node.proba_offset = static_cast<std::uint32_t>(tree.leaf_probs.size());
        double sum = 0.0;
        for (double w : class_w) sum += w;
        for (double w : class_w) {
            // zero-weight leaves can only arise from zero-weight samples; fall
            // back to instance counts there
            tree.leaf_probs.push_back(sum > 0 ? w / sum : 1.0 / n_classes);
        }
        (void)total_w;
        (void)count;
    }

    bool try_split(std::size_t begin, std::size_t end, const std::vector<double>& class_w, double total_w,
                   int depth, std::uint64_t path, std::int32_t node_id) {
        // split quality: maximize sum over sides of (sum_c w_c^2) / W_side,
        // equivalent to minimizing the weighted Gini impurity of the split
        double parent_score = 0.0;
        for (double w : class_w) parent_score += w * w;
        parent_score = total_w > 0 ? parent_score / total_w : 0.0;

        Rng node_rng(mix64(tree_seed, 0x6e6f6465ULL, path));  // "node"
        const std::size_t d = X.cols();
        feature_pool.resize(d);
        for (std::size_t i = 0; i < d; ++i) feature_pool[i] = static_cast<int>(i);
        const int m = std::min<int>(mtry, static_cast<int>(d));
        for (int i = 0; i < m; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(node_rng.next_index(d - static_cast<std::size_t>(i)));
            std::swap(feature_pool[static_cast<std::size_t>(i)], feature_pool[j]);
        }
        std::sort(feature_pool.begin(), feature_pool.begin() + m);  // lower-feature tie-break

        double best_score = parent_score;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<double> left_w(static_cast<std::size_t>(n_classes));
        const std::size_t count = end - begin;
        for (int fi = 0; fi < m; ++fi) {
            const int f = feature_pool[static_cast<std::size_t>(fi)];
            sorted.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                sorted[i] = {X.at(samples[begin + i], static_cast<std::size_t>(f)),
                             static_cast<std::uint32_t>(i)};
            }
            std::sort(sorted.begin(), sorted.end(), [](const SortedValue& a, const SortedValue& b) {
                return a.value < b.value || (a.value == b.value && a.position < b.position);
            });

            std::fill(left_w.begin(), left_w.end(), 0.0);
            double left_total = 0.0;
            double left_sq = 0.0;  // sum_c left_w[c]^2, maintained incrementally
            for (std::size_t i = 0; i + 1 < count; ++i) {
                const std::uint32_t sample = samples[begin + sorted[i].position];
                const double w = weights[sample];
                const std::size_t c = static_cast<std::size_t>(y[sample]);
                left_sq += w * (2.0 * left_w[c] + w);
                left_w[c] += w;
                left_total += w;

                if (sorted[i].value == sorted[i + 1].value) continue;
                const std::size_t left_count = i + 1;
                const std::size_t right_count = count - left_count;
                if (left_count < static_cast<std::size_t>(params.min_leaf) ||
                    right_count < static_cast<std::size_t>(params.min_leaf)) {
                    continue;
                }
                const double right_total = total_w - left_total;
                if (left_total <= 0 || right_total <= 0) continue;
                double right_sq = 0.0;
                for (std::size_t c2 = 0; c2 < left_w.size(); ++c2) {
                    const double rw = class_w[c2] - left_w[c2];
                    right_sq += rw * rw;
                }
                const double score = left_sq / left_total + right_sq / right_total;
                if (score > best_score) {
                    double thr = sorted[i].value + (sorted[i + 1].value - sorted[i].value) / 2.0;
                    if (thr >= sorted[i + 1].value) thr = sorted[i].value;
                    best_score = score;
                    best_feature = f;
                    best_threshold = thr;
                }
            }
        }

        if (best_feature < 0) return false;

        const auto mid = std::stable_partition(
            samples.begin() + static_cast<std::ptrdiff_t>(begin), samples.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::uint32_t s) { return X.at(s, static_cast<std::size_t>(best_feature)) <= best_threshold; });
        const std::size_t split_at = static_cast<std::size_t>(mid - samples.begin());
        if (split_at == begin || split_at == end) return false;  // numeric edge, refuse the split

        tree.nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const std::int32_t left_id = grow(begin, split_at, depth + 1, path * 2);
        tree.nodes[static_cast<std::size_t>(node_id)].left = left_id;
        const std::int32_t right_id = grow(split_at, end, depth + 1, path * 2 + 1);
        tree.nodes[static_cast<std::size_t>(node_id)].right = right_id;
        return true;
    }
};

const double* tree_leaf(const Tree& tree, const double* row) {
    const TreeNode* node = &tree.nodes[0];
    while (node->feature >= 0) {
        node = row[node->feature] <= node->threshold ? &tree.nodes[static_cast<std::size_t>(node->left)]
                                                     : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return tree.leaf_probs.data() + node->proba_offset;
}

}  // namespace

std::string ForestParams::describe() const {
    std::ostringstream ss;
    ss << "random_forest(n_trees=" << n_trees << ", max_depth=" << max_depth << ", min_leaf=" << min_leaf
       << ", mtry=" << mtry << ", seed=" << seed << ")";
    return ss.str();
}

std::string LogisticParams::describe() const {
    std::ostringstream ss;
    ss << "logistic(learning_rate=" << learning_rate << ", epochs=" << epochs << ", l2=" << l2 << ")";
    return ss.str();
}

std::string CrossPredictParams::describe() const {
    return kind == ClassifierKind::random_forest ? forest.describe() : logistic.describe();
}

std::string ClassifierModel::describe() const {
    switch (kind) {
        case ClassifierKind::random_forest: return forest_params.describe();
        case ClassifierKind::logistic: return logistic_params.describe();
        case ClassifierKind::constant: return "constant";
    }
    return "?";
}

ClassifierModel rf_train(const FeatureMatrix& X, const std::vector<int>& y,
                         const std::vector<double>& sample_weights, const ForestParams& params,
                         int threads) {
    check_matrix(X, y, sample_weights);
    if (X.rows == 0) throw DataError("rf_train: empty training set");
    std::vector<double> weights = sample_weights;
    if (weights.empty()) weights.assign(X.rows, 1.0);

    ClassifierModel model;
    model.n_features = X.cols();
    model.n_classes = infer_n_classes(y);
    model.forest_params = params;

    int present = 0;
    std::vector<double> class_totals(static_cast<std::size_t>(model.n_classes), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) class_totals[static_cast<std::size_t>(y[i])] += weights[i];
    for (double w : class_totals) present += w > 0 ? 1 : 0;
    if (present <= 1) {
        model.kind = ClassifierKind::constant;
        model.n_classes = std::max(model.n_classes, 1);
        model.base_probs.assign(static_cast<std::size_t>(model.n_classes), 0.0);
        double best = -1;
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < class_totals.size(); ++c) {
            if (class_totals[c] > best) {
                best = class_totals[c];
                best_c = c;
            }
        }
        model.base_probs[best_c] = 1.0;
        model.warnings.push_back("training data contains a single class; model predicts it constantly");
        return model;
    }

    model.kind = ClassifierKind::random_forest;
    model.trees.resize(static_cast<std::size_t>(params.n_trees));

    std::vector<double> cum_weights(X.rows);
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        acc += weights[i];
        cum_weights[i] = acc;
    }
    if (!(acc > 0)) throw DataError("rf_train: total sample weight is zero");

    const int mtry =
        params.mtry > 0 ? params.mtry : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(X.cols()))));

    parallel_for(static_cast<std::size_t>(params.n_trees), threads, [&](std::size_t t) {
        const std::uint64_t tree_seed = mix64(params.seed, 0x74726565ULL, t);  // "tree"
        Rng rng(tree_seed);
        TreeGrower grower{X, y, weights, params, tree_seed, model.n_classes, mtry, {}, {}, {}, {}};
        grower.samples.resize(X.rows);
        for (std::size_t i = 0; i < X.rows; ++i) {
            const double r = rng.next_double() * acc;
            const auto it = std::upper_bound(cum_weights.begin(), cum_weights.end(), r);
            grower.samples[i] =
                static_cast<std::uint32_t>(std::min<std::size_t>(it - cum_weights.begin(), X.rows - 1));
        }
        grower.grow_root();
        model.trees[t] = std::move(grower.tree);
    });
    return model;
}

std::vector<double> predict_proba(const ClassifierModel& model, const FeatureMatrix& X, int threads) {
    if (X.cols() != model.n_features && model.kind != ClassifierKind::constant) {
        throw DataError("predict: feature dimension mismatch (" + std::to_string(X.cols()) + " vs " +
                        std::to_string(model.n_features) + ")");
    }
    const std::size_t C = static_cast<std::size_t>(model.n_classes);
    std::vector<double> probs(X.rows * C, 0.0);

    if (model.kind == ClassifierKind::constant) {
        for (std::size_t r = 0; r < X.rows; ++r) {
            std::copy(model.base_probs.begin(), model.base_probs.end(), probs.begin() + r * C);
        }
        return probs;
    }
    if (model.kind == ClassifierKind::logistic) {
        parallel_for(X.rows, threads, [&](std::size_t r) {
            const double* row = X.row_ptr(r);
            double z = model.bias;
            for (std::size_t j = 0; j < model.n_features; ++j) {
                const double x = (row[j] - model.feature_mean[j]) / model.feature_scale[j];
                z += model.coef[j] * x;
            }
            const double p = 1.0 / (1.0 + std::exp(-z));
            probs[r * C] = 1.0 - p;
            probs[r * C + 1] = p;
        });
        return probs;
    }
    parallel_for(X.rows, threads, [&](std::size_t r) {
        const double* row = X.row_ptr(r);
        double* out = probs.data() + r * C;
        for (const auto& tree : model.trees) {
            const double* leaf = tree_leaf(tree, row);
            for (std::size_t c = 0; c < C; ++c) out[c] += leaf[c];
        }
        const double inv = 1.0 / static_cast<double>(model.trees.size());
        for (std::size_t c = 0; c < C; ++c) out[c] *= inv;
    });
    return probs;
}

std::vector<int> predict_label(const ClassifierModel& model, const FeatureMatrix& X, int threads) {
    const auto probs = predict_proba(model, X, threads);
    const std::size_t C = static_cast<std::size_t>(model.n_classes);
    std::vector<int> labels(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < C; ++c) {
            if (probs[r * C + c] > probs[r * C + best]) best = c;
        }
        labels[r] = static_cast<int>(best);
    }
    return labels;
}

double logistic_loss_and_grad(const FeatureMatrix& X, const std::vector<int>& y,
                              const std::vector<double>& weights, const std::vector<double>& beta,
                              double bias, double l2, std::vector<double>& grad) {
    const std::size_t d = X.cols();
    grad.assign(d + 1, 0.0);
    double total_w = 0.0;
    double loss = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) {
        const double w = weights.empty() ? 1.0 : weights[r];
        total_w += w;
        const double* row = X.row_ptr(r);
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += beta[j] * row[j];
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double target = y[r] == 1 ? 1.0 : 0.0;
        const double pc = std::clamp(p, 1e-15, 1.0 - 1e-15);
        loss += -w * (target * std::log(pc) + (1.0 - target) * std::log(1.0 - pc));
        const double g = w * (p - target);
        for (std::size_t j = 0; j < d; ++j) grad[j] += g * row[j];
        grad[d] += g;
    }
    if (!(total_w > 0)) throw DataError("logistic: total sample weight is zero");
    loss /= total_w;
    for (std::size_t j = 0; j <= d; ++j) grad[j] /= total_w;
    for (std::size_t j = 0; j < d; ++j) {
        loss += 0.5 * l2 * beta[j] * beta[j];
        grad[j] += l2 * beta[j];
    }
    return loss;
}

ClassifierModel logistic_train(const FeatureMatrix& X, const std::vector<int>& y,
                               const std::vector<double>& sample_weights, const LogisticParams& params) {
    check_matrix(X, y, sample_weights);
    if (X.rows == 0) throw DataError("logistic_train: empty training set");
    for (int label : y) {
        if (label < 0 || label > 1) throw DataError("logistic_train: labels must be binary (0/1)");
    }
    std::vector<double> weights = sample_weights;
    if (weights.empty()) weights.assign(X.rows, 1.0);

    ClassifierModel model;
    model.n_features = X.cols();
    model.n_classes = 2;
    model.logistic_params = params;

    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (weights[i] <= 0) continue;
        (y[i] == 1 ? has1 : has0) = true;
    }
    if (!has0 || !has1) {
        model.kind = ClassifierKind::constant;
        model.base_probs = {has1 ? 0.0 : 1.0, has1 ? 1.0 : 0.0};
        model.warnings.push_back("training data contains a single class; model predicts it constantly");
        return model;
    }

    // weighted standardization keeps integer weights equivalent to duplication
    const std::size_t d = X.cols();
    std::vector<double> mean(d, 0.0), scale(d, 1.0);
    double total_w = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) total_w += weights[r];
    for (std::size_t r = 0; r < X.rows; ++r) {
        const double* row = X.row_ptr(r);
        for (std::size_t j = 0; j < d; ++j) mean[j] += weights[r] * row[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= total_w;
    std::vector<double> var(d, 0.0);
    for (std::size_t r = 0; r < X.rows; ++r) {
        const double* row = X.row_ptr(r);
        for (std::size_t j = 0; j < d; ++j) {
            const double dx = row[j] - mean[j];
            var[j] += weights[r] * dx * dx;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double s = std::sqrt(var[j] / total_w);
        scale[j] = s > 0 ? s : 1.0;
    }

    FeatureMatrix Z = X;
    for (std::size_t r = 0; r < Z.rows; ++r) {
        for (std::size_t j = 0; j < d; ++j) Z.at(r, j) = (Z.at(r, j) - mean[j]) / scale[j];
    }

    std::vector<double> beta(d, 0.0);
    double bias = 0.0;
    std::vector<double> grad;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        logistic_loss_and_grad(Z, y, weights, beta, bias, params.l2, grad);
        for (std::size_t j = 0; j < d; ++j) beta[j] -= params.learning_rate * grad[j];
        bias -= params.learning_rate * grad[d];
    }

    model.kind = ClassifierKind::logistic;
    model.coef = std::move(beta);
    model.bias = bias;
    model.feature_mean = std::move(mean);
    model.feature_scale = std::move(scale);
    return model;
}

std::vector<double> cross_predict(const FeatureMatrix& X, const std::vector<int>& y, int K,
                                  const CrossPredictParams& params, std::uint64_t seed, int threads) {
    if (K < 2) throw UsageError("cross_predict: K must be >= 2");
    if (static_cast<std::size_t>(K) > X.rows) throw UsageError("cross_predict: K exceeds the sample count");
    const int n_classes = infer_n_classes(y);

    auto assign_folds = [&](std::uint64_t s) {
        std::vector<int> fold_of(X.rows, 0);
        for (int c = 0; c < n_classes; ++c) {
            std::vector<std::uint32_t> members;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (y[i] == c) members.push_back(static_cast<std::uint32_t>(i));
            }
            Rng rng(mix64(s, 0x666f6c64ULL, static_cast<std::uint64_t>(c)));  // "fold"
            for (std::size_t i = members.size(); i > 1; --i) {
                std::swap(members[i - 1], members[rng.next_index(i)]);
            }
            for (std::size_t pos = 0; pos < members.size(); ++pos) {
                fold_of[members[pos]] = static_cast<int>(pos % static_cast<std::size_t>(K));
            }
        }
        return fold_of;
    };
    auto folds_valid = [&](const std::vector<int>& fold_of) {
        // per (fold, class) heldout counts; training misses a class exactly
        // when one fold holds all of it
        std::vector<std::size_t> class_total(static_cast<std::size_t>(n_classes), 0);
        std::vector<std::size_t> held(static_cast<std::size_t>(K) * n_classes, 0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            ++class_total[static_cast<std::size_t>(y[i])];
            ++held[static_cast<std::size_t>(fold_of[i]) * n_classes + static_cast<std::size_t>(y[i])];
        }
        for (int f = 0; f < K; ++f) {
            for (int c = 0; c < n_classes; ++c) {
                const std::size_t h = held[static_cast<std::size_t>(f) * n_classes + static_cast<std::size_t>(c)];
                if (h == class_total[static_cast<std::size_t>(c)] && h > 0) return false;
            }
        }
        return true;
    };

    std::vector<int> fold_of = assign_folds(seed);
    if (!folds_valid(fold_of)) {
        fold_of = assign_folds(mix64(seed, 0x7265747279ULL));  // "retry"
        if (!folds_valid(fold_of)) {
            throw DataError("cross_predict: a fold would exhaust an entire class; use a smaller K");
        }
    }

    std::vector<double> out(X.rows * static_cast<std::size_t>(n_classes), 0.0);
    for (int f = 0; f < K; ++f) {
        std::vector<std::size_t> train_rows, held_rows;
        for (std::size_t i = 0; i < X.rows; ++i) {
            (fold_of[i] == f ? held_rows : train_rows).push_back(i);
        }
        if (held_rows.empty()) continue;
        const FeatureMatrix Xtr = X.select_rows(train_rows);
        const FeatureMatrix Xte = X.select_rows(held_rows);
        std::vector<int> ytr;
        ytr.reserve(train_rows.size());
        for (std::size_t i : train_rows) ytr.push_back(y[i]);

        ClassifierModel model;
        if (params.kind == ClassifierKind::random_forest) {
            ForestParams fp = params.forest;
            fp.seed = mix64(seed, 0x6d6f64656cULL, static_cast<std::uint64_t>(f));  // "model"
            model = rf_train(Xtr, ytr, {}, fp, threads);
        } else {
            model = logistic_train(Xtr, ytr, {}, params.logistic);
        }
        const auto probs = predict_proba(model, Xte, threads);
        const std::size_t model_c = static_cast<std::size_t>(model.n_classes);
        for (std::size_t k = 0; k < held_rows.size(); ++k) {
            for (std::size_t c = 0; c < static_cast<std::size_t>(n_classes); ++c) {
                out[held_rows[k] * n_classes + c] = c < model_c ? probs[k * model_c + c] : 0.0;
            }
        }
    }
    return out;
}

namespace {

void save_params_line(std::ostream& out, const ClassifierModel& model) {
    out << "params " << model.describe() << '\n';
}

}  // namespace

void ClassifierModel::save(std::ostream& out) const {
    out << "pairaudit-model 1\n";
    const char* kind_name = kind == ClassifierKind::random_forest ? "random_forest"
                            : kind == ClassifierKind::logistic    ? "logistic"
                                                                  : "constant";
    out << "kind " << kind_name << '\n';
    out << "classes " << n_classes << '\n';
    out << "features " << n_features << '\n';
    save_params_line(out, *this);
    out << "warnings " << warnings.size() << '\n';
    for (const auto& w : warnings) out << "warning " << w << '\n';
    if (kind == ClassifierKind::constant) {
        out << "base";
        for (double p : base_probs) out << ' ' << format_double(p);
        out << '\n';
        return;
    }
    if (kind == ClassifierKind::logistic) {
        auto line = [&](const char* tag, const std::vector<double>& v) {
            out << tag;
            for (double x : v) out << ' ' << format_double(x);
            out << '\n';
        };
        line("mean", feature_mean);
        line("scale", feature_scale);
        line("coef", coef);
        out << "bias " << format_double(bias) << '\n';
        return;
    }
    out << "trees " << trees.size() << '\n';
    for (std::size_t t = 0; t < trees.size(); ++t) {
        const Tree& tree = trees[t];
        out << "tree " << t << ' ' << tree.nodes.size() << '\n';
        for (const TreeNode& node : tree.nodes) {
            if (node.feature < 0) {
                out << "l";
                const double* p = tree.leaf_probs.data() + node.proba_offset;
                for (int c = 0; c < n_classes; ++c) out << ' ' << format_double(p[c]);
                out << '\n';
            } else {
                out << "n " << node.feature << ' ' << format_double(node.threshold) << ' ' << node.left << ' '
                    << node.right << '\n';
            }
        }
    }
}

ClassifierModel ClassifierModel::load(std::istream& in) {
    auto bad = [](const std::string& why) -> DataError { return DataError("model file: " + why); };
    std::string line;
    if (!std::getline(in, line) || line != "pairaudit-model 1") throw bad("bad header");

    ClassifierModel model;
    std::string kind_name;
    {
        std::string tag;
        in >> tag >> kind_name;
        if (tag != "kind") throw bad("expected kind");
        if (kind_name == "random_forest") model.kind = ClassifierKind::random_forest;
        else if (kind_name == "logistic") model.kind = ClassifierKind::logistic;
        else if (kind_name == "constant") model.kind = ClassifierKind::constant;
        else throw bad("unknown kind " + kind_name);
    }
    std::string tag;
    in >> tag >> model.n_classes;
    if (tag != "classes") throw bad("expected classes");
    in >> tag >> model.n_features;
    if (tag != "features") throw bad("expected features");
    in.ignore();
    if (!std::getline(in, line) || line.rfind("params ", 0) != 0) throw bad("expected params");
    std::size_t n_warnings = 0;
    in >> tag >> n_warnings;
    if (tag != "warnings") throw bad("expected warnings");
    in.ignore();
    for (std::size_t i = 0; i < n_warnings; ++i) {
        if (!std::getline(in, line) || line.rfind("warning ", 0) != 0) throw bad("expected warning line");
        model.warnings.push_back(line.substr(8));
    }

    if (model.kind == ClassifierKind::constant) {
        in >> tag;
        if (tag != "base") throw bad("expected base");
        model.base_probs.resize(static_cast<std::size_t>(model.n_classes));
        for (double& p : model.base_probs) in >> p;
        if (!in) throw bad("truncated base probabilities");
        return model;
    }
    if (model.kind == ClassifierKind::logistic) {
        auto read_vec = [&](const char* expect, std::vector<double>& v) {
            in >> tag;
            if (tag != expect) throw bad(std::string("expected ") + expect);
            v.resize(model.n_features);
            for (double& x : v) in >> x;
        };
        read_vec("mean", model.feature_mean);
        read_vec("scale", model.feature_scale);
        read_vec("coef", model.coef);
        in >> tag >> model.bias;
        if (tag != "bias" || !in) throw bad("expected bias");
        return model;
    }

    std::size_t n_trees = 0;
    in >> tag >> n_trees;
    if (tag != "trees") throw bad("expected trees");
    model.trees.resize(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        std::size_t index = 0, n_nodes = 0;
        in >> tag >> index >> n_nodes;
        if (tag != "tree" || index != t) throw bad("expected tree " + std::to_string(t));
        Tree& tree = model.trees[t];
        tree.nodes.resize(n_nodes);
        for (std::size_t k = 0; k < n_nodes; ++k) {
            in >> tag;
            if (tag == "l") {
                tree.nodes[k].feature = -1;
                tree.nodes[k].proba_offset = static_cast<std::uint32_t>(tree.leaf_probs.size());
                for (int c = 0; c < model.n_classes; ++c) {
                    double p = 0;
                    in >> p;
                    tree.leaf_probs.push_back(p);
                }
            } else if (tag == "n") {
                in >> tree.nodes[k].feature >> tree.nodes[k].threshold >> tree.nodes[k].left >>
                    tree.nodes[k].right;
            } else {
                throw bad("unexpected node tag " + tag);
            }
            if (!in) throw bad("truncated tree " + std::to_string(t));
        }
    }
    return model;
}

}  // namespace pairaudit
