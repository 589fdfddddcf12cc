#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pairaudit/features.hpp"

namespace pairaudit {

struct ForestParams {
    int n_trees = 200;
    int max_depth = 30;
    int min_leaf = 5;
    int mtry = 0;  // 0 = ceil(sqrt(d))
    std::uint64_t seed = 0;

    std::string describe() const;
};

struct LogisticParams {
    double learning_rate = 0.1;
    int epochs = 2000;
    double l2 = 1e-6;

    std::string describe() const;
};

enum class ClassifierKind { random_forest, logistic, constant };

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t proba_offset = 0;  // into Tree::leaf_probs when leaf
};

struct Tree {
    std::vector<TreeNode> nodes;
    std::vector<double> leaf_probs;
};

// One trained classifier. Forests hold CART trees grown on weighted Gini
// impurity from weight-proportional bootstrap samples; the logistic model keeps
// its standardization so predictions are self-contained; constant models arise
// from single-class inputs.
struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::constant;
    int n_classes = 0;
    std::size_t n_features = 0;
    std::vector<std::string> warnings;

    std::vector<Tree> trees;
    ForestParams forest_params;

    std::vector<double> coef;  // standardized space
    double bias = 0.0;
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    LogisticParams logistic_params;

    std::vector<double> base_probs;  // constant model

    std::string describe() const;

    // Line-oriented text format ("pairaudit-model 1" header; one node per line
    // for trees) so trained audits can be re-scored without retraining.
    void save(std::ostream& out) const;
    static ClassifierModel load(std::istream& in);
};

// Grows `n_trees` CART trees: bootstrap draws proportional to sample weight,
// weighted Gini split quality, mtry features per split, midpoint thresholds,
// ties toward the lower feature index then the lower threshold. Trees train
// independently from (seed, tree index) streams and node-level draws come from
// (tree, node path) streams, so results do not depend on thread count and
// deepening max_depth only extends existing trees.
//
// Labels must be 0..C-1 with C >= 2 present; single-class input degenerates to
// a constant model with a warning. NaN features are fatal.
ClassifierModel rf_train(const FeatureMatrix& X, const std::vector<int>& y,
                         const std::vector<double>& sample_weights, const ForestParams& params,
                         int threads = 1);

// Weighted cross-entropy + L2 via full-batch gradient descent on internally
// standardized features (weighted moments, so integer weights match sample
// duplication exactly).
ClassifierModel logistic_train(const FeatureMatrix& X, const std::vector<int>& y,
                               const std::vector<double>& sample_weights, const LogisticParams& params);

// Rows sum to 1; forest rows average per-tree leaf fractions.
std::vector<double> predict_proba(const ClassifierModel& model, const FeatureMatrix& X, int threads = 1);

// argmax with ties toward the lower class index
std::vector<int> predict_label(const ClassifierModel& model, const FeatureMatrix& X, int threads = 1);

// Loss/gradient of the weighted logistic objective at (beta, bias) on X as
// given (no standardization); grad has d+1 entries, bias last.
double logistic_loss_and_grad(const FeatureMatrix& X, const std::vector<int>& y,
                              const std::vector<double>& weights, const std::vector<double>& beta,
                              double bias, double l2, std::vector<double>& grad);

struct CrossPredictParams {
    ClassifierKind kind = ClassifierKind::random_forest;
    ForestParams forest;
    LogisticParams logistic;

    std::string describe() const;
};

// Out-of-fold class probabilities (n x n_classes, row-major). Folds are
// stratified by label from `seed`; if some fold's training side would miss a
// class entirely the assignment is redrawn once before giving up.
std::vector<double> cross_predict(const FeatureMatrix& X, const std::vector<int>& y, int K,
                                  const CrossPredictParams& params, std::uint64_t seed, int threads = 1);

}  // namespace pairaudit
