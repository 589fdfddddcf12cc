#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pairaudit/forest.hpp"

namespace pairaudit {

// P(S=1|l) from the biased positive rate p_hat = P(Y=1|l on the selected data)
// and the neutral prior P(Y=1):
//
//   P(S=1|l) = (1-prior) * p_hat / [ (1-prior) * p_hat + prior * (1-p_hat) ]
//
// Inputs must already be clamped inside (0, 1).
double propensity_from_biased_rate(double p_hat, double prior);

// Exact algebraic inverse: propensity_from_biased_rate(biased_rate_from_propensity(s, prior), prior) == s.
double biased_rate_from_propensity(double propensity, double prior);

// Finds the prior by bisection so that the weighted positive mass fraction
// equals the empirical positive fraction (the balance function is strictly
// increasing in the prior, so the root is unique). Throws DataError when the
// bracket has no sign change.
double solve_prior(const std::vector<double>& p_hat, const std::vector<int>& labels,
                   double epsilon = 1e-3, double tolerance = 1e-6, int max_iterations = 100);

struct DebiasConfig {
    enum class PriorMode { fixed, solve_for_balance };
    PriorMode prior_mode = PriorMode::solve_for_balance;
    double fixed_prior = 0.5;
    int K = 100;
    double clamp_epsilon = 1e-3;
    double weight_cap = 0.0;  // 0 = off
    CrossPredictParams classifier;
    std::uint64_t seed = 0;
};

struct WeightTable {
    std::vector<std::size_t> pair_ids;
    std::vector<double> p_hat;       // clamped estimate of P(Y=1|l) on the biased data
    std::vector<double> propensity;  // P(S=y|l)
    std::vector<double> weight;      // mean-normalized 1/propensity

    // metadata echoed into the file header
    double prior = 0.5;
    std::string prior_mode = "fixed";
    int K = 0;
    double clamp_epsilon = 0.0;
    double weight_cap = 0.0;
    std::string classifier;
    std::uint64_t seed = 0;
    std::size_t clamped_count = 0;
    double weight_min = 0.0;
    double weight_max = 0.0;
    double weight_mean = 0.0;

    std::size_t size() const { return weight.size(); }

    // TSV with a `# key = value` metadata block, then
    // pair_id / p_hat / propensity / weight columns.
    void save(std::ostream& out) const;
    static WeightTable load(std::istream& in);
};

// Inverted propensities and mean-normalized inverse weights. `labels` are the
// binary projections (1 = positive class). p_hat values are clamped to
// [epsilon, 1-epsilon] first; the clamped count is recorded. The optional cap
// truncates raw inverse weights before normalization.
WeightTable compute_weights(const std::vector<double>& p_hat, const std::vector<int>& labels, double prior,
                            double clamp_epsilon, double weight_cap = 0.0);

// The whole pipeline on an already-extracted strategy feature matrix: K-fold
// cross-predicted p_hat, prior choice, propensity inversion, normalized
// weights.
WeightTable debias_weights(const FeatureMatrix& strategy_features, const std::vector<int>& labels,
                           const DebiasConfig& config, int threads = 1);

enum class Metric { accuracy, zero_one_loss, log_loss };

Metric parse_metric_name(const std::string& name);

// Weighted mean of the per-sample metric: sum(w * m) / sum(w). Predictions are
// positive-class scores; accuracy thresholds at 0.5.
double weighted_metric(const std::vector<double>& predictions, const std::vector<int>& labels,
                       const std::vector<double>& weights, Metric metric);

// n independent draws with replacement, P(i) proportional to weight[i].
std::vector<std::size_t> weight_proportional_resample(const std::vector<std::size_t>& pair_ids,
                                                      const std::vector<double>& weights, std::size_t n,
                                                      std::uint64_t seed);

}  // namespace pairaudit
