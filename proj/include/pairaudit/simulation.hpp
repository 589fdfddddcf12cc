#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pairaudit/config.hpp"
#include "pairaudit/dataset.hpp"
#include "pairaudit/debias.hpp"

namespace pairaudit {

// Generative oracle: draw (x, y, l, s) with y independent of l (the neutral
// assumption holds by construction) and s drawn from the per-bucket strategy
// alone; a sample is selected iff s == y.
struct SimulationSpec {
    double prior = 0.5;                  // P(Y=1)
    std::vector<double> bucket_probs;    // categorical over strategy buckets
    std::vector<double> strategy;        // g(l) = P(S=1|l) per bucket
    int x_dim = 2;                       // class-conditional Gaussians for x
    double x_separation = 2.0;           // distance between the class means
    std::size_t n = 0;
    std::uint64_t seed = 0;

    enum class FeatureMode { bucket, triple };
    FeatureMode feature_mode = FeatureMode::bucket;

    std::size_t n_buckets() const { return strategy.size(); }
    void validate() const;

    static SimulationSpec from_config(const KeyValueConfig& cfg);
};

struct SimSample {
    std::vector<double> x;
    int y = 0;
    int bucket = 0;
    std::array<double, 3> l_triple{};  // integer-valued leakage-shaped encoding
    int s = 0;
    bool selected = false;  // s == y
};

// Chunked per-seed generation: the result is a pure function of (spec), not of
// any schedule.
std::vector<SimSample> generate(const SimulationSpec& spec);

// Positive fraction among selected samples in the bucket; nullopt when the
// bucket has no selected samples.
std::optional<double> empirical_biased_label_rate(const std::vector<SimSample>& samples, int bucket);

// Closed form for the biased positive rate in a bucket:
// prior*g / (prior*g + (1-prior)*(1-g)).
double analytic_biased_label_rate(double prior, double g);

// Strategy feature matrix over the given samples, per spec.feature_mode:
// the bucket id as one column, or the 3-column triple.
FeatureMatrix strategy_feature_matrix(const SimulationSpec& spec, const std::vector<SimSample>& samples);

struct UnbiasednessCheck {
    double weighted_selected_loss = 0.0;
    double population_loss = 0.0;
    double gap = 0.0;  // weighted - population
    std::size_t n_selected = 0;
};

// Oracle-weighted (w = 1/P(S=y|l), self-normalized) selected-set loss against
// the plain loss over the whole generated population, for a fixed scoring
// function returning the positive-class score.
UnbiasednessCheck check_debias_unbiasedness(const SimulationSpec& spec,
                             const std::function<double(const SimSample&)>& score, Metric loss);

// Same comparison with weights estimated by the full pipeline (cross-predicted
// p_hat on the strategy features, then propensity inversion) instead of the
// oracle strategy.
UnbiasednessCheck check_debias_unbiasedness_estimated(const SimulationSpec& spec,
                                       const std::function<double(const SimSample&)>& score, Metric loss,
                                       const DebiasConfig& config, int threads = 1);

// Pair-structured export fuel: synthetic sentences drawn from per-bucket pools
// whose reuse rates track the bucket, so the selected pairs exhibit the bias in
// their comparison-graph features. Returns records for the SELECTED samples,
// with splits assigned 8:1:1 by ordinal.
std::vector<PairRecord> simulate_pair_records(const SimulationSpec& spec, const LabelSet& labels,
                                              int positive_label);

}  // namespace pairaudit
