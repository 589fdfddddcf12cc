#include "pairaudit/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace pairaudit {

namespace {

constexpr std::size_t kChunkSize = 4096;

int sample_categorical(const std::vector<double>& probs, double total, Rng& rng) {
    const double r = rng.next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (r < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

// bucket -> well-separated integer triple, plus a +/-1 jitter on the first two
// coordinates so the classifier sees more than B distinct points
std::array<double, 3> triple_encoding(int bucket, std::size_t n_buckets, Rng& rng) {
    const double jitter1 = static_cast<double>(rng.next_index(3)) - 1.0;
    const double jitter2 = static_cast<double>(rng.next_index(3)) - 1.0;
    const double base1 = 2.0 + 6.0 * bucket;
    const double base2 = 2.0 + 6.0 * static_cast<double>((bucket + static_cast<int>(n_buckets) / 2) %
                                                         static_cast<int>(n_buckets));
    const double inter = 1.0 + static_cast<double>(bucket % 4);
    return {base1 + jitter1, base2 + jitter2, inter};
}

}  // namespace

void SimulationSpec::validate() const {
    if (strategy.empty()) throw UsageError("simulation: strategy bucket list is empty");
    if (!bucket_probs.empty() && bucket_probs.size() != strategy.size()) {
        throw UsageError("simulation: bucket_probs and strategy must have equal length");
    }
    for (double p : bucket_probs) {
        if (!(p >= 0.0)) throw UsageError("simulation: bucket probabilities must be non-negative");
    }
    for (double g : strategy) {
        if (!(g >= 0.0) || !(g <= 1.0)) throw UsageError("simulation: strategy values must be in [0, 1]");
    }
    if (!(prior > 0.0) || !(prior < 1.0)) throw UsageError("simulation: prior must be in (0, 1)");
    if (x_dim < 1) throw UsageError("simulation: x_dim must be >= 1");
    if (n == 0) throw UsageError("simulation: n must be positive");
}

SimulationSpec SimulationSpec::from_config(const KeyValueConfig& cfg) {
    SimulationSpec spec;
    spec.prior = cfg.get_double("sim.prior", 0.5);
    spec.n = static_cast<std::size_t>(cfg.get_int("sim.n", 100000));
    spec.seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed", 0));
    spec.x_dim = static_cast<int>(cfg.get_int("sim.x_dim", 2));
    spec.x_separation = cfg.get_double("sim.x_separation", 2.0);

    spec.strategy = cfg.get_double_list("sim.strategy");
    if (spec.strategy.empty()) {
        // evenly spread strategies over [lo, hi]
        const long long buckets = cfg.get_int("sim.buckets", 10);
        const double lo = cfg.get_double("sim.strategy_min", 0.1);
        const double hi = cfg.get_double("sim.strategy_max", 0.9);
        if (buckets < 1) throw UsageError("simulation: sim.buckets must be >= 1");
        for (long long b = 0; b < buckets; ++b) {
            const double t = buckets == 1 ? 0.5 : static_cast<double>(b) / static_cast<double>(buckets - 1);
            spec.strategy.push_back(lo + t * (hi - lo));
        }
    }
    spec.bucket_probs = cfg.get_double_list("sim.bucket_probs");

    const std::string mode = cfg.get_string("sim.feature_mode", "bucket");
    if (mode == "bucket") spec.feature_mode = FeatureMode::bucket;
    else if (mode == "triple") spec.feature_mode = FeatureMode::triple;
    else throw UsageError("simulation: sim.feature_mode must be bucket or triple");

    spec.validate();
    return spec;
}

std::vector<SimSample> generate(const SimulationSpec& spec) {
    spec.validate();
    const std::size_t B = spec.n_buckets();
    std::vector<double> bucket_probs = spec.bucket_probs;
    if (bucket_probs.empty()) bucket_probs.assign(B, 1.0);
    double bucket_total = 0.0;
    for (double p : bucket_probs) bucket_total += p;
    if (!(bucket_total > 0.0)) throw UsageError("simulation: bucket probabilities sum to zero");

    std::vector<SimSample> samples(spec.n);
    const std::size_t n_chunks = (spec.n + kChunkSize - 1) / kChunkSize;
    for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
        Rng rng(mix64(spec.seed, 0x73696dULL, chunk));  // "sim"
        const std::size_t begin = chunk * kChunkSize;
        const std::size_t end = std::min(spec.n, begin + kChunkSize);
        for (std::size_t i = begin; i < end; ++i) {
            SimSample& sample = samples[i];
            sample.bucket = sample_categorical(bucket_probs, bucket_total, rng);
            sample.y = rng.next_bernoulli(spec.prior) ? 1 : 0;
            sample.s = rng.next_bernoulli(spec.strategy[static_cast<std::size_t>(sample.bucket)]) ? 1 : 0;
            sample.selected = sample.s == sample.y;
            sample.l_triple = triple_encoding(sample.bucket, B, rng);
            sample.x.resize(static_cast<std::size_t>(spec.x_dim));
            const double shift = (sample.y == 1 ? 0.5 : -0.5) * spec.x_separation;
            for (int d = 0; d < spec.x_dim; ++d) {
                sample.x[static_cast<std::size_t>(d)] = rng.next_gaussian() + (d == 0 ? shift : 0.0);
            }
        }
    }
    return samples;
}

std::optional<double> empirical_biased_label_rate(const std::vector<SimSample>& samples, int bucket) {
    std::size_t n = 0, positives = 0;
    for (const auto& sample : samples) {
        if (!sample.selected || sample.bucket != bucket) continue;
        ++n;
        positives += sample.y == 1 ? 1 : 0;
    }
    if (n == 0) return std::nullopt;
    return static_cast<double>(positives) / static_cast<double>(n);
}

double analytic_biased_label_rate(double prior, double g) {
    return prior * g / (prior * g + (1.0 - prior) * (1.0 - g));
}

FeatureMatrix strategy_feature_matrix(const SimulationSpec& spec, const std::vector<SimSample>& samples) {
    if (spec.feature_mode == SimulationSpec::FeatureMode::bucket) {
        auto m = FeatureMatrix::with_columns({"bucket"}, samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) m.at(i, 0) = samples[i].bucket;
        return m;
    }
    auto m = FeatureMatrix::with_columns({"s1_freq", "s2_freq", "s1s2_inter"}, samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) m.at(i, c) = samples[i].l_triple[c];
    }
    return m;
}

namespace {

UnbiasednessCheck compare_losses(const std::vector<SimSample>& samples,
                            const std::function<double(const SimSample&)>& score, Metric loss,
                            const std::function<double(std::size_t, const SimSample&)>& weight_of) {
    std::vector<double> population_scores;
    std::vector<int> population_labels;
    std::vector<double> selected_scores;
    std::vector<int> selected_labels;
    std::vector<double> selected_weights;
    population_scores.reserve(samples.size());
    population_labels.reserve(samples.size());
    std::size_t selected_index = 0;
    for (const auto& sample : samples) {
        const double s = score(sample);
        population_scores.push_back(s);
        population_labels.push_back(sample.y);
        if (sample.selected) {
            selected_scores.push_back(s);
            selected_labels.push_back(sample.y);
            selected_weights.push_back(weight_of(selected_index, sample));
            ++selected_index;
        }
    }
    UnbiasednessCheck check;
    check.n_selected = selected_scores.size();
    const std::vector<double> unit(population_scores.size(), 1.0);
    check.population_loss = weighted_metric(population_scores, population_labels, unit, loss);
    check.weighted_selected_loss = weighted_metric(selected_scores, selected_labels, selected_weights, loss);
    check.gap = check.weighted_selected_loss - check.population_loss;
    return check;
}

}  // namespace

UnbiasednessCheck check_debias_unbiasedness(const SimulationSpec& spec, const std::function<double(const SimSample&)>& score,
                             Metric loss) {
    const auto samples = generate(spec);
    return compare_losses(samples, score, loss, [&](std::size_t, const SimSample& sample) {
        const double g = spec.strategy[static_cast<std::size_t>(sample.bucket)];
        const double propensity = sample.y == 1 ? g : 1.0 - g;
        if (!(propensity > 0.0)) throw DataError("check_debias_unbiasedness: zero-propensity selected sample");
        return 1.0 / propensity;
    });
}

UnbiasednessCheck check_debias_unbiasedness_estimated(const SimulationSpec& spec,
                                       const std::function<double(const SimSample&)>& score, Metric loss,
                                       const DebiasConfig& config, int threads) {
    const auto samples = generate(spec);
    std::vector<SimSample> selected;
    for (const auto& sample : samples) {
        if (sample.selected) selected.push_back(sample);
    }
    if (selected.empty()) throw DataError("check_debias_unbiasedness: nothing selected");
    const FeatureMatrix features = strategy_feature_matrix(spec, selected);
    std::vector<int> labels;
    labels.reserve(selected.size());
    for (const auto& sample : selected) labels.push_back(sample.y);
    const WeightTable weights = debias_weights(features, labels, config, threads);
    return compare_losses(samples, score, loss,
                          [&](std::size_t i, const SimSample&) { return weights.weight[i]; });
}

std::vector<PairRecord> simulate_pair_records(const SimulationSpec& spec, const LabelSet& labels,
                                              int positive_label) {
    spec.validate();
    if (labels.size() != 2) throw UsageError("simulate: pair export needs a binary label set");
    const int negative_label = positive_label == 0 ? 1 : 0;

    const auto samples = generate(spec);
    const std::size_t B = spec.n_buckets();

    // Sentence pools sized inversely to bucket rank: later buckets reuse a
    // smaller pool, so their sentences occur more often in the output.
    std::vector<std::size_t> pool_size(B);
    std::size_t expected_selected = std::max<std::size_t>(1, samples.size() / (2 * B));
    for (std::size_t b = 0; b < B; ++b) {
        const std::size_t reuse = 1 + 3 * b;  // target mean occurrences for bucket b
        pool_size[b] = std::max<std::size_t>(1, expected_selected / reuse);
    }

    std::vector<PairRecord> records;
    Rng rng(mix64(spec.seed, 0x706f6f6cULL));  // "pool"
    std::size_t emitted = 0;
    for (const auto& sample : samples) {
        if (!sample.selected) continue;
        const std::size_t b = static_cast<std::size_t>(sample.bucket);
        const std::size_t b2 = (b + B / 2) % B;
        PairRecord rec;
        rec.pair_id = emitted;
        rec.s1_text = "q" + std::to_string(b) + "_" + std::to_string(rng.next_index(pool_size[b]));
        rec.s2_text = "q" + std::to_string(b2) + "_" + std::to_string(rng.next_index(pool_size[b2])) + "x";
        rec.label = sample.y == 1 ? positive_label : negative_label;
        const std::size_t slot = emitted % 10;
        rec.split = slot < 8 ? Split::train : (slot == 8 ? Split::validation : Split::test);
        records.push_back(std::move(rec));
        ++emitted;
    }
    return records;
}

}  // namespace pairaudit
