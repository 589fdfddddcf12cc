#include "pairaudit/debias.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pairaudit {

namespace {

void check_probability(double v, const char* what) {
    if (!(v > 0.0) || !(v < 1.0)) {
        throw DataError(std::string(what) + " out of range (0, 1): " + format_double(v));
    }
}

double clamp_unit(double v, double epsilon) { return std::clamp(v, epsilon, 1.0 - epsilon); }

// positive weight share minus the positive sample share, as a function of the
// assumed prior; strictly increasing in the prior
double balance_residual(const std::vector<double>& p_hat, const std::vector<int>& labels, double prior,
                        double positive_fraction) {
    double pos_w = 0.0, total_w = 0.0;
    for (std::size_t i = 0; i < p_hat.size(); ++i) {
        const double s = propensity_from_biased_rate(p_hat[i], prior);
        const double propensity = labels[i] == 1 ? s : 1.0 - s;
        const double w = 1.0 / propensity;
        total_w += w;
        if (labels[i] == 1) pos_w += w;
    }
    return pos_w / total_w - positive_fraction;
}

}  // namespace

double propensity_from_biased_rate(double p_hat, double prior) {
    check_probability(p_hat, "p_hat");
    check_probability(prior, "prior");
    const double numerator = (1.0 - prior) * p_hat;
    return numerator / (numerator + prior * (1.0 - p_hat));
}

double biased_rate_from_propensity(double propensity, double prior) {
    check_probability(propensity, "propensity");
    check_probability(prior, "prior");
    const double numerator = prior * propensity;
    return numerator / (numerator + (1.0 - prior) * (1.0 - propensity));
}

double solve_prior(const std::vector<double>& p_hat, const std::vector<int>& labels, double epsilon,
                   double tolerance, int max_iterations) {
    if (p_hat.size() != labels.size() || p_hat.empty()) throw DataError("solve_prior: empty or misaligned input");
    std::size_t positives = 0;
    for (int label : labels) positives += label == 1 ? 1 : 0;
    if (positives == 0 || positives == labels.size()) {
        throw DataError("solve_prior: both classes must be present");
    }
    const double positive_fraction = static_cast<double>(positives) / static_cast<double>(labels.size());

    double lo = epsilon, hi = 1.0 - epsilon;
    double f_lo = balance_residual(p_hat, labels, lo, positive_fraction);
    double f_hi = balance_residual(p_hat, labels, hi, positive_fraction);
    if (f_lo > 0.0 || f_hi < 0.0) {
        std::ostringstream ss;
        ss << "solve_prior: no sign change on bracket [" << lo << ", " << hi << "]: residuals " << f_lo
           << " / " << f_hi << ", positive fraction " << positive_fraction << ", n " << labels.size();
        throw DataError(ss.str());
    }
    double mid = 0.5;
    for (int it = 0; it < max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        const double f_mid = balance_residual(p_hat, labels, mid, positive_fraction);
        if (std::fabs(f_mid) < tolerance) return mid;
        if (f_mid < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

WeightTable compute_weights(const std::vector<double>& p_hat, const std::vector<int>& labels, double prior,
                            double clamp_epsilon, double weight_cap) {
    if (p_hat.size() != labels.size() || p_hat.empty()) {
        throw DataError("compute_weights: empty or misaligned input");
    }
    if (!(clamp_epsilon > 0.0) || !(clamp_epsilon < 0.5)) {
        throw UsageError("compute_weights: clamp_epsilon must be in (0, 0.5)");
    }
    check_probability(prior, "prior");

    WeightTable table;
    table.prior = prior;
    table.clamp_epsilon = clamp_epsilon;
    table.weight_cap = weight_cap;
    const std::size_t n = p_hat.size();
    table.pair_ids.resize(n);
    table.p_hat.resize(n);
    table.propensity.resize(n);
    table.weight.resize(n);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        table.pair_ids[i] = i;
        const double clamped = clamp_unit(p_hat[i], clamp_epsilon);
        if (clamped != p_hat[i]) ++table.clamped_count;
        table.p_hat[i] = clamped;
        const double s = propensity_from_biased_rate(clamped, prior);
        const double propensity = labels[i] == 1 ? s : 1.0 - s;
        table.propensity[i] = propensity;
        double w = 1.0 / propensity;
        if (weight_cap > 0.0) w = std::min(w, weight_cap);
        table.weight[i] = w;
        total += w;
    }
    const double mean = total / static_cast<double>(n);
    double w_min = table.weight[0] / mean, w_max = table.weight[0] / mean, w_sum = 0.0;
    for (double& w : table.weight) {
        w /= mean;
        w_min = std::min(w_min, w);
        w_max = std::max(w_max, w);
        w_sum += w;
    }
    table.weight_min = w_min;
    table.weight_max = w_max;
    table.weight_mean = w_sum / static_cast<double>(n);
    return table;
}

WeightTable debias_weights(const FeatureMatrix& strategy_features, const std::vector<int>& labels,
                           const DebiasConfig& config, int threads) {
    for (int label : labels) {
        if (label != 0 && label != 1) {
            throw DataError("debias: labels must be projected to binary (positive = 1) first");
        }
    }
    const auto probs = cross_predict(strategy_features, labels, config.K, config.classifier, config.seed,
                                     threads);
    std::vector<double> p_hat(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        p_hat[i] = clamp_unit(probs[i * 2 + 1], config.clamp_epsilon);
    }

    double prior = config.fixed_prior;
    std::string prior_mode = "fixed";
    if (config.prior_mode == DebiasConfig::PriorMode::solve_for_balance) {
        prior = solve_prior(p_hat, labels, config.clamp_epsilon);
        prior_mode = "solve_for_balance";
    }

    WeightTable table = compute_weights(p_hat, labels, prior, config.clamp_epsilon, config.weight_cap);
    table.prior_mode = prior_mode;
    table.K = config.K;
    table.classifier = config.classifier.describe();
    table.seed = config.seed;
    return table;
}

Metric parse_metric_name(const std::string& name) {
    if (name == "accuracy") return Metric::accuracy;
    if (name == "zero_one_loss") return Metric::zero_one_loss;
    if (name == "log_loss") return Metric::log_loss;
    throw UsageError("unknown metric `" + name + "`");
}

double weighted_metric(const std::vector<double>& predictions, const std::vector<int>& labels,
                       const std::vector<double>& weights, Metric metric) {
    if (predictions.size() != labels.size() || predictions.size() != weights.size()) {
        throw DataError("weighted_metric: misaligned inputs");
    }
    double total_w = 0.0, total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double w = weights[i];
        const int predicted = predictions[i] > 0.5 ? 1 : 0;
        double m = 0.0;
        switch (metric) {
            case Metric::accuracy: m = predicted == labels[i] ? 1.0 : 0.0; break;
            case Metric::zero_one_loss: m = predicted == labels[i] ? 0.0 : 1.0; break;
            case Metric::log_loss: {
                const double p = std::clamp(predictions[i], 1e-15, 1.0 - 1e-15);
                m = labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
                break;
            }
        }
        total += w * m;
        total_w += w;
    }
    if (!(total_w > 0.0)) throw DataError("weighted_metric: total weight is zero");
    return total / total_w;
}

std::vector<std::size_t> weight_proportional_resample(const std::vector<std::size_t>& pair_ids,
                                                      const std::vector<double>& weights, std::size_t n,
                                                      std::uint64_t seed) {
    if (pair_ids.size() != weights.size() || pair_ids.empty()) {
        throw DataError("resample: empty or misaligned input");
    }
    std::vector<double> cumulative(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) throw DataError("resample: weights must be positive");
        acc += weights[i];
        cumulative[i] = acc;
    }
    Rng rng(seed);
    std::vector<std::size_t> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = rng.next_double() * acc;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        out[k] = pair_ids[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                pair_ids.size() - 1)];
    }
    return out;
}

void WeightTable::save(std::ostream& out) const {
    out << "# pairaudit-weights 1\n";
    out << "# n = " << size() << '\n';
    out << "# prior = " << format_double(prior) << '\n';
    out << "# prior_mode = " << prior_mode << '\n';
    out << "# K = " << K << '\n';
    out << "# clamp_epsilon = " << format_double(clamp_epsilon) << '\n';
    out << "# weight_cap = " << format_double(weight_cap) << '\n';
    out << "# classifier = " << classifier << '\n';
    out << "# seed = " << seed << '\n';
    out << "# clamped_count = " << clamped_count << '\n';
    out << "# weight_min = " << format_double(weight_min) << '\n';
    out << "# weight_max = " << format_double(weight_max) << '\n';
    out << "# weight_mean = " << format_double(weight_mean) << '\n';
    out << "pair_id\tp_hat\tpropensity\tweight\n";
    for (std::size_t i = 0; i < size(); ++i) {
        out << pair_ids[i] << '\t' << format_double(p_hat[i]) << '\t' << format_double(propensity[i]) << '\t'
            << format_double(weight[i]) << '\n';
    }
}

WeightTable WeightTable::load(std::istream& in) {
    WeightTable table;
    std::string line;
    bool header_seen = false;
    bool magic_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (body.rfind(" pairaudit-weights", 0) == 0) {
                magic_seen = true;
                continue;
            }
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos) continue;
            auto strip = [](std::string s) {
                while (!s.empty() && s.front() == ' ') s.erase(s.begin());
                while (!s.empty() && s.back() == ' ') s.pop_back();
                return s;
            };
            const std::string key = strip(body.substr(0, eq));
            const std::string value = strip(body.substr(eq + 1));
            try {
                if (key == "prior") table.prior = std::stod(value);
                else if (key == "prior_mode") table.prior_mode = value;
                else if (key == "K") table.K = std::stoi(value);
                else if (key == "clamp_epsilon") table.clamp_epsilon = std::stod(value);
                else if (key == "weight_cap") table.weight_cap = std::stod(value);
                else if (key == "classifier") table.classifier = value;
                else if (key == "seed") table.seed = std::stoull(value);
                else if (key == "clamped_count") table.clamped_count = std::stoull(value);
                else if (key == "weight_min") table.weight_min = std::stod(value);
                else if (key == "weight_max") table.weight_max = std::stod(value);
                else if (key == "weight_mean") table.weight_mean = std::stod(value);
            } catch (const std::exception&) {
                throw DataError("weights file: bad metadata line: " + line);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "pair_id\tp_hat\tpropensity\tweight") {
                throw DataError("weights file: unexpected column header: " + line);
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_string(line, '\t');
        if (fields.size() != 4) throw DataError("weights file: expected 4 columns: " + line);
        try {
            table.pair_ids.push_back(std::stoull(fields[0]));
            table.p_hat.push_back(std::stod(fields[1]));
            table.propensity.push_back(std::stod(fields[2]));
            table.weight.push_back(std::stod(fields[3]));
        } catch (const std::exception&) {
            throw DataError("weights file: bad row: " + line);
        }
    }
    if (!magic_seen || !header_seen) throw DataError("weights file: missing header");
    return table;
}

}  // namespace pairaudit
