#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pairaudit/debias.hpp"

using namespace pairaudit;

TEST_CASE("propensity formula on hand-evaluated points") {
    CHECK(propensity_from_biased_rate(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(propensity_from_biased_rate(0.6, 0.3) == doctest::Approx(0.42 / 0.54).epsilon(1e-12));
    // degenerate endpoints approached from inside
    CHECK(propensity_from_biased_rate(1.0 - 1e-12, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(propensity_from_biased_rate(1e-12, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(propensity_from_biased_rate(0.0, 0.5), DataError);
    CHECK_THROWS_AS(propensity_from_biased_rate(0.5, 1.0), DataError);
}

TEST_CASE("inverse formula on hand-evaluated points") {
    CHECK(biased_rate_from_propensity(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(biased_rate_from_propensity(0.42 / 0.54, 0.3) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("round trip of the propensity inversion over 10000 random pairs") {
    // over the clamped operational domain; see the acceptance suite
    Rng rng(2718);
    for (int i = 0; i < 10000; ++i) {
        const double p = 1e-3 + rng.next_double() * (1.0 - 2e-3);
        const double prior = 1e-3 + rng.next_double() * (1.0 - 2e-3);
        const double s = propensity_from_biased_rate(p, prior);
        CHECK(std::fabs(biased_rate_from_propensity(s, prior) - p) <= 1e-12);
    }
}

TEST_CASE("propensity is monotone in p_hat and in 1-prior") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double prior = 0.05 + rng.next_double() * 0.9;
        const double a = 0.01 + rng.next_double() * 0.49;
        const double b = a + 0.2;
        CHECK(propensity_from_biased_rate(a, prior) < propensity_from_biased_rate(b, prior));
        const double p = 0.05 + rng.next_double() * 0.9;
        CHECK(propensity_from_biased_rate(p, 0.3) > propensity_from_biased_rate(p, 0.6));
    }
}

TEST_CASE("solve_prior finds the fixed point when p_hat equals the positive fraction") {
    // 40% positives, p_hat identically 0.4: prior 0.4 gives uniform weights
    std::vector<double> p_hat(100, 0.4);
    std::vector<int> labels(100);
    for (std::size_t i = 0; i < 40; ++i) labels[i] = 1;
    const double prior = solve_prior(p_hat, labels);
    CHECK(prior == doctest::Approx(0.4).epsilon(1e-4));
    const auto table = compute_weights(p_hat, labels, prior, 1e-3);
    for (double w : table.weight) CHECK(w == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solve_prior recovers a simulated generating prior") {
    // two buckets with known strategies; p_hat set to the analytic biased rate
    const double true_prior = 0.35;
    const double g[2] = {0.7, 0.25};
    Rng rng(11);
    std::vector<double> p_hat;
    std::vector<int> labels;
    for (int i = 0; i < 20000; ++i) {
        const int bucket = static_cast<int>(rng.next_index(2));
        const double rate =
            true_prior * g[bucket] / (true_prior * g[bucket] + (1 - true_prior) * (1 - g[bucket]));
        p_hat.push_back(rate);
        labels.push_back(rng.next_bernoulli(rate) ? 1 : 0);
    }
    const double solved = solve_prior(p_hat, labels);
    CHECK(std::fabs(solved - true_prior) <= 0.01);
}

TEST_CASE("the balance residual crosses zero exactly once") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p_hat;
        std::vector<int> labels;
        for (int i = 0; i < 400; ++i) {
            p_hat.push_back(0.02 + rng.next_double() * 0.96);
            labels.push_back(rng.next_bernoulli(0.5) ? 1 : 0);
        }
        const double prior = solve_prior(p_hat, labels);
        // dense scan: the weighted positive share minus the target changes sign
        // exactly once, at the solved prior
        auto residual = [&](double candidate) {
            const auto table = compute_weights(p_hat, labels, candidate, 1e-6);
            double pos = 0, total = 0;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                total += table.weight[i];
                if (labels[i] == 1) pos += table.weight[i];
            }
            std::size_t positives = 0;
            for (int label : labels) positives += label;
            return pos / total - static_cast<double>(positives) / static_cast<double>(labels.size());
        };
        int sign_changes = 0;
        double previous = residual(0.01);
        for (double x = 0.02; x < 0.995; x += 0.01) {
            const double current = residual(x);
            if ((previous < 0) != (current < 0)) ++sign_changes;
            previous = current;
        }
        CAPTURE(trial);
        CHECK(sign_changes == 1);
        CHECK(residual(prior) == doctest::Approx(0.0).epsilon(1e-5));
    }
}

TEST_CASE("neutral inputs give unit weights; statistics are recorded") {
    std::vector<double> p_hat(50, 0.5);
    std::vector<int> labels(50);
    for (std::size_t i = 0; i < 25; ++i) labels[i] = 1;
    const auto table = compute_weights(p_hat, labels, 0.5, 1e-3);
    for (double w : table.weight) CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(table.weight_mean == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(table.weight_min == doctest::Approx(1.0));
    CHECK(table.weight_max == doctest::Approx(1.0));
    CHECK(table.clamped_count == 0);
}

TEST_CASE("weights normalize to mean one and stay positive") {
    Rng rng(23);
    std::vector<double> p_hat;
    std::vector<int> labels;
    for (int i = 0; i < 1000; ++i) {
        p_hat.push_back(rng.next_double());  // includes values outside the clamp range
        labels.push_back(rng.next_bernoulli(0.4) ? 1 : 0);
    }
    const auto table = compute_weights(p_hat, labels, 0.37, 1e-3);
    double mean = 0;
    for (double w : table.weight) {
        CHECK(w > 0.0);
        mean += w;
    }
    mean /= static_cast<double>(table.size());
    CHECK(std::fabs(mean - 1.0) <= 1e-9);
    CHECK(table.clamped_count > 0);

    // a cap truncates the raw inverse weights
    const auto capped = compute_weights(p_hat, labels, 0.37, 1e-3, 5.0);
    CHECK(capped.weight_max <= table.weight_max);
}

TEST_CASE("after solve_prior the weighted positive mass matches the sample share") {
    Rng rng(31);
    std::vector<double> p_hat;
    std::vector<int> labels;
    for (int i = 0; i < 3000; ++i) {
        const double rate = 0.1 + 0.8 * rng.next_double();
        p_hat.push_back(rate);
        labels.push_back(rng.next_bernoulli(rate) ? 1 : 0);
    }
    const double prior = solve_prior(p_hat, labels);
    const auto table = compute_weights(p_hat, labels, prior, 1e-3);
    double pos = 0, total = 0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        total += table.weight[i];
        if (labels[i] == 1) {
            pos += table.weight[i];
            ++positives;
        }
    }
    const double share = static_cast<double>(positives) / static_cast<double>(labels.size());
    CHECK(std::fabs(pos / total - share) <= 1e-4);
}

TEST_CASE("weighted metrics reduce to plain metrics under uniform weights") {
    const std::vector<double> preds{0.9, 0.2, 0.7, 0.4};
    const std::vector<int> labels{1, 0, 0, 1};
    const std::vector<double> unit(4, 1.0);
    CHECK(weighted_metric(preds, labels, unit, Metric::accuracy) == doctest::Approx(0.5));
    CHECK(weighted_metric(preds, labels, unit, Metric::zero_one_loss) == doctest::Approx(0.5));

    // all weight on one correct sample
    const std::vector<double> focused{1.0, 1e-12, 1e-12, 1e-12};
    CHECK(weighted_metric(preds, labels, focused, Metric::accuracy) == doctest::Approx(1.0).epsilon(1e-9));

    const std::vector<double> zeros(4, 0.0);
    CHECK_THROWS_AS(weighted_metric(preds, labels, zeros, Metric::accuracy), DataError);
}

TEST_CASE("log loss matches a direct evaluation") {
    const std::vector<double> preds{0.8, 0.3};
    const std::vector<int> labels{1, 0};
    const std::vector<double> unit(2, 1.0);
    const double expected = (-std::log(0.8) - std::log(0.7)) / 2.0;
    CHECK(weighted_metric(preds, labels, unit, Metric::log_loss) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("resampling follows the weights") {
    const std::vector<std::size_t> ids{10, 20};
    const std::vector<double> weights{1.0, 3.0};
    const auto draws = weight_proportional_resample(ids, weights, 100000, 5);
    std::size_t second = 0;
    for (std::size_t id : draws) second += id == 20 ? 1 : 0;
    const double ratio = static_cast<double>(second) / static_cast<double>(draws.size());
    CHECK(std::fabs(ratio - 0.75) <= 0.015);  // 1:3 within two percent of the mass

    const auto again = weight_proportional_resample(ids, weights, 100000, 5);
    CHECK(draws == again);

    // uniform weights: inclusion frequencies uniform within MC tolerance
    const std::vector<std::size_t> many{0, 1, 2, 3};
    const auto uniform = weight_proportional_resample(many, {1, 1, 1, 1}, 80000, 6);
    std::array<std::size_t, 4> counts{};
    for (std::size_t id : uniform) ++counts[id];
    for (std::size_t c : counts) {
        CHECK(std::fabs(static_cast<double>(c) / 80000.0 - 0.25) <= 0.01);
    }
}

TEST_CASE("weight table save/load round trip") {
    std::vector<double> p_hat{0.2, 0.8, 0.55};
    std::vector<int> labels{0, 1, 1};
    WeightTable table = compute_weights(p_hat, labels, 0.5, 1e-3);
    table.pair_ids = {7, 8, 9};
    table.prior_mode = "solve_for_balance";
    table.K = 10;
    table.classifier = "random_forest(n_trees=5)";
    table.seed = 424242;

    std::ostringstream out;
    table.save(out);
    std::istringstream in(out.str());
    const WeightTable loaded = WeightTable::load(in);
    CHECK(loaded.pair_ids == table.pair_ids);
    CHECK(loaded.weight == table.weight);
    CHECK(loaded.p_hat == table.p_hat);
    CHECK(loaded.propensity == table.propensity);
    CHECK(loaded.prior == table.prior);
    CHECK(loaded.prior_mode == table.prior_mode);
    CHECK(loaded.K == table.K);
    CHECK(loaded.seed == table.seed);

    std::istringstream bad("pair_id\tweight\n");
    CHECK_THROWS_AS(WeightTable::load(bad), DataError);
}
