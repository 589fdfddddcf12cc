#include "pairaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pairaudit {

namespace {

constexpr std::uint64_t kEmbedTag = 0x656d626564ULL;    // "embed"
constexpr std::uint64_t kDebiasTag = 0x646562696173ULL;  // "debias"
constexpr std::uint64_t kMethodTag = 0x6d657468ULL;      // "meth"

std::string percent(double fraction) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(2);
    ss << fraction;
    return ss.str();
}

}  // namespace

int RunConfig::positive_label() const {
    if (positive_label_name.empty()) return -1;
    return labels.index_of(positive_label_name);
}

ordered_json RunConfig::echo() const {
    ordered_json j;
    j["format"] = format_name(format);
    j["schema"] = {
        {"header", schema.header},
        {"s1", schema.s1.by_index() ? std::to_string(schema.s1.index) : schema.s1.name},
        {"s2", schema.s2.by_index() ? std::to_string(schema.s2.index) : schema.s2.name},
        {"label", schema.label.by_index() ? std::to_string(schema.label.index) : schema.label.name},
        {"split", schema.split ? ordered_json(schema.split->by_index() ? std::to_string(schema.split->index)
                                                                       : schema.split->name)
                               : ordered_json(nullptr)},
    };
    j["labels"] = labels.names;
    j["positive_label"] = positive_label_name.empty() ? ordered_json(nullptr) : ordered_json(positive_label_name);
    j["files"] = {
        {"data", data_file},
        {"train", train_file},
        {"validation", validation_file},
        {"test", test_file},
    };
    j["normalize"] = {{"trim", normalize.trim}, {"lowercase", normalize.lowercase}, {"nfc", normalize.nfc}};
    j["tokenizer"] = {{"lowercase", tokenizer.lowercase}};
    j["bleu"] = {{"s2_as_hypothesis", bleu_s2_as_hypothesis},
                 {"variant", "individual n-gram precision, epsilon 1e-9 smoothing, brevity penalty"}};
    std::vector<std::string> scope_names;
    for (Split s : graph_scope) scope_names.push_back(split_name(s));
    j["graph"] = {{"scope", scope_names}, {"khop_within", khop_within}};
    j["embeddings"] = {{"dim", embed.dim},
                       {"walks_per_node", embed.walks_per_node},
                       {"walk_length", embed.walk_length},
                       {"window", embed.window},
                       {"negatives", embed.negatives},
                       {"epochs", embed.epochs},
                       {"learning_rate", embed.learning_rate}};
    j["random_forest"] = {{"n_trees", rf.n_trees},
                          {"max_depth", rf.max_depth},
                          {"min_leaf", rf.min_leaf},
                          {"mtry", rf.mtry == 0 ? ordered_json("sqrt") : ordered_json(rf.mtry)}};
    j["logistic"] = {{"learning_rate", logit.learning_rate}, {"epochs", logit.epochs}, {"l2", logit.l2}};
    j["debias"] = {
        {"K", debias.K},
        {"prior_mode", debias.prior_mode == DebiasConfig::PriorMode::fixed ? "fixed" : "solve_for_balance"},
        {"fixed_prior", debias.fixed_prior},
        {"clamp_epsilon", debias.clamp_epsilon},
        {"weight_cap", debias.weight_cap},
        {"classifier",
         debias.classifier.kind == ClassifierKind::random_forest ? "random_forest" : "logistic"},
    };
    j["audit"] = {{"distribution_buckets", distribution_buckets},
                  {"grid_cap", grid_cap},
                  {"diagnostic_classifier", diagnostic_classifier},
                  {"diagnostic_bucket_cap", diagnostic_bucket_cap},
                  {"include_ablation", include_ablation}};
    j["seed"] = seed;
    j["threads"] = threads;
    return j;
}

RunConfig load_run_config(const KeyValueConfig& cfg) {
    RunConfig rc;
    rc.format = parse_format_name(cfg.get_string("format", "tsv"));
    rc.schema.header = cfg.get_bool("header", true);
    rc.schema.s1 = ColumnRef::parse(cfg.get_string("col.s1", "s1"));
    rc.schema.s2 = ColumnRef::parse(cfg.get_string("col.s2", "s2"));
    rc.schema.label = ColumnRef::parse(cfg.get_string("col.label", "label"));
    if (cfg.has("col.split")) rc.schema.split = ColumnRef::parse(cfg.require_string("col.split"));
    if (cfg.has("col.s1_pos")) rc.schema.s1_pos = ColumnRef::parse(cfg.require_string("col.s1_pos"));
    if (cfg.has("col.s2_pos")) rc.schema.s2_pos = ColumnRef::parse(cfg.require_string("col.s2_pos"));
    rc.schema.split_values.train = cfg.get_string("split_value.train", "train");
    rc.schema.split_values.validation = cfg.get_string("split_value.validation", "validation");
    rc.schema.split_values.test = cfg.get_string("split_value.test", "test");

    rc.labels.names = cfg.get_list("labels");
    for (const auto& [raw, declared] : cfg.entries_with_prefix("label_map")) {
        rc.label_aliases[raw] = declared;
    }
    rc.positive_label_name = cfg.get_string("positive_label", "");
    if (!rc.positive_label_name.empty() && !rc.labels.names.empty() &&
        rc.labels.index_of(rc.positive_label_name) < 0) {
        throw UsageError("positive_label `" + rc.positive_label_name + "` is not in the declared label set");
    }

    rc.data_file = cfg.get_string("file.data", "");
    rc.train_file = cfg.get_string("file.train", "");
    rc.validation_file = cfg.get_string("file.validation", "");
    rc.test_file = cfg.get_string("file.test", "");

    rc.normalize.trim = cfg.get_bool("normalize.trim", false);
    rc.normalize.lowercase = cfg.get_bool("normalize.lowercase", false);
    rc.normalize.nfc = cfg.get_bool("normalize.nfc", false);
    rc.tokenizer.lowercase = cfg.get_bool("token.lowercase", true);
    rc.bleu_s2_as_hypothesis = cfg.get_bool("bleu.s2_as_hypothesis", false);

    const std::string scope = cfg.get_string("graph.scope", "all");
    if (scope == "all") {
        rc.graph_scope = {Split::train, Split::validation, Split::test};
    } else {
        rc.graph_scope.clear();
        for (const auto& name : split_string(scope, ',')) {
            if (name == "train") rc.graph_scope.push_back(Split::train);
            else if (name == "validation") rc.graph_scope.push_back(Split::validation);
            else if (name == "test") rc.graph_scope.push_back(Split::test);
            else throw UsageError("graph.scope: unknown split `" + name + "`");
        }
        if (rc.graph_scope.empty()) throw UsageError("graph.scope: empty scope");
    }
    rc.khop_within = cfg.get_bool("graph.khop_within", false);

    rc.embed.dim = static_cast<int>(cfg.get_int("embed.dim", 64));
    rc.embed.walks_per_node = static_cast<int>(cfg.get_int("embed.walks", 10));
    rc.embed.walk_length = static_cast<int>(cfg.get_int("embed.walk_length", 40));
    rc.embed.window = static_cast<int>(cfg.get_int("embed.window", 5));
    rc.embed.negatives = static_cast<int>(cfg.get_int("embed.negatives", 5));
    rc.embed.epochs = static_cast<int>(cfg.get_int("embed.epochs", 3));
    rc.embed.learning_rate = cfg.get_double("embed.learning_rate", 0.025);

    rc.rf.n_trees = static_cast<int>(cfg.get_int("rf.n_trees", 200));
    rc.rf.max_depth = static_cast<int>(cfg.get_int("rf.max_depth", 30));
    rc.rf.min_leaf = static_cast<int>(cfg.get_int("rf.min_leaf", 5));
    rc.rf.mtry = static_cast<int>(cfg.get_int("rf.mtry", 0));

    rc.logit.learning_rate = cfg.get_double("logit.learning_rate", 0.1);
    rc.logit.epochs = static_cast<int>(cfg.get_int("logit.epochs", 2000));
    rc.logit.l2 = cfg.get_double("logit.l2", 1e-6);

    rc.debias.K = static_cast<int>(cfg.get_int("debias.K", 100));
    const std::string prior_mode = cfg.get_string("debias.prior_mode", "solve");
    if (prior_mode == "solve" || prior_mode == "solve_for_balance") {
        rc.debias.prior_mode = DebiasConfig::PriorMode::solve_for_balance;
    } else if (prior_mode == "fixed") {
        rc.debias.prior_mode = DebiasConfig::PriorMode::fixed;
    } else {
        throw UsageError("debias.prior_mode must be solve or fixed");
    }
    rc.debias.fixed_prior = cfg.get_double("debias.prior", 0.5);
    rc.debias.clamp_epsilon = cfg.get_double("debias.clamp_epsilon", 1e-3);
    rc.debias.weight_cap = cfg.get_double("debias.weight_cap", 0.0);
    const std::string debias_classifier = cfg.get_string("debias.classifier", "random_forest");
    if (debias_classifier == "random_forest") {
        rc.debias.classifier.kind = ClassifierKind::random_forest;
    } else if (debias_classifier == "logistic") {
        rc.debias.classifier.kind = ClassifierKind::logistic;
    } else {
        throw UsageError("debias.classifier must be random_forest or logistic");
    }

    rc.distribution_buckets = static_cast<int>(cfg.get_int("audit.distribution_buckets", 20));
    rc.grid_cap = static_cast<int>(cfg.get_int("audit.grid_cap", 10));
    rc.diagnostic_classifier = cfg.get_string("audit.diagnostic_classifier", "leakage");
    if (rc.diagnostic_classifier != "leakage" && rc.diagnostic_classifier != "unlexicalized" &&
        rc.diagnostic_classifier != "advanced") {
        throw UsageError("audit.diagnostic_classifier must be leakage, unlexicalized or advanced");
    }
    rc.diagnostic_bucket_cap = static_cast<int>(cfg.get_int("audit.diagnostic_bucket_cap", 0));
    rc.include_ablation = cfg.get_bool("audit.include_ablation", true);
    for (const auto& [name, value] : cfg.entries_with_prefix("external_score")) {
        try {
            rc.external_scores[name] = std::stod(value);
        } catch (const std::exception&) {
            throw UsageError("external_score." + name + " is not a number: " + value);
        }
    }

    rc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
    rc.threads = static_cast<int>(cfg.get_int("threads", 1));

    rc.export_graph = cfg.get_string("export.graph", "");
    rc.export_features = cfg.get_string("export.features", "");
    rc.embeddings_load = cfg.get_string("embed.load", "");
    rc.embeddings_save = cfg.get_string("embed.save", "");

    // sub-seeds are derived so one --seed pins the whole run
    rc.embed.seed = mix64(rc.seed, kEmbedTag);
    rc.rf.seed = rc.seed;  // per-method seeds derived again at use
    rc.debias.seed = mix64(rc.seed, kDebiasTag);
    rc.debias.classifier.forest = rc.rf;
    rc.debias.classifier.logistic = rc.logit;
    return rc;
}

LoadedDataset load_dataset(const RunConfig& config) {
    LoadedDataset ds;
    ds.labels = config.labels;
    if (ds.labels.names.empty()) throw UsageError("config: `labels` must declare the label set");
    LabelMap label_map{&ds.labels, config.label_aliases};

    auto parse_file = [&](const std::string& path, Split default_split, ParseSchema schema) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open dataset file: " + path);
        auto records = parse_pairs(in, config.format, schema, label_map, default_split, ds.records.size());
        ds.records.insert(ds.records.end(), std::make_move_iterator(records.begin()),
                          std::make_move_iterator(records.end()));
    };

    if (!config.data_file.empty()) {
        if (!config.schema.split) {
            throw UsageError("file.data requires col.split so rows can be routed to splits");
        }
        parse_file(config.data_file, Split::train, config.schema);
    } else {
        ParseSchema schema = config.schema;
        schema.split.reset();  // per-file splits; a split column is not consulted
        if (config.train_file.empty() && config.test_file.empty()) {
            throw UsageError("config: provide file.data or file.train/file.test");
        }
        if (!config.train_file.empty()) parse_file(config.train_file, Split::train, schema);
        if (!config.validation_file.empty()) parse_file(config.validation_file, Split::validation, schema);
        if (!config.test_file.empty()) parse_file(config.test_file, Split::test, schema);
    }

    if (ds.records.empty()) throw DataError("dataset is empty");
    ds.sentences = intern_sentences(ds.records, config.normalize);
    ds.nodes = pair_node_ids(ds.records, ds.sentences);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        ds.split_rows[static_cast<std::size_t>(ds.records[i].split)].push_back(i);
    }
    return ds;
}

namespace {

ComparisonGraph build_scoped_graph(const LoadedDataset& ds, const RunConfig& config) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (Split s : config.graph_scope) {
        for (std::size_t r : ds.rows(s)) edges.push_back(ds.nodes[r]);
    }
    return ComparisonGraph::build(edges, ds.sentences.size());
}

FeatureMatrix unlexicalized_matrix(const LoadedDataset& ds, const RunConfig& config) {
    auto m = FeatureMatrix::with_columns(unlexicalized_feature_names(), ds.records.size());
    parallel_for(ds.records.size(), config.threads, [&](std::size_t r) {
        const PairRecord& rec = ds.records[r];
        TokenizedSentence s1 = tokenize(rec.s1_text, config.tokenizer);
        TokenizedSentence s2 = tokenize(rec.s2_text, config.tokenizer);
        if (!rec.s1_pos.empty()) s1.pos = parse_pos_tags(rec.s1_pos, s1.tokens.size());
        else tag_sentence(s1, rule_pos_tag);
        if (!rec.s2_pos.empty()) s2.pos = parse_pos_tags(rec.s2_pos, s2.tokens.size());
        else tag_sentence(s2, rule_pos_tag);
        const auto f = unlexicalized_features(s1, s2, config.bleu_s2_as_hypothesis);
        for (std::size_t c = 0; c < f.size(); ++c) m.at(r, c) = f[c];
    });
    return m;
}

FeatureMatrix embedding_matrix(const EmbeddingTable& emb, const LoadedDataset& ds, int threads) {
    auto m = FeatureMatrix::with_columns(edge_embedding_feature_names(emb.dim), ds.records.size());
    parallel_for(ds.records.size(), threads, [&](std::size_t r) {
        const auto f = edge_embedding_features(emb, ds.nodes[r].first, ds.nodes[r].second);
        for (std::size_t c = 0; c < f.size(); ++c) m.at(r, c) = f[c];
    });
    return m;
}

int majority_label(const LoadedDataset& ds) {
    std::vector<std::size_t> counts(ds.labels.size(), 0);
    for (std::size_t r : ds.rows(Split::train)) {
        ++counts[static_cast<std::size_t>(ds.records[r].label)];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = c;  // ties keep declaration order
    }
    return static_cast<int>(best);
}

struct EvalWeights {
    std::unordered_map<std::size_t, double> by_pair_id;

    double at(std::size_t pair_id) const {
        auto it = by_pair_id.find(pair_id);
        if (it == by_pair_id.end()) {
            throw DataError("weights table has no entry for pair_id " + std::to_string(pair_id));
        }
        return it->second;
    }
};

struct MethodScore {
    double biased = 0.0;  // percent
    std::optional<double> weighted;
    std::vector<std::string> warnings;
};

MethodScore score_predictions(const LoadedDataset& ds, const std::vector<std::size_t>& test_rows,
                              const std::vector<int>& predicted, const EvalWeights* weights) {
    MethodScore score;
    double correct = 0.0;
    double w_correct = 0.0, w_total = 0.0;
    for (std::size_t k = 0; k < test_rows.size(); ++k) {
        const PairRecord& rec = ds.records[test_rows[k]];
        const bool hit = predicted[k] == rec.label;
        correct += hit ? 1.0 : 0.0;
        if (weights) {
            const double w = weights->at(rec.pair_id);
            w_total += w;
            w_correct += hit ? w : 0.0;
        }
    }
    score.biased = 100.0 * correct / static_cast<double>(test_rows.size());
    if (weights && w_total > 0) score.weighted = 100.0 * w_correct / w_total;
    return score;
}

std::vector<int> labels_of_rows(const LoadedDataset& ds, const std::vector<std::size_t>& rows) {
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back(ds.records[r].label);
    return y;
}

MethodScore train_and_score(const FeatureMatrix& all_features, const LoadedDataset& ds,
                            const RunConfig& config, const EvalWeights* weights, std::uint64_t method_seed,
                            std::vector<std::string>* warnings_out = nullptr) {
    const auto& train_rows = ds.rows(Split::train);
    const auto& test_rows = ds.rows(Split::test);
    const FeatureMatrix Xtr = all_features.select_rows(train_rows);
    const FeatureMatrix Xte = all_features.select_rows(test_rows);
    ForestParams params = config.rf;
    params.seed = method_seed;
    const ClassifierModel model = rf_train(Xtr, labels_of_rows(ds, train_rows), {}, params, config.threads);
    if (warnings_out) {
        for (const auto& w : model.warnings) warnings_out->push_back(w);
    }
    const auto predicted = predict_label(model, Xte, config.threads);
    return score_predictions(ds, test_rows, predicted, weights);
}

void append_zero_variance_warnings(const FeatureMatrix& m, const std::vector<std::size_t>& train_rows,
                                   const std::string& group, std::vector<std::string>& warnings) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
        bool varies = false;
        double first = train_rows.empty() ? 0.0 : m.at(train_rows[0], c);
        for (std::size_t r : train_rows) {
            if (m.at(r, c) != first) {
                varies = true;
                break;
            }
        }
        if (!varies && !train_rows.empty()) {
            warnings.push_back("feature `" + m.names[c] + "` (" + group +
                               ") has zero variance on the training split; kept");
        }
    }
}

ordered_json dataset_summary(const LoadedDataset& ds) {
    ordered_json j;
    j["n_records"] = ds.records.size();
    j["n_distinct_sentences"] = ds.sentences.size();
    j["empty_sentence_occurrences"] = ds.sentences.empty_sentence_occurrences;
    ordered_json splits;
    for (Split s : {Split::train, Split::validation, Split::test}) {
        const auto& rows = ds.rows(s);
        ordered_json entry;
        entry["n"] = rows.size();
        ordered_json label_counts;
        for (std::size_t c = 0; c < ds.labels.size(); ++c) {
            std::size_t count = 0;
            for (std::size_t r : rows) count += ds.records[r].label == static_cast<int>(c) ? 1 : 0;
            label_counts[ds.labels.names[c]] = count;
        }
        entry["labels"] = label_counts;
        splits[split_name(s)] = entry;
    }
    j["splits"] = splits;
    return j;
}

// quantile-bucket edges over the train values; duplicate edges collapse
std::vector<double> quantile_edges(std::vector<double> values, int buckets) {
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    for (int k = 1; k < buckets; ++k) {
        const double q = static_cast<double>(k) / static_cast<double>(buckets);
        const double e = quantile_sorted(values, q);
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    return edges;
}

ordered_json quantile_bucket_table(const std::vector<double>& values, const std::vector<int>& labels,
                                   const LabelSet& label_set, int buckets) {
    const std::vector<double> edges = quantile_edges(values, buckets);
    const std::size_t n_buckets = edges.size() + 1;
    std::vector<std::size_t> totals(n_buckets, 0);
    std::vector<std::vector<std::size_t>> per_label(label_set.size(), std::vector<std::size_t>(n_buckets, 0));
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t b = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
        ++totals[b];
        ++per_label[static_cast<std::size_t>(labels[i])][b];
    }
    ordered_json out = ordered_json::array();
    for (std::size_t b = 0; b < n_buckets; ++b) {
        if (totals[b] == 0) continue;
        ordered_json entry;
        entry["bucket"] = b;
        entry["lo"] = b == 0 ? ordered_json(nullptr) : ordered_json(edges[b - 1]);
        entry["hi"] = b == edges.size() ? ordered_json(nullptr) : ordered_json(edges[b]);
        entry["count"] = totals[b];
        ordered_json fractions;
        for (std::size_t c = 0; c < label_set.size(); ++c) {
            fractions[label_set.names[c]] =
                static_cast<double>(per_label[c][b]) / static_cast<double>(totals[b]);
        }
        entry["label_fraction"] = fractions;
        out.push_back(entry);
    }
    return out;
}

std::string capped_value_name(std::uint64_t v, int cap) {
    if (cap > 0 && v >= static_cast<std::uint64_t>(cap)) return std::to_string(cap) + "+";
    return std::to_string(v);
}

ordered_json distribution_tables(const LoadedDataset& ds, const RunConfig& config,
                                 const FeatureMatrix& leakage, const FeatureMatrix& unlex) {
    const auto& rows = ds.rows(Split::train);
    ordered_json out;
    out["split"] = "train";
    out["quantile_buckets"] = config.distribution_buckets;

    const std::vector<int> labels = labels_of_rows(ds, rows);
    ordered_json features;
    auto add_feature = [&](const FeatureMatrix& m, std::size_t col) {
        std::vector<double> values;
        values.reserve(rows.size());
        for (std::size_t r : rows) values.push_back(m.at(r, col));
        features[m.names[col]] =
            quantile_bucket_table(values, labels, ds.labels, config.distribution_buckets);
    };
    add_feature(leakage, 0);
    add_feature(leakage, 1);
    add_feature(leakage, 2);
    add_feature(unlex, 6);  // overlap_all_pct, the content-similarity column
    out["features"] = features;

    // (s1_freq x s2_freq) mean-label grid, axes capped
    const int positive = config.positive_label();
    out["grid_cap"] = config.grid_cap;
    if (positive >= 0) {
        const int cap = config.grid_cap;
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::pair<std::size_t, std::size_t>> cells;
        for (std::size_t r : rows) {
            std::uint64_t a = static_cast<std::uint64_t>(leakage.at(r, 0));
            std::uint64_t b = static_cast<std::uint64_t>(leakage.at(r, 1));
            if (cap > 0) {
                a = std::min<std::uint64_t>(a, static_cast<std::uint64_t>(cap));
                b = std::min<std::uint64_t>(b, static_cast<std::uint64_t>(cap));
            }
            auto& cell = cells[{a, b}];
            ++cell.first;
            cell.second += ds.records[r].label == positive ? 1 : 0;
        }
        ordered_json grid = ordered_json::array();
        for (const auto& [key, cell] : cells) {
            ordered_json entry;
            entry["s1_freq"] = capped_value_name(key.first, cap);
            entry["s2_freq"] = capped_value_name(key.second, cap);
            entry["count"] = cell.first;
            entry["mean_label"] = static_cast<double>(cell.second) / static_cast<double>(cell.first);
            grid.push_back(entry);
        }
        out["s1xs2_mean_label"] = grid;
    } else {
        out["s1xs2_mean_label"] = nullptr;
    }

    // per-label percentage versus each leakage feature value
    ordered_json curves;
    for (std::size_t col = 0; col < 3; ++col) {
        std::map<std::uint64_t, std::pair<std::size_t, std::vector<std::size_t>>> by_value;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            std::uint64_t v = static_cast<std::uint64_t>(leakage.at(rows[k], col));
            if (config.grid_cap > 0) v = std::min<std::uint64_t>(v, static_cast<std::uint64_t>(config.grid_cap));
            auto& cell = by_value[v];
            if (cell.second.empty()) cell.second.assign(ds.labels.size(), 0);
            ++cell.first;
            ++cell.second[static_cast<std::size_t>(labels[k])];
        }
        ordered_json curve = ordered_json::array();
        for (const auto& [value, cell] : by_value) {
            ordered_json entry;
            entry["value"] = capped_value_name(value, config.grid_cap);
            entry["count"] = cell.first;
            ordered_json pct;
            for (std::size_t c = 0; c < ds.labels.size(); ++c) {
                pct[ds.labels.names[c]] = static_cast<double>(cell.second[c]) / static_cast<double>(cell.first);
            }
            entry["label_percentage"] = pct;
            curve.push_back(entry);
        }
        curves[leakage.names[col]] = curve;
    }
    out["label_percentage_curves"] = curves;
    return out;
}

ordered_json weight_stats_json(const WeightTable& weights) {
    ordered_json j;
    j["n"] = weights.size();
    j["prior"] = weights.prior;
    j["prior_mode"] = weights.prior_mode;
    j["K"] = weights.K;
    j["clamp_epsilon"] = weights.clamp_epsilon;
    j["weight_cap"] = weights.weight_cap;
    j["classifier"] = weights.classifier;
    j["clamped_count"] = weights.clamped_count;
    j["weight_min"] = weights.weight_min;
    j["weight_max"] = weights.weight_max;
    j["weight_mean"] = weights.weight_mean;
    return j;
}

ordered_json ablation_table(const FeatureMatrix& leakage, const LoadedDataset& ds, const RunConfig& config,
                            const EvalWeights* weights, std::vector<std::string>& warnings) {
    struct Entry {
        const char* name;
        std::vector<std::size_t> columns;
    };
    const Entry entries[] = {
        {"s1_freq", {0}},
        {"s2_freq", {1}},
        {"s1s2_inter", {2}},
        {"without_s1_freq", {1, 2}},
        {"without_s2_freq", {0, 2}},
        {"without_s1s2_inter", {0, 1}},
        {"all", {0, 1, 2}},
    };
    ordered_json out;
    std::uint64_t index = 0;
    for (const auto& entry : entries) {
        const FeatureMatrix sub = leakage.select_columns(entry.columns);
        const MethodScore score = train_and_score(sub, ds, config, weights,
                                                  mix64(config.seed, kMethodTag, 100 + index), &warnings);
        ordered_json cell;
        cell["biased"] = score.biased;
        cell["weighted"] = score.weighted ? ordered_json(*score.weighted) : ordered_json(nullptr);
        out[entry.name] = cell;
        ++index;
    }
    const int majority = majority_label(ds);
    const auto& test_rows = ds.rows(Split::test);
    const std::vector<int> constant(test_rows.size(), majority);
    const MethodScore score = score_predictions(ds, test_rows, constant, weights);
    ordered_json cell;
    cell["biased"] = score.biased;
    cell["weighted"] = score.weighted ? ordered_json(*score.weighted) : ordered_json(nullptr);
    out["majority"] = cell;
    return out;
}

}  // namespace

AuditReport run_audit(const RunConfig& config, const WeightTable* weights) {
    const LoadedDataset ds = load_dataset(config);
    std::vector<std::string> warnings;

    const auto& train_rows = ds.rows(Split::train);
    const auto& test_rows = ds.rows(Split::test);
    if (train_rows.empty()) warnings.push_back("train split is empty; accuracy table unavailable");
    if (test_rows.empty()) warnings.push_back("test split is empty; accuracy table unavailable");
    if (ds.sentences.empty_sentence_occurrences > 0) {
        warnings.push_back("dataset contains " + std::to_string(ds.sentences.empty_sentence_occurrences) +
                           " empty sentence occurrences (interned like any other sentence)");
    }

    const ComparisonGraph graph = build_scoped_graph(ds, config);
    const FeatureMatrix leakage = leakage_matrix(graph, ds.nodes, config.threads);
    const FeatureMatrix unlex = unlexicalized_matrix(ds, config);

    if (!config.export_graph.empty()) {
        std::ofstream out = open_output_file(config.export_graph);
        graph.write_edge_list(out);
    }
    if (!config.export_features.empty()) {
        const FeatureMatrix extended = extended_matrix(graph, ds.nodes, config.khop_within, config.threads);
        const FeatureMatrix link = link_index_matrix(graph, ds.nodes, config.threads);
        const FeatureMatrix combined = FeatureMatrix::hcat(FeatureMatrix::hcat(extended, link), unlex);
        std::vector<std::size_t> pair_ids;
        pair_ids.reserve(ds.records.size());
        for (const auto& rec : ds.records) pair_ids.push_back(rec.pair_id);
        std::ofstream out = open_output_file(config.export_features);
        combined.write_tsv(out, pair_ids);
    }

    EvalWeights eval_weights;
    const EvalWeights* weights_ptr = nullptr;
    if (weights) {
        for (std::size_t i = 0; i < weights->size(); ++i) {
            eval_weights.by_pair_id[weights->pair_ids[i]] = weights->weight[i];
        }
        weights_ptr = &eval_weights;
    }

    AuditReport report;
    report.doc["report_version"] = 1;
    report.doc["kind"] = "audit";
    report.doc["dataset"] = dataset_summary(ds);
    report.doc["graph"] = {{"n_nodes", graph.n_nodes()}, {"n_edges", graph.n_edges()}};

    const bool can_score = !train_rows.empty() && !test_rows.empty();
    ordered_json accuracy;
    ordered_json improvements;
    if (can_score) {
        const FeatureMatrix extended = extended_matrix(graph, ds.nodes, config.khop_within, config.threads);
        const FeatureMatrix link = link_index_matrix(graph, ds.nodes, config.threads);
        EmbeddingTable embeddings;
        if (!config.embeddings_load.empty()) {
            std::ifstream in(config.embeddings_load, std::ios::binary);
            if (!in) throw DataError("cannot open embeddings: " + config.embeddings_load);
            embeddings = EmbeddingTable::load(in);
            if (embeddings.n_nodes != graph.n_nodes()) {
                throw DataError("embedding table does not match the graph (" +
                                std::to_string(embeddings.n_nodes) + " vs " +
                                std::to_string(graph.n_nodes()) + " nodes)");
            }
        } else {
            embeddings = deepwalk_train(graph, config.embed);
        }
        if (!config.embeddings_save.empty()) {
            std::ofstream out = open_output_file(config.embeddings_save);
            embeddings.save(out);
        }
        const FeatureMatrix embedded = embedding_matrix(embeddings, ds, config.threads);
        const FeatureMatrix advanced =
            FeatureMatrix::hcat(FeatureMatrix::hcat(extended, embedded), link);

        append_zero_variance_warnings(leakage, train_rows, "leakage", warnings);
        append_zero_variance_warnings(unlex, train_rows, "unlexicalized", warnings);

        const int majority = majority_label(ds);
        const std::vector<int> constant(test_rows.size(), majority);
        const MethodScore majority_score = score_predictions(ds, test_rows, constant, weights_ptr);
        const MethodScore unlex_score =
            train_and_score(unlex, ds, config, weights_ptr, mix64(config.seed, kMethodTag, 1), &warnings);
        const MethodScore leak_score =
            train_and_score(leakage, ds, config, weights_ptr, mix64(config.seed, kMethodTag, 2), &warnings);
        const MethodScore adv_score =
            train_and_score(advanced, ds, config, weights_ptr, mix64(config.seed, kMethodTag, 3), &warnings);

        auto cell = [](const MethodScore& s) {
            ordered_json c;
            c["biased"] = s.biased;
            c["weighted"] = s.weighted ? ordered_json(*s.weighted) : ordered_json(nullptr);
            return c;
        };
        accuracy["majority"] = cell(majority_score);
        accuracy["unlexicalized"] = cell(unlex_score);
        accuracy["leakage"] = cell(leak_score);
        accuracy["advanced"] = cell(adv_score);
        accuracy["majority"]["label"] = ds.labels.names[static_cast<std::size_t>(majority)];

        auto improvement = [&](const MethodScore& s) {
            ordered_json c;
            c["biased"] = s.biased - majority_score.biased;
            c["weighted"] = s.weighted && majority_score.weighted
                                ? ordered_json(*s.weighted - *majority_score.weighted)
                                : ordered_json(nullptr);
            return c;
        };
        improvements["unlexicalized_vs_majority"] = improvement(unlex_score);
        improvements["leakage_vs_majority"] = improvement(leak_score);
        improvements["advanced_vs_majority"] = improvement(adv_score);
    }
    report.doc["accuracy"] = can_score ? accuracy : ordered_json(nullptr);
    report.doc["relative_improvement"] = can_score ? improvements : ordered_json(nullptr);

    if (config.include_ablation && can_score) {
        report.doc["ablation"] = ablation_table(leakage, ds, config, weights_ptr, warnings);
    } else {
        report.doc["ablation"] = nullptr;
    }

    report.doc["distributions"] =
        train_rows.empty() ? ordered_json(nullptr) : distribution_tables(ds, config, leakage, unlex);
    report.doc["weights"] = weights ? weight_stats_json(*weights) : ordered_json(nullptr);
    report.doc["external_model_scores"] = config.external_scores;
    report.doc["warnings"] = warnings;
    report.doc["config"] = config.echo();
    return report;
}

AuditReport run_ablation(const RunConfig& config) {
    const LoadedDataset ds = load_dataset(config);
    if (ds.rows(Split::train).empty() || ds.rows(Split::test).empty()) {
        throw DataError("ablation requires non-empty train and test splits");
    }
    const ComparisonGraph graph = build_scoped_graph(ds, config);
    const FeatureMatrix leakage = leakage_matrix(graph, ds.nodes, config.threads);
    std::vector<std::string> warnings;

    AuditReport report;
    report.doc["report_version"] = 1;
    report.doc["kind"] = "ablation";
    report.doc["dataset"] = dataset_summary(ds);
    report.doc["ablation"] = ablation_table(leakage, ds, config, nullptr, warnings);
    report.doc["warnings"] = warnings;
    report.doc["config"] = config.echo();
    return report;
}

AuditReport run_diagnostic(const RunConfig& config, const std::vector<double>* external_scores) {
    const LoadedDataset ds = load_dataset(config);
    const int positive = config.positive_label();
    if (positive < 0) throw UsageError("diagnose requires positive_label in the config");
    if (ds.rows(Split::train).empty()) throw DataError("diagnose requires a non-empty train split");

    const ComparisonGraph graph = build_scoped_graph(ds, config);

    // distinct training sentences, in node-id order
    std::vector<std::uint32_t> train_sentences;
    {
        std::vector<bool> seen(ds.sentences.size(), false);
        for (std::size_t r : ds.rows(Split::train)) {
            seen[ds.nodes[r].first] = true;
            seen[ds.nodes[r].second] = true;
        }
        for (std::uint32_t u = 0; u < seen.size(); ++u) {
            if (seen[u]) train_sentences.push_back(u);
        }
    }

    std::vector<double> scores;
    std::vector<std::string> warnings;
    std::string score_source;
    if (external_scores) {
        if (external_scores->size() != train_sentences.size()) {
            throw DataError("external scores not aligned: " + std::to_string(external_scores->size()) +
                            " scores for " + std::to_string(train_sentences.size()) + " self-pairs");
        }
        scores = *external_scores;
        score_source = "external";
    } else {
        // train the chosen in-repo classifier on the training pairs, then score
        // every (s, s) self-pair
        const auto& train_rows = ds.rows(Split::train);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> self_nodes;
        self_nodes.reserve(train_sentences.size());
        for (std::uint32_t u : train_sentences) self_nodes.emplace_back(u, u);

        FeatureMatrix train_features, self_features;
        if (config.diagnostic_classifier == "leakage") {
            train_features = leakage_matrix(graph, ds.nodes, config.threads).select_rows(train_rows);
            self_features = leakage_matrix(graph, self_nodes, config.threads);
        } else if (config.diagnostic_classifier == "unlexicalized") {
            train_features = unlexicalized_matrix(ds, config).select_rows(train_rows);
            self_features = FeatureMatrix::with_columns(unlexicalized_feature_names(), self_nodes.size());
            parallel_for(self_nodes.size(), config.threads, [&](std::size_t i) {
                TokenizedSentence s = tokenize(ds.sentences.text_of[train_sentences[i]], config.tokenizer);
                tag_sentence(s, rule_pos_tag);
                const auto f = unlexicalized_features(s, s, config.bleu_s2_as_hypothesis);
                for (std::size_t c = 0; c < f.size(); ++c) self_features.at(i, c) = f[c];
            });
        } else {  // advanced
            const EmbeddingTable embeddings = deepwalk_train(graph, config.embed);
            auto advanced_for = [&](const std::vector<std::pair<std::uint32_t, std::uint32_t>>& nodes) {
                const FeatureMatrix ext = extended_matrix(graph, nodes, config.khop_within, config.threads);
                auto emb = FeatureMatrix::with_columns(edge_embedding_feature_names(embeddings.dim),
                                                       nodes.size());
                parallel_for(nodes.size(), config.threads, [&](std::size_t i) {
                    const auto f = edge_embedding_features(embeddings, nodes[i].first, nodes[i].second);
                    for (std::size_t c = 0; c < f.size(); ++c) emb.at(i, c) = f[c];
                });
                const FeatureMatrix link = link_index_matrix(graph, nodes, config.threads);
                return FeatureMatrix::hcat(FeatureMatrix::hcat(ext, emb), link);
            };
            train_features = advanced_for(ds.nodes).select_rows(train_rows);
            self_features = advanced_for(self_nodes);
        }

        ForestParams params = config.rf;
        params.seed = mix64(config.seed, kMethodTag, 90);
        const ClassifierModel model =
            rf_train(train_features, labels_of_rows(ds, train_rows), {}, params, config.threads);
        for (const auto& w : model.warnings) warnings.push_back(w);
        const auto probs = predict_proba(model, self_features, config.threads);
        const std::size_t C = static_cast<std::size_t>(model.n_classes);
        scores.resize(self_nodes.size());
        for (std::size_t i = 0; i < self_nodes.size(); ++i) {
            scores[i] = static_cast<std::size_t>(positive) < C ? probs[i * C + static_cast<std::size_t>(positive)]
                                                               : 0.0;
        }
        score_source = config.diagnostic_classifier;
    }

    // bucket by occurrence count (degree in the scoped graph)
    std::map<std::uint64_t, std::vector<double>> buckets;
    for (std::size_t i = 0; i < train_sentences.size(); ++i) {
        std::uint64_t occ = graph.degree(train_sentences[i]);
        if (config.diagnostic_bucket_cap > 0) {
            occ = std::min<std::uint64_t>(occ, static_cast<std::uint64_t>(config.diagnostic_bucket_cap));
        }
        buckets[occ].push_back(scores[i]);
    }

    ordered_json table = ordered_json::array();
    std::vector<double> bucket_values, bucket_medians;
    for (auto& [value, bucket_scores] : buckets) {
        const TukeyStats stats = tukey_stats(bucket_scores);
        ordered_json entry;
        entry["occurrence"] = capped_value_name(value, config.diagnostic_bucket_cap);
        entry["n"] = stats.n;
        entry["median"] = stats.median;
        entry["q1"] = stats.q1;
        entry["q3"] = stats.q3;
        entry["iqr"] = stats.iqr;
        entry["lo_fence"] = stats.lo_fence;
        entry["hi_fence"] = stats.hi_fence;
        entry["whisker_lo"] = stats.whisker_lo;
        entry["whisker_hi"] = stats.whisker_hi;
        table.push_back(entry);
        bucket_values.push_back(static_cast<double>(value));
        bucket_medians.push_back(stats.median);
    }

    AuditReport report;
    report.doc["report_version"] = 1;
    report.doc["kind"] = "diagnostic";
    report.doc["dataset"] = dataset_summary(ds);
    report.doc["n_self_pairs"] = train_sentences.size();
    report.doc["score_source"] = score_source;
    report.doc["buckets"] = table;
    report.doc["trend_spearman"] = spearman_correlation(bucket_values, bucket_medians);
    report.doc["warnings"] = warnings;
    report.doc["config"] = config.echo();
    return report;
}

WeightTable run_weights(const RunConfig& config, AuditReport* report) {
    const LoadedDataset ds = load_dataset(config);
    const int positive = config.positive_label();
    if (positive < 0) throw UsageError("weights requires positive_label in the config");

    const ComparisonGraph graph = build_scoped_graph(ds, config);
    const FeatureMatrix leakage = leakage_matrix(graph, ds.nodes, config.threads);
    std::vector<int> binary(ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        binary[i] = ds.records[i].label == positive ? 1 : 0;
    }

    WeightTable table = debias_weights(leakage, binary, config.debias, config.threads);
    for (std::size_t i = 0; i < ds.records.size(); ++i) table.pair_ids[i] = ds.records[i].pair_id;

    if (report) {
        report->doc["report_version"] = 1;
        report->doc["kind"] = "weights";
        report->doc["dataset"] = dataset_summary(ds);
        report->doc["weights"] = weight_stats_json(table);
        report->doc["warnings"] = ordered_json::array();
        report->doc["config"] = config.echo();
    }
    return table;
}

AuditReport run_evaluate(const RunConfig& config, const std::map<std::size_t, double>& predictions,
                         const WeightTable& weights, Split split) {
    const LoadedDataset ds = load_dataset(config);
    const int positive = config.positive_label();
    if (positive < 0) throw UsageError("evaluate requires positive_label in the config");

    std::unordered_map<std::size_t, double> weight_of;
    for (std::size_t i = 0; i < weights.size(); ++i) weight_of[weights.pair_ids[i]] = weights.weight[i];

    const auto& rows = ds.rows(split);
    if (rows.empty()) throw DataError(std::string("evaluate: split `") + split_name(split) + "` is empty");

    std::vector<double> scores, eval_weights, unit;
    std::vector<int> labels;
    for (std::size_t r : rows) {
        const std::size_t pair_id = ds.records[r].pair_id;
        auto pred = predictions.find(pair_id);
        if (pred == predictions.end()) {
            throw DataError("predictions file has no entry for pair_id " + std::to_string(pair_id));
        }
        auto w = weight_of.find(pair_id);
        if (w == weight_of.end()) {
            throw DataError("weights table has no entry for pair_id " + std::to_string(pair_id));
        }
        scores.push_back(pred->second);
        eval_weights.push_back(w->second);
        unit.push_back(1.0);
        labels.push_back(ds.records[r].label == positive ? 1 : 0);
    }

    AuditReport report;
    report.doc["report_version"] = 1;
    report.doc["kind"] = "evaluate";
    report.doc["split"] = split_name(split);
    report.doc["n"] = rows.size();
    report.doc["biased_eva"] = {
        {"accuracy", 100.0 * weighted_metric(scores, labels, unit, Metric::accuracy)},
        {"log_loss", weighted_metric(scores, labels, unit, Metric::log_loss)},
    };
    report.doc["debiased_eva"] = {
        {"accuracy", 100.0 * weighted_metric(scores, labels, eval_weights, Metric::accuracy)},
        {"log_loss", weighted_metric(scores, labels, eval_weights, Metric::log_loss)},
    };
    report.doc["weights"] = weight_stats_json(weights);
    report.doc["config"] = config.echo();
    return report;
}

AuditReport run_ingest_summary(const RunConfig& config) {
    const LoadedDataset ds = load_dataset(config);
    AuditReport report;
    report.doc["report_version"] = 1;
    report.doc["kind"] = "ingest";
    report.doc["dataset"] = dataset_summary(ds);
    std::vector<std::string> warnings;
    if (ds.sentences.empty_sentence_occurrences > 0) {
        warnings.push_back("dataset contains " + std::to_string(ds.sentences.empty_sentence_occurrences) +
                           " empty sentence occurrences (interned like any other sentence)");
    }
    report.doc["warnings"] = warnings;
    report.doc["config"] = config.echo();
    return report;
}

std::map<std::size_t, double> load_predictions_file(const std::string& path) {
    const std::string text = read_text_file(path);
    std::map<std::size_t, double> out;
    bool header_seen = false;
    for (const auto& line : split_string(text, '\n')) {
        std::string l = line;
        if (!l.empty() && l.back() == '\r') l.pop_back();
        if (l.empty() || l[0] == '#') continue;
        if (!header_seen) {
            if (l != "pair_id\tscore") throw DataError("predictions file: expected header `pair_id<TAB>score`");
            header_seen = true;
            continue;
        }
        const auto fields = split_string(l, '\t');
        if (fields.size() != 2) throw DataError("predictions file: expected 2 columns: " + l);
        try {
            out[std::stoull(fields[0])] = std::stod(fields[1]);
        } catch (const std::exception&) {
            throw DataError("predictions file: bad row: " + l);
        }
    }
    if (!header_seen) throw DataError("predictions file: missing header");
    return out;
}

double quantile_sorted(const std::vector<double>& sorted_values, double q) {
    if (sorted_values.empty()) throw std::invalid_argument("quantile of empty vector");
    if (q <= 0.0) return sorted_values.front();
    if (q >= 1.0) return sorted_values.back();
    const double h = q * static_cast<double>(sorted_values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

TukeyStats tukey_stats(std::vector<double> values) {
    TukeyStats stats;
    if (values.empty()) return stats;
    std::sort(values.begin(), values.end());
    stats.n = values.size();
    stats.min = values.front();
    stats.max = values.back();
    stats.median = quantile_sorted(values, 0.5);
    stats.q1 = quantile_sorted(values, 0.25);
    stats.q3 = quantile_sorted(values, 0.75);
    stats.iqr = stats.q3 - stats.q1;
    stats.lo_fence = stats.q1 - 1.5 * stats.iqr;
    stats.hi_fence = stats.q3 + 1.5 * stats.iqr;
    stats.whisker_lo = stats.max;
    stats.whisker_hi = stats.min;
    for (double v : values) {
        if (v >= stats.lo_fence) {
            stats.whisker_lo = v;  // first datum inside the fence (ascending)
            break;
        }
    }
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
        if (*it <= stats.hi_fence) {
            stats.whisker_hi = *it;
            break;
        }
    }
    return stats;
}

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) return 0.0;
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= static_cast<double>(ra.size());
    mean_b /= static_cast<double>(rb.size());
    double cov = 0, var_a = 0, var_b = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean_a;
        const double db = rb[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
    return cov / std::sqrt(var_a * var_b);
}

namespace {

void markdown_accuracy_table(std::ostringstream& md, const ordered_json& accuracy) {
    md << "| method | biased eva | debiased eva |\n|---|---|---|\n";
    for (const auto& [name, cell] : accuracy.items()) {
        md << "| " << name << " | " << percent(cell.at("biased").get<double>()) << " | ";
        if (cell.contains("weighted") && !cell.at("weighted").is_null()) {
            md << percent(cell.at("weighted").get<double>());
        } else {
            md << "-";
        }
        md << " |\n";
    }
}

}  // namespace

std::string AuditReport::to_markdown() const {
    std::ostringstream md;
    const std::string kind = doc.value("kind", "report");
    md << "# pair-audit " << kind << " report\n\n";

    if (doc.contains("dataset") && doc.at("dataset").is_object()) {
        const auto& ds = doc.at("dataset");
        md << "## Dataset\n\n";
        md << "- records: " << ds.at("n_records").get<std::size_t>() << "\n";
        md << "- distinct sentences: " << ds.at("n_distinct_sentences").get<std::size_t>() << "\n";
        md << "- empty-sentence occurrences: " << ds.at("empty_sentence_occurrences").get<std::size_t>()
           << "\n\n";
        md << "| split | n | labels |\n|---|---|---|\n";
        for (const auto& [name, entry] : ds.at("splits").items()) {
            md << "| " << name << " | " << entry.at("n").get<std::size_t>() << " | ";
            bool first = true;
            for (const auto& [label, count] : entry.at("labels").items()) {
                if (!first) md << ", ";
                md << label << "=" << count.get<std::size_t>();
                first = false;
            }
            md << " |\n";
        }
        md << "\n";
    }

    if (doc.contains("accuracy") && doc.at("accuracy").is_object()) {
        md << "## Accuracy (%)\n\n";
        markdown_accuracy_table(md, doc.at("accuracy"));
        md << "\n";
    }
    if (doc.contains("relative_improvement") && doc.at("relative_improvement").is_object()) {
        md << "## Relative improvement vs majority\n\n";
        md << "| method | biased | debiased |\n|---|---|---|\n";
        for (const auto& [name, cell] : doc.at("relative_improvement").items()) {
            md << "| " << name << " | " << percent(cell.at("biased").get<double>()) << " | ";
            if (!cell.at("weighted").is_null()) md << percent(cell.at("weighted").get<double>());
            else md << "-";
            md << " |\n";
        }
        md << "\n";
    }
    if (doc.contains("ablation") && doc.at("ablation").is_object()) {
        md << "## Leakage-feature ablation (%)\n\n";
        markdown_accuracy_table(md, doc.at("ablation"));
        md << "\n";
    }
    if (doc.contains("buckets") && doc.at("buckets").is_array()) {
        md << "## Self-pair diagnostic (score source: " << doc.value("score_source", "?") << ")\n\n";
        md << "| occurrence | n | median | q1 | q3 | whiskers |\n|---|---|---|---|---|---|\n";
        for (const auto& entry : doc.at("buckets")) {
            md << "| " << entry.at("occurrence").get<std::string>() << " | " << entry.at("n").get<std::size_t>()
               << " | " << format_double(entry.at("median").get<double>()) << " | "
               << format_double(entry.at("q1").get<double>()) << " | "
               << format_double(entry.at("q3").get<double>()) << " | ["
               << format_double(entry.at("whisker_lo").get<double>()) << ", "
               << format_double(entry.at("whisker_hi").get<double>()) << "] |\n";
        }
        md << "\ntrend (Spearman of occurrence vs median): "
           << format_double(doc.at("trend_spearman").get<double>()) << "\n\n";
    }
    if (doc.contains("biased_eva")) {
        md << "## Evaluation\n\n";
        md << "| | accuracy (%) | log loss |\n|---|---|---|\n";
        md << "| Biased Eva | " << percent(doc.at("biased_eva").at("accuracy").get<double>()) << " | "
           << format_double(doc.at("biased_eva").at("log_loss").get<double>()) << " |\n";
        md << "| Debiased Eva | " << percent(doc.at("debiased_eva").at("accuracy").get<double>()) << " | "
           << format_double(doc.at("debiased_eva").at("log_loss").get<double>()) << " |\n\n";
    }
    if (doc.contains("weights") && doc.at("weights").is_object()) {
        const auto& w = doc.at("weights");
        md << "## Weights\n\n";
        md << "- n: " << w.at("n").get<std::size_t>() << "\n";
        md << "- prior: " << format_double(w.at("prior").get<double>()) << " (" <<
            w.at("prior_mode").get<std::string>() << ")\n";
        md << "- K: " << w.at("K").get<int>() << "\n";
        md << "- min / mean / max: " << format_double(w.at("weight_min").get<double>()) << " / "
           << format_double(w.at("weight_mean").get<double>()) << " / "
           << format_double(w.at("weight_max").get<double>()) << "\n";
        md << "- clamped p_hat values: " << w.at("clamped_count").get<std::size_t>() << "\n\n";
    }
    if (doc.contains("external_model_scores") && doc.at("external_model_scores").is_object() &&
        !doc.at("external_model_scores").empty()) {
        md << "## Externally supplied model scores\n\n| model | accuracy |\n|---|---|\n";
        for (const auto& [name, value] : doc.at("external_model_scores").items()) {
            md << "| " << name << " | " << percent(value.get<double>()) << " |\n";
        }
        md << "\n";
    }
    if (doc.contains("warnings") && doc.at("warnings").is_array() && !doc.at("warnings").empty()) {
        md << "## Warnings\n\n";
        for (const auto& w : doc.at("warnings")) md << "- " << w.get<std::string>() << "\n";
        md << "\n";
    }
    return md.str();
}

}  // namespace pairaudit
