#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairaudit/config.hpp"
#include "pairaudit/dataset.hpp"
#include "pairaudit/debias.hpp"
#include "pairaudit/embeddings.hpp"
#include "pairaudit/graph.hpp"
#include "pairaudit/simulation.hpp"
#include "pairaudit/text_features.hpp"

namespace pairaudit {

using ordered_json = nlohmann::ordered_json;

// Everything a run needs, resolved from the config file plus CLI overrides.
// Defaults here are the recorded defaults echoed into every report.
struct RunConfig {
    // dataset schema
    PairFormat format = PairFormat::tsv;
    ParseSchema schema;
    LabelSet labels;
    std::unordered_map<std::string, std::string> label_aliases;
    std::string positive_label_name;  // required for weights/diagnose/evaluate
    std::string data_file;            // single file with a split column...
    std::string train_file;           // ...or per-split files
    std::string validation_file;
    std::string test_file;

    NormalizeOptions normalize;
    TokenizerOptions tokenizer;
    bool bleu_s2_as_hypothesis = false;

    std::vector<Split> graph_scope = {Split::train, Split::validation, Split::test};
    bool khop_within = false;

    DeepWalkParams embed;
    ForestParams rf;
    LogisticParams logit;

    DebiasConfig debias;  // classifier params filled from rf/logit at load time

    int distribution_buckets = 20;
    int grid_cap = 10;
    std::string diagnostic_classifier = "leakage";  // leakage | unlexicalized | advanced
    int diagnostic_bucket_cap = 0;                  // 0 = one bucket per occurrence count
    bool include_ablation = true;
    std::map<std::string, double> external_scores;  // echoed into the report

    std::uint64_t seed = 0;
    int threads = 1;

    // optional artifact paths (audit subcommand)
    std::string export_graph;      // edge-list text file
    std::string export_features;   // combined feature-matrix TSV
    std::string embeddings_load;   // reuse a saved embedding table
    std::string embeddings_save;

    int positive_label() const;  // -1 when undeclared
    ordered_json echo() const;   // full resolved-config section for reports
};

RunConfig load_run_config(const KeyValueConfig& cfg);

struct LoadedDataset {
    std::vector<PairRecord> records;  // all splits, pair_id = position
    LabelSet labels;
    SentenceTable sentences;  // interned over every record
    std::vector<std::pair<std::uint32_t, std::uint32_t>> nodes;
    std::array<std::vector<std::size_t>, 3> split_rows;

    const std::vector<std::size_t>& rows(Split s) const {
        return split_rows[static_cast<std::size_t>(s)];
    }
};

LoadedDataset load_dataset(const RunConfig& config);

// A report is one ordered JSON document; the markdown rendering is derived
// from the same document.
struct AuditReport {
    ordered_json doc;

    std::string to_json_text() const { return doc.dump(2) + "\n"; }
    std::string to_markdown() const;
};

// Table 1-style audit: majority / unlexicalized / leakage / advanced, trained
// on the train split and scored on the test split, with the comparison graph
// built over `graph_scope` (all splits by default). Weighted ("debiased")
// columns appear when a weights table is supplied.
AuditReport run_audit(const RunConfig& config, const WeightTable* weights = nullptr);

// Seven leakage-feature subsets plus the majority row.
AuditReport run_ablation(const RunConfig& config);

// Self-pair diagnostic: scores per distinct training sentence paired with
// itself, bucketed by occurrence count, Tukey statistics per bucket, Spearman
// trend of bucket value vs median score. `external_scores`, when provided,
// must align with the self-pair dataset (one score per distinct sentence, in
// sentence-id order).
AuditReport run_diagnostic(const RunConfig& config,
                           const std::vector<double>* external_scores = nullptr);

// Leakage features -> cross-predicted p_hat -> propensity inversion ->
// normalized weights for every record.
WeightTable run_weights(const RunConfig& config, AuditReport* report = nullptr);

// Biased vs weighted accuracy/log-loss of externally supplied predictions on
// one split (default test). Predictions: TSV "pair_id<TAB>score".
AuditReport run_evaluate(const RunConfig& config, const std::map<std::size_t, double>& predictions,
                         const WeightTable& weights, Split split = Split::test);

// ingest-only validation summary
AuditReport run_ingest_summary(const RunConfig& config);

std::map<std::size_t, double> load_predictions_file(const std::string& path);

// ---- small statistics helpers (shared with the diagnostic) ----

// linear interpolation between closest ranks on an ascending-sorted vector
double quantile_sorted(const std::vector<double>& sorted_values, double q);

struct TukeyStats {
    std::size_t n = 0;
    double median = 0, q1 = 0, q3 = 0, iqr = 0;
    double lo_fence = 0, hi_fence = 0;    // q1 - 1.5 IQR, q3 + 1.5 IQR
    double whisker_lo = 0, whisker_hi = 0;  // extreme data within the fences
    double min = 0, max = 0;
};

TukeyStats tukey_stats(std::vector<double> values);

// rank correlation with average ranks for ties; 0 when either side is constant
double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace pairaudit
