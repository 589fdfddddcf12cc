// pair-audit: selection-bias auditing and leakage-neutral weighting for
// sentence-pair datasets.
//
// Subcommands: ingest, audit, ablate, diagnose, weights, evaluate, simulate.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pairaudit/audit.hpp"
#include "pairaudit/simulation.hpp"

namespace {

using namespace pairaudit;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::string data_file, train_file, validation_file, test_file;
    long long seed = -1;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_dataset) {
    cmd->add_option("--config", args.config_path, "key-value config file")->required();
    cmd->add_option("--out-dir", args.out_dir, "directory for reports and outputs");
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
    cmd->add_option("--threads", args.threads, "worker threads (overrides the config)");
    if (needs_dataset) {
        cmd->add_option("--data", args.data_file, "single data file with a split column");
        cmd->add_option("--train", args.train_file, "train split file");
        cmd->add_option("--validation", args.validation_file, "validation split file");
        cmd->add_option("--test", args.test_file, "test split file");
    }
}

KeyValueConfig merged_config(const CommonArgs& args) {
    KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
    if (args.threads > 0) cfg.set("threads", std::to_string(args.threads));
    if (!args.data_file.empty()) cfg.set("file.data", args.data_file);
    if (!args.train_file.empty()) cfg.set("file.train", args.train_file);
    if (!args.validation_file.empty()) cfg.set("file.validation", args.validation_file);
    if (!args.test_file.empty()) cfg.set("file.test", args.test_file);
    return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / name).string();
}

void write_report(const CommonArgs& args, const AuditReport& report, const std::string& stem) {
    const std::string json_path = out_path(args, stem + ".json");
    const std::string md_path = out_path(args, stem + ".md");
    write_text_file(json_path, report.to_json_text());
    write_text_file(md_path, report.to_markdown());
    std::cout << "report written to " << json_path << " and " << md_path << "\n";
}

std::vector<double> load_score_lines(const std::string& path) {
    std::vector<double> scores;
    const std::string text = read_text_file(path);
    for (const auto& raw : split_string(text, '\n')) {
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        try {
            scores.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw DataError("scores file: not a number: " + line);
        }
    }
    return scores;
}

int run(int argc, char** argv) {
    CLI::App app{"selection-bias audit and leakage-neutral weighting for sentence-pair datasets"};
    app.require_subcommand(1);

    CommonArgs ingest_args, audit_args, ablate_args, diag_args, weights_args, eval_args, sim_args;

    auto* ingest_cmd = app.add_subcommand("ingest", "validate a dataset and summarize it");
    add_common(ingest_cmd, ingest_args, true);

    auto* audit_cmd = app.add_subcommand("audit", "accuracy table, ablation and distribution tables");
    add_common(audit_cmd, audit_args, true);
    std::string audit_weights_file, audit_export_graph, audit_export_features;
    std::string audit_embeddings_load, audit_embeddings_save;
    audit_cmd->add_option("--weights", audit_weights_file, "weights TSV; adds the debiased-eva column");
    audit_cmd->add_option("--export-graph", audit_export_graph, "write the comparison graph edge list");
    audit_cmd->add_option("--export-features", audit_export_features, "write the feature matrix TSV");
    audit_cmd->add_option("--embeddings", audit_embeddings_load, "load a saved embedding table");
    audit_cmd->add_option("--export-embeddings", audit_embeddings_save, "save the trained embedding table");

    auto* ablate_cmd = app.add_subcommand("ablate", "leakage-feature ablation table");
    add_common(ablate_cmd, ablate_args, true);

    auto* diag_cmd = app.add_subcommand("diagnose", "identical-pair diagnostic with Tukey buckets");
    add_common(diag_cmd, diag_args, true);
    std::string diag_scores_file;
    diag_cmd->add_option("--scores", diag_scores_file,
                         "external self-pair scores (one per line, sentence-id order)");

    auto* weights_cmd = app.add_subcommand("weights", "generate leakage-neutral sample weights");
    add_common(weights_cmd, weights_args, true);
    std::string weights_out;
    weights_cmd->add_option("--out", weights_out, "weights TSV path (default <out-dir>/weights.tsv)");

    auto* eval_cmd = app.add_subcommand("evaluate", "biased vs debiased evaluation of predictions");
    add_common(eval_cmd, eval_args, true);
    std::string eval_pred_file, eval_weights_file, eval_split = "test";
    eval_cmd->add_option("--predictions", eval_pred_file, "TSV pair_id<TAB>score")->required();
    eval_cmd->add_option("--weights", eval_weights_file, "weights TSV")->required();
    eval_cmd->add_option("--split", eval_split, "split to evaluate (train/validation/test)");

    auto* sim_cmd = app.add_subcommand("simulate", "generate a biased pair dataset from the sim.* spec");
    add_common(sim_cmd, sim_args, false);
    std::string sim_out;
    sim_cmd->add_option("--out", sim_out, "pair TSV path (default <out-dir>/pairs.tsv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors -> 1; help/version -> 0
    }

    if (ingest_cmd->parsed()) {
        const RunConfig rc = load_run_config(merged_config(ingest_args));
        write_report(ingest_args, run_ingest_summary(rc), "ingest_report");
    } else if (audit_cmd->parsed()) {
        KeyValueConfig cfg = merged_config(audit_args);
        if (!audit_export_graph.empty()) cfg.set("export.graph", audit_export_graph);
        if (!audit_export_features.empty()) cfg.set("export.features", audit_export_features);
        if (!audit_embeddings_load.empty()) cfg.set("embed.load", audit_embeddings_load);
        if (!audit_embeddings_save.empty()) cfg.set("embed.save", audit_embeddings_save);
        const RunConfig rc = load_run_config(cfg);
        WeightTable weights;
        const WeightTable* weights_ptr = nullptr;
        if (!audit_weights_file.empty()) {
            std::ifstream in(audit_weights_file, std::ios::binary);
            if (!in) throw DataError("cannot open weights file: " + audit_weights_file);
            weights = WeightTable::load(in);
            weights_ptr = &weights;
        }
        write_report(audit_args, run_audit(rc, weights_ptr), "audit_report");
    } else if (ablate_cmd->parsed()) {
        const RunConfig rc = load_run_config(merged_config(ablate_args));
        write_report(ablate_args, run_ablation(rc), "ablation_report");
    } else if (diag_cmd->parsed()) {
        const RunConfig rc = load_run_config(merged_config(diag_args));
        std::vector<double> scores;
        const std::vector<double>* scores_ptr = nullptr;
        if (!diag_scores_file.empty()) {
            scores = load_score_lines(diag_scores_file);
            scores_ptr = &scores;
        }
        write_report(diag_args, run_diagnostic(rc, scores_ptr), "diagnostic_report");
    } else if (weights_cmd->parsed()) {
        const RunConfig rc = load_run_config(merged_config(weights_args));
        AuditReport report;
        const WeightTable table = run_weights(rc, &report);
        const std::string path = weights_out.empty() ? out_path(weights_args, "weights.tsv") : weights_out;
        std::ostringstream ss;
        table.save(ss);
        write_text_file(path, ss.str());
        std::cout << "weights written to " << path << "\n";
        write_report(weights_args, report, "weights_report");
    } else if (eval_cmd->parsed()) {
        const RunConfig rc = load_run_config(merged_config(eval_args));
        const auto predictions = load_predictions_file(eval_pred_file);
        std::ifstream in(eval_weights_file, std::ios::binary);
        if (!in) throw DataError("cannot open weights file: " + eval_weights_file);
        const WeightTable weights = WeightTable::load(in);
        Split split = Split::test;
        if (eval_split == "train") split = Split::train;
        else if (eval_split == "validation") split = Split::validation;
        else if (eval_split == "test") split = Split::test;
        else throw UsageError("--split must be train, validation or test");
        write_report(eval_args, run_evaluate(rc, predictions, weights, split), "evaluate_report");
    } else if (sim_cmd->parsed()) {
        const KeyValueConfig cfg = merged_config(sim_args);
        const RunConfig rc = load_run_config(cfg);
        const SimulationSpec spec = SimulationSpec::from_config(cfg);
        const int positive = rc.positive_label();
        if (positive < 0) throw UsageError("simulate requires labels and positive_label in the config");
        const auto records = simulate_pair_records(spec, rc.labels, positive);
        const std::string path = sim_out.empty() ? out_path(sim_args, "pairs.tsv") : sim_out;
        std::ostringstream ss;
        serialize_pairs(ss, records, rc.labels, PairFormat::tsv);
        write_text_file(path, ss.str());
        std::cout << records.size() << " selected pairs written to " << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
