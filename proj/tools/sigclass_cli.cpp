// sigclass: synthetic multi-sensor vehicle signature classification.
//
//   sigclass synth   [--config F] [--seed N] [--out DIR]
//   sigclass rows    ...
//   sigclass heatmap --label L ...
//   sigclass train   [--runs N] ...
//   sigclass eval    [--checkpoint F] [--rows F] [--test-split] ...
//
// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 training/selection failure.

#include "sigclass/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kTraining = 3 };

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> set;
};

sigclass::PipelineConfig resolve(const GlobalOptions& g, const std::optional<int>& runs,
                                 const std::optional<std::string>& group) {
    sigclass::PipelineConfig cfg = g.config.empty() ? sigclass::PipelineConfig{} : sigclass::load_config(g.config);
    for (const auto& kv : g.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw sigclass::ConfigError("--set expects key=value, got '" + kv + "'");
        sigclass::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (group) sigclass::apply_setting(cfg, "group", *group);
    if (g.seed) cfg.seed = *g.seed;
    if (!g.out.empty()) cfg.out_dir = g.out;
    if (runs) cfg.train.runs = *runs;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic vehicle-signature pipeline: synth -> rows -> heatmap -> train -> eval"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::optional<int> runs;
    std::optional<std::string> group;
    app.add_option("--config", g.config, "Key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed (overrides the config)");
    app.add_option("--out", g.out, "Output directory (overrides the config)");
    app.add_option("--set", g.set, "Extra key=value overrides, applied after the config file");
    app.add_option("--group", group, "Group1 or Group2");

    auto* synth = app.add_subcommand("synth", "Synthesize recordings for every profile and trial");
    auto* rows = app.add_subcommand("rows", "Extract blocks, compute spectra and write fused rows");
    auto* heatmap = app.add_subcommand("heatmap", "Write a normalized heat map for one label");
    std::string label;
    heatmap->add_option("--label", label, "Target label")->required();
    auto* train = app.add_subcommand("train", "Select bins, train the network and evaluate");
    train->add_option("--runs", runs, "Training runs (one batch and one optimizer step each)");
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a rows file");
    std::string ckpt;
    std::string rows_file;
    bool test_split = false;
    eval->add_option("--checkpoint", ckpt, "Checkpoint (default <out>/model.ckpt)");
    eval->add_option("--rows", rows_file, "Rows CSV (default <out>/rows.csv)");
    eval->add_flag("--test-split", test_split, "Only evaluate the held-out split implied by the seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        const auto cfg = resolve(g, runs, group);
        if (*synth) {
            sigclass::cmd_synth(cfg, std::cout);
        } else if (*rows) {
            sigclass::cmd_rows(cfg, std::cout);
        } else if (*heatmap) {
            sigclass::cmd_heatmap(cfg, label, std::cout);
        } else if (*train) {
            sigclass::cmd_train(cfg, std::cout);
        } else if (*eval) {
            sigclass::cmd_eval(cfg, ckpt.empty() ? cfg.out_dir / "model.ckpt" : std::filesystem::path(ckpt),
                               rows_file.empty() ? cfg.out_dir / "rows.csv" : std::filesystem::path(rows_file),
                               test_split, std::cout);
        }
    } catch (const sigclass::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const sigclass::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const sigclass::ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const sigclass::SelectionError& e) {
        std::cerr << "selection failed: " << e.what() << "\n";
        return kTraining;
    } catch (const sigclass::NumericalError& e) {
        std::cerr << "training failed: " << e.what() << "\n";
        return kTraining;
    }
    return kOk;
}
