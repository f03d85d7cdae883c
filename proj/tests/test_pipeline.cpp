#include "sigclass/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sigclass;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

PipelineConfig small_config(const std::string& name) {
    PipelineConfig cfg;
    cfg.duration_s = 3.0;
    cfg.trials = 2;
    cfg.target_rows = 80;
    cfg.heatmap_blocks = 3;
    cfg.train.runs = 20;
    cfg.train.batch_size = 50;
    cfg.out_dir = fs::temp_directory_path() / ("sigclass_test_pipeline_" + name);
    fs::remove_all(cfg.out_dir);
    return cfg;
}

} // namespace

TEST(Pipeline, InMemoryRowsMatchFileStagesByteForByte) {
    const auto cfg = small_config("bytes");
    std::ostringstream log;
    cmd_synth(cfg, log);
    cmd_rows(cfg, log);

    const auto ds = build_dataset(cfg);
    EXPECT_EQ(ds.rows.size(), 80u);
    EXPECT_EQ(ds.label_vocab, group_labels(TargetGroup::Group2));
    std::ostringstream mem;
    write_rows(mem, ds.rows);
    EXPECT_EQ(mem.str(), slurp(cfg.out_dir / "rows.csv"));
    fs::remove_all(cfg.out_dir);
}

TEST(Pipeline, SynthWritesEveryRecordingAndAManifest) {
    auto cfg = small_config("synth");
    cfg.roster = {"geophone-front-10m", "accel-front-5m", "magnetometer-z", "accel-roof"};
    std::ostringstream log;
    cmd_synth(cfg, log);
    for (const auto& label : group_labels(cfg.group))
        for (int t = 0; t < cfg.trials; ++t) {
            const auto rec = load_recording(cfg.out_dir / "recordings" / recording_filename(label, t));
            EXPECT_EQ(rec.label, label);
            EXPECT_EQ(rec.channel_ids.size(), 4u);
            EXPECT_EQ(rec.num_samples(), 6000u);
        }
    const auto manifest = slurp(cfg.out_dir / "synth.manifest");
    EXPECT_NE(manifest.find("seed = 1\n"), std::string::npos);
    EXPECT_NE(manifest.find("file recordings/Saab83_t1.rec"), std::string::npos);

    // Re-running produces identical manifests and recordings.
    const auto rec_before = slurp(cfg.out_dir / "recordings" / "FordF150_t0.rec");
    cmd_synth(cfg, log);
    EXPECT_EQ(slurp(cfg.out_dir / "synth.manifest"), manifest);
    EXPECT_EQ(slurp(cfg.out_dir / "recordings" / "FordF150_t0.rec"), rec_before);
    fs::remove_all(cfg.out_dir);
}

TEST(Pipeline, HeatmapOutputs) {
    auto cfg = small_config("heatmap");
    cfg.roster = {"geophone-front-10m", "accel-front-5m", "magnetometer-z"};
    std::ostringstream log;
    cmd_synth(cfg, log);
    cmd_heatmap(cfg, "FordF150", log);
    const auto pgm = slurp(cfg.out_dir / "heatmaps" / "FordF150.pgm");
    // 3 channels x 2 trials x 3 blocks rows, 300 columns.
    EXPECT_EQ(pgm.rfind("P2\n# FordF150\n300 18\n255\n", 0), 0u);
    std::istringstream csv(slurp(cfg.out_dir / "heatmaps" / "FordF150.csv"));
    std::string line;
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string cell;
        std::getline(fields, cell, ',');
        std::getline(fields, cell, ',');
        double peak = 0.0;
        while (std::getline(fields, cell, ',')) {
            const double v = std::stod(cell);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 10.0);
            peak = std::max(peak, v);
        }
        EXPECT_EQ(peak, 10.0);
    }
    EXPECT_EQ(rows, 18);
    EXPECT_THROW(cmd_heatmap(cfg, "Batmobile", log), ConfigError);
    fs::remove_all(cfg.out_dir);
}

TEST(Pipeline, TrainAndEvalOutputs) {
    auto cfg = small_config("train");
    cfg.roster = {"geophone-front-10m", "accel-front-5m", "magnetometer-z"};
    std::ostringstream log;
    cmd_synth(cfg, log);
    cmd_rows(cfg, log);
    const auto outcome = cmd_train(cfg, log);
    for (const char* f : {"selection.csv", "mask.txt", "runlog.csv", "confusion.csv", "model.ckpt", "train.manifest"})
        EXPECT_TRUE(fs::exists(cfg.out_dir / f)) << f;
    EXPECT_NE(log.str().find("mask size: " + std::to_string(outcome.selection.mask.size())), std::string::npos);
    EXPECT_EQ(outcome.training.log.records.size(), 20u);

    std::ifstream mask_file(cfg.out_dir / "mask.txt");
    EXPECT_EQ(read_mask(mask_file).kept, outcome.selection.mask.kept);

    // Evaluating the held-out split from files reproduces the in-process result.
    const auto ev = cmd_eval(cfg, cfg.out_dir / "model.ckpt", cfg.out_dir / "rows.csv", true, log);
    EXPECT_EQ(ev.confusion.counts, outcome.test.confusion.counts);
    EXPECT_EQ(ev.accuracy, outcome.test.accuracy);
    const auto all = cmd_eval(cfg, cfg.out_dir / "model.ckpt", cfg.out_dir / "rows.csv", false, log);
    EXPECT_EQ(all.confusion.total(), 80);
    fs::remove_all(cfg.out_dir);
}

TEST(Pipeline, ImpossibleThresholdIsASelectionError) {
    auto cfg = small_config("threshold");
    cfg.threshold = 1000.0;
    const auto ds = build_dataset(cfg);
    EXPECT_THROW(run_training(cfg, ds), SelectionError);
}

TEST(Pipeline, LaterStagesNeedEarlierOutputs) {
    const auto cfg = small_config("missing");
    std::ostringstream log;
    EXPECT_THROW(cmd_rows(cfg, log), ParseError);
    EXPECT_THROW(cmd_train(cfg, log), ParseError);
    cmd_synth(cfg, log);
    fs::remove(cfg.out_dir / "recordings" / recording_filename("Saab83", 1));
    EXPECT_THROW(cmd_rows(cfg, log), ParseError);
    fs::remove_all(cfg.out_dir);
}

TEST(Pipeline, SeedsAreDistinctAcrossFilesAndStreams) {
    PipelineConfig cfg;
    std::set<std::uint64_t> seen;
    for (std::size_t li = 0; li < 7; ++li)
        for (int t = 0; t < 5; ++t) {
            seen.insert(recording_seed(cfg, li, t));
            seen.insert(block_seed(cfg, li, t));
            seen.insert(heatmap_seed(cfg, li, t));
        }
    EXPECT_EQ(seen.size(), 7u * 5u * 3u);
    EXPECT_EQ(recording_filename("HondaCivic", 3), "HondaCivic_t3.rec");
}
