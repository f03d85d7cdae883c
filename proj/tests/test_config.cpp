#include "sigclass/config.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace sigclass;

TEST(Config, Defaults) {
    const PipelineConfig cfg;
    EXPECT_EQ(cfg.group, TargetGroup::Group2);
    EXPECT_EQ(cfg.train.batch_size, 150);
    EXPECT_EQ(cfg.train.runs, 200);
    EXPECT_EQ(cfg.train.learn_rate, 0.005);
    EXPECT_EQ(cfg.train.train_fraction, 0.8);
    EXPECT_EQ(cfg.threshold, 1.75);
    EXPECT_EQ(cfg.target_rows, 1000);
    EXPECT_EQ(cfg.resolved_roster().size(), 13u);
    EXPECT_EQ(cfg.resolved_blocks_per_recording(4), 50);   // 1000 rows / (4 labels x 5 trials)
    EXPECT_EQ(cfg.resolved_blocks_per_recording(7), 29);   // rounded up
    EXPECT_EQ(cfg.resolved_max_classes_per_bin(4), 1);
    EXPECT_EQ(cfg.resolved_max_classes_per_bin(7), 3);
    const auto w = cfg.fusion_weights();
    EXPECT_EQ(w.selected_channels, group_channels(TargetGroup::Group2));
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesKeysCommentsAndLists) {
    std::istringstream is(R"(# experiment
group = Group1
seed = 17          # trailing comment
duration_s = 12.5
roster = mic-front-10m, accel-roof
weights = mic-front-10m:2, accel-roof:0.5
runs = 1000
normalize_rows = off
max_classes_per_bin = auto
out = /tmp/x
)");
    const auto cfg = parse_config(is);
    EXPECT_EQ(cfg.group, TargetGroup::Group1);
    EXPECT_EQ(cfg.seed, 17u);
    EXPECT_EQ(cfg.duration_s, 12.5);
    EXPECT_EQ(cfg.roster, (std::vector<std::string>{"mic-front-10m", "accel-roof"}));
    ASSERT_EQ(cfg.weights.size(), 2u);
    EXPECT_EQ(cfg.weights[1].first, "accel-roof");
    EXPECT_EQ(cfg.weights[1].second, 0.5);
    EXPECT_EQ(cfg.train.runs, 1000);
    EXPECT_FALSE(cfg.train.normalize_rows);
    EXPECT_EQ(cfg.max_classes_per_bin, 0);
    EXPECT_EQ(cfg.out_dir, "/tmp/x");
    EXPECT_EQ(cfg.fusion_weights().weights.at("mic-front-10m"), 2.0);
}

TEST(Config, ErrorsNameTheLine) {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream is(text);
        try {
            parse_config(is, "exp.cfg");
            FAIL() << "expected ConfigError for: " << text;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_error("seed = 1\nbogus_key = 3\n", "exp.cfg line 2");
    expect_error("runs = many\n", "line 1");
    expect_error("just words\n", "line 1");
    expect_error("group = Group9\n", "line 1");
    expect_error("stratified = maybe\n", "line 1");
    expect_error("weights = a-b-c\n", "line 1");
}

TEST(Config, ValidateRejectsOutOfRangeValues) {
    auto bad = [](const std::string& key, const std::string& value) {
        PipelineConfig cfg;
        apply_setting(cfg, key, value);
        EXPECT_THROW(cfg.validate(), ConfigError) << key << "=" << value;
    };
    bad("sample_rate_hz", "500");
    bad("duration_s", "0.5");
    bad("threshold", "1");
    bad("train_fraction", "1");
    bad("batch_size", "0");
    bad("runs", "0");
    bad("learn_rate", "-1");
    bad("roster", "mic-front-10m,not-a-sensor");
    bad("weights", "mic-front-10m:0");
    bad("weights", "mic-front-10m:-1,accel-roof:2");
}

TEST(Config, WriteParseRoundTrip) {
    PipelineConfig cfg;
    apply_setting(cfg, "group", "Group1");
    apply_setting(cfg, "seed", "123456789012");
    apply_setting(cfg, "learn_rate", "0.0125");
    apply_setting(cfg, "roster", "mic-front-10m,mic-side-10m");
    apply_setting(cfg, "weights", "mic-front-10m:0.3,mic-side-10m:0.7");
    apply_setting(cfg, "stratified", "on");
    std::ostringstream a;
    write_config(a, cfg);
    std::istringstream is(a.str());
    const auto back = parse_config(is);
    std::ostringstream b;
    write_config(b, back);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(back.seed, 123456789012u);
    EXPECT_EQ(back.train.learn_rate, 0.0125);
    EXPECT_TRUE(back.train.stratified);
    EXPECT_EQ(back.weights, cfg.weights);
}
