#ifndef SIGCLASS_CONFIG_HPP
#define SIGCLASS_CONFIG_HPP

// Flat key = value pipeline configuration. '#' starts a comment. Unknown
// keys are rejected so typos do not silently fall back to defaults.

#include "sigclass/fuse_select.hpp"
#include "sigclass/synthgen.hpp"
#include "sigclass/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <string>
#include <vector>

namespace sigclass {

struct PipelineConfig {
    TargetGroup group = TargetGroup::Group2;
    std::uint64_t seed = 1;

    // synthesis
    int sample_rate_hz = 2000;
    double duration_s = 30.0;
    int trials = 5;                  // recordings per label
    std::vector<std::string> roster; // channel ids; empty = the full 13-channel setup
    ProfileOptions profile;
    std::string profiles_file;       // optional hand-edited profiles

    // rows
    int target_rows = 1000;
    int blocks_per_recording = 0;    // 0 = ceil(target_rows / (labels * trials))
    int heatmap_blocks = 20;
    std::vector<std::pair<std::string, double>> weights; // empty = uniform over the group's channels

    // selection
    double threshold = kDefaultSelectionThreshold;
    int max_classes_per_bin = 0;     // 0 = ceil(T/2) - 1, at least 1

    TrainConfig train;

    std::filesystem::path out_dir = "sigclass_out";

    /// Roster resolved against the default setup.
    ChannelRoster resolved_roster() const;

    FusionWeights fusion_weights() const;

    int resolved_blocks_per_recording(std::size_t num_labels) const;
    int resolved_max_classes_per_bin(std::size_t num_labels) const;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Applies one key = value pair; throws ConfigError on unknown keys or bad values.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);

PipelineConfig parse_config(std::istream& is, const std::string& source = "config");
PipelineConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in a fixed order. Parsing the output
/// yields an equivalent config.
void write_config(std::ostream& os, const PipelineConfig& cfg);

} // namespace sigclass

#endif // SIGCLASS_CONFIG_HPP
