#ifndef SIGCLASS_PIPELINE_HPP
#define SIGCLASS_PIPELINE_HPP

// Stage orchestration: synth -> rows -> heatmap -> train -> eval.
//
// The in-memory functions and the file-backed cmd_* functions share the same
// seed derivation, so rows built in memory match rows built from recording
// files byte for byte.
//
// Output directory layout:
//   profiles.txt                       generated (or copied) target profiles
//   recordings/<label>_t<k>.rec        one file per (label, trial)
//   rows.csv                           301-column fused rows
//   heatmaps/<label>.{pgm,csv}         normalized heat map and its CSV twin
//   heatmaps/<label>_spectra.csv       raw spectra behind the heat map
//   selection.csv, mask.txt            selection report and retained bins
//   runlog.csv, confusion.csv          training curves, test confusion matrix
//   model.ckpt                         checkpoint
//   <stage>.manifest                   resolved config and files written

#include "sigclass/config.hpp"
#include "sigclass/fuse_select.hpp"
#include "sigclass/spectral.hpp"
#include "sigclass/synthgen.hpp"
#include "sigclass/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sigclass {

/// Generated from the config seed, or read from cfg.profiles_file.
std::vector<TargetProfile> resolve_profiles(const PipelineConfig& cfg);

std::uint64_t recording_seed(const PipelineConfig& cfg, std::size_t label_index, int trial);
std::uint64_t block_seed(const PipelineConfig& cfg, std::size_t label_index, int trial);
std::uint64_t heatmap_seed(const PipelineConfig& cfg, std::size_t label_index, int trial);
std::uint64_t training_seed(const PipelineConfig& cfg);

std::string recording_filename(const std::string& label, int trial);

/// Fused rows for `blocks` random 1 s windows of one recording.
std::vector<SpectrumRow> rows_from_recording(const Recording& rec, const FusionWeights& w, int blocks,
                                             std::uint64_t seed);

/// Synthesizes every (label, trial) recording in memory, restricted to the
/// fused channels, and returns the fused rows.
Dataset build_dataset(const PipelineConfig& cfg);

struct TrainOutcome {
    SelectionResult selection;
    TrainResult training;
    Evaluation test;
    Evaluation train;
};

/// Selection, training and final evaluation on an already built dataset.
TrainOutcome run_training(const PipelineConfig& cfg, const Dataset& ds);

// File-backed stages. Each writes <out>/<stage>.manifest and logs a short
// summary to `log`.
void cmd_synth(const PipelineConfig& cfg, std::ostream& log);
void cmd_rows(const PipelineConfig& cfg, std::ostream& log);
void cmd_heatmap(const PipelineConfig& cfg, const std::string& label, std::ostream& log);
TrainOutcome cmd_train(const PipelineConfig& cfg, std::ostream& log);
Evaluation cmd_eval(const PipelineConfig& cfg, const std::filesystem::path& checkpoint,
                    const std::filesystem::path& rows, bool test_split_only, std::ostream& log);

} // namespace sigclass

#endif // SIGCLASS_PIPELINE_HPP
