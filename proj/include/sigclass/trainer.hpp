#ifndef SIGCLASS_TRAINER_HPP
#define SIGCLASS_TRAINER_HPP

// Dataset handling, the run-based training loop and evaluation.

#include "sigclass/checkpoint.hpp"
#include "sigclass/dnn.hpp"
#include "sigclass/fuse_select.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sigclass {

struct Dataset {
    std::vector<SpectrumRow> rows;
    std::vector<std::string> label_vocab; // first-appearance order

    int label_index(const std::string& label) const;
};

/// Builds the vocabulary in first-appearance order.
Dataset make_dataset(std::vector<SpectrumRow> rows);

// 301-column CSV: 300 magnitudes then the label token. Lines starting with
// '#' are comments.
Dataset read_rows(std::istream& is, const std::string& source = "rows");
Dataset load_rows(const std::filesystem::path& path);
void write_rows(std::ostream& os, const std::vector<SpectrumRow>& rows);

Vector one_hot(const std::string& label, const std::vector<std::string>& vocab);

struct TrainConfig {
    double train_fraction = 0.8;
    int batch_size = 150;
    int runs = 200;
    double learn_rate = 0.005;
    double threshold = kDefaultSelectionThreshold;
    std::uint64_t seed = 1;
    bool normalize_rows = true;
    bool stratified = false;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::string> warnings;
};

Split split(const Dataset& ds, const TrainConfig& cfg);

struct RunRecord {
    int run = 0;
    double train_loss = 0.0;     // full training set, after this run's step
    double train_acc = 0.0;      // exact one-hot match rate
    double test_acc = 0.0;
    double test_loss = 0.0;
    double batch_loss = 0.0;     // the batch the step was taken on, before the step
    double train_bit_acc = 0.0;  // per-element agreement of rounded outputs
    double test_bit_acc = 0.0;
};

struct RunLog {
    std::vector<RunRecord> records;
};

struct ConfusionMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXi counts; // labels x (labels + 1); last column is Unclassified

    int total() const { return counts.sum(); }
    int unclassified(int actual) const { return counts(actual, counts.cols() - 1); }
};

struct Evaluation {
    double accuracy = 0.0;
    double bit_accuracy = 0.0;
    double loss = 0.0;
    ConfusionMatrix confusion;
};

/// Masked (and optionally max-normalized) features, one sample per column.
Matrix feature_matrix(const std::vector<SpectrumRow>& rows, const FeatureMask& mask, bool normalize_rows);

/// One-hot targets, one sample per column.
Matrix target_matrix(const std::vector<SpectrumRow>& rows, const std::vector<std::string>& vocab);

struct TrainResult {
    Model model;
    RunLog log;
    AdamState<double> optimizer;
    Split split;
};

TrainResult train(const Dataset& ds, const FeatureMask& mask, const TrainConfig& cfg);

/// Same loop starting from the given parameters instead of a fresh init.
TrainResult train(const Dataset& ds, const FeatureMask& mask, const TrainConfig& cfg, DnnParams<double> initial);

Evaluation evaluate(const DnnParams<double>& p, const std::vector<SpectrumRow>& rows, const FeatureMask& mask,
                    const std::vector<std::string>& vocab, bool normalize_rows = true);

Evaluation evaluate(const Model& model, const std::vector<SpectrumRow>& rows);

void write_runlog_csv(std::ostream& os, const RunLog& log);
void write_confusion_csv(std::ostream& os, const ConfusionMatrix& cm);

/// Fixed-width table for terminals.
void print_confusion(std::ostream& os, const ConfusionMatrix& cm);

} // namespace sigclass

#endif // SIGCLASS_TRAINER_HPP
