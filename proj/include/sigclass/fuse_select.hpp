#ifndef SIGCLASS_FUSE_SELECT_HPP
#define SIGCLASS_FUSE_SELECT_HPP

// Weighted sensor fusion into one 300-bin row, and selection of the bins
// whose per-class mean stands out against the all-class mean.

#include "sigclass/common.hpp"
#include "sigclass/spectral.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sigclass {

struct FusionWeights {
    std::vector<std::string> selected_channels;
    std::map<std::string, double> weights;

    /// Weight 1 on each listed channel.
    static FusionWeights uniform(const std::vector<std::string>& channels);
};

struct SpectrumRow {
    Vector bins; // 300 fused magnitudes, bins[i] <-> (i+1) Hz
    std::string label;
};

/// Retained bins, 1-based (bin k is k Hz), sorted and distinct.
struct FeatureMask {
    std::vector<int> kept;

    std::size_t size() const { return kept.size(); }
    bool empty() const { return kept.empty(); }
};

struct SelectionReport {
    std::vector<std::string> labels;        // class order of the rows below
    Matrix class_means;                     // labels x 300
    Vector global_mean;                     // 300
    Matrix ratios;                          // labels x 300, NaN where the global mean is 0
    double threshold = 0.0;
    int max_classes_per_bin = 0;
    Eigen::VectorXi per_bin_class_counts;   // classes above threshold, per bin
    std::vector<std::string> warnings;
};

struct SelectionResult {
    FeatureMask mask;
    SelectionReport report;
};

inline constexpr double kDefaultSelectionThreshold = 1.75;

/// ceil(T/2) - 1, floored at 1 so two-class problems keep their bins.
int default_max_classes_per_bin(int num_classes);

/// bins[i] = sum_j w_j |S_ij| / sum_j w_j over the selected channels.
SpectrumRow fuse(const std::map<std::string, Spectrum>& spectra, const FusionWeights& w);

/// Runs the selection and returns whatever survives, possibly nothing.
SelectionResult analyze_selection(const std::vector<SpectrumRow>& rows, double threshold,
                                  int max_classes_per_bin);

/// As analyze_selection, but an empty mask is a SelectionError.
SelectionResult compute_selection(const std::vector<SpectrumRow>& rows, double threshold,
                                  int max_classes_per_bin);

/// Masked feature vector in ascending bin order.
Vector apply_mask(const SpectrumRow& row, const FeatureMask& mask);

/// label,hz1..hz300 ratio table plus global mean and super-threshold counts.
void write_selection_report(std::ostream& os, const SelectionReport& report);

void write_mask(std::ostream& os, const FeatureMask& mask);
FeatureMask read_mask(std::istream& is);

} // namespace sigclass

#endif // SIGCLASS_FUSE_SELECT_HPP
