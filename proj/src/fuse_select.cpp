#include "sigclass/fuse_select.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <istream>
#include <set>

namespace sigclass {

FusionWeights FusionWeights::uniform(const std::vector<std::string>& channels) {
    FusionWeights w;
    w.selected_channels = channels;
    for (const auto& c : channels) w.weights[c] = 1.0;
    return w;
}

int default_max_classes_per_bin(int num_classes) {
    return std::max(1, (num_classes + 1) / 2 - 1);
}

SpectrumRow fuse(const std::map<std::string, Spectrum>& spectra, const FusionWeights& w) {
    if (w.selected_channels.empty()) throw ConfigError("fuse: no channels selected");
    SpectrumRow row{Vector::Zero(kNumBins), {}};
    double total = 0.0;
    bool first = true;
    for (const auto& id : w.selected_channels) {
        const auto s = spectra.find(id);
        if (s == spectra.end()) throw ConfigError("fuse: missing spectrum for channel '" + id + "'");
        const auto wi = w.weights.find(id);
        if (wi == w.weights.end()) throw ConfigError("fuse: no weight for channel '" + id + "'");
        if (!(wi->second >= 0.0) || !std::isfinite(wi->second))
            throw ValidationError("fuse: weight for '" + id + "' must be finite and >= 0");
        if (s->second.bins.size() != kNumBins) throw ValidationError("fuse: spectrum for '" + id + "' is not 300 bins");
        if (first) {
            row.label = s->second.label;
            first = false;
        } else if (s->second.label != row.label) {
            throw ValidationError("fuse: spectra carry different labels");
        }
        row.bins += wi->second * s->second.bins.cwiseAbs();
        total += wi->second;
    }
    if (!(total > 0.0)) throw ValidationError("fuse: total fusion weight is zero");
    row.bins /= total;
    return row;
}

SelectionResult analyze_selection(const std::vector<SpectrumRow>& rows, double threshold,
                                  int max_classes_per_bin) {
    if (!(threshold > 1.0)) throw ValidationError("compute_selection: threshold must be > 1");
    if (max_classes_per_bin < 1) throw ValidationError("compute_selection: max_classes_per_bin must be >= 1");

    SelectionReport rep;
    std::vector<int> counts;
    for (const auto& r : rows) {
        if (r.bins.size() != kNumBins || !r.bins.allFinite())
            throw ValidationError("compute_selection: every row needs 300 finite bins");
        const auto it = std::find(rep.labels.begin(), rep.labels.end(), r.label);
        if (it == rep.labels.end()) {
            rep.labels.push_back(r.label);
            counts.push_back(1);
        } else {
            ++counts[static_cast<std::size_t>(it - rep.labels.begin())];
        }
    }
    if (rep.labels.size() < 2) throw ValidationError("compute_selection: need at least 2 distinct labels");
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] < 10)
            throw ValidationError("compute_selection: label '" + rep.labels[k] + "' has fewer than 10 rows");

    const auto n_classes = static_cast<Eigen::Index>(rep.labels.size());
    rep.threshold = threshold;
    rep.max_classes_per_bin = max_classes_per_bin;
    rep.class_means = Matrix::Zero(n_classes, kNumBins);
    rep.global_mean = Vector::Zero(kNumBins);

    for (const auto& r : rows) {
        const auto k = std::find(rep.labels.begin(), rep.labels.end(), r.label) - rep.labels.begin();
        rep.class_means.row(k) += r.bins.transpose();
        rep.global_mean += r.bins;
    }
    for (Eigen::Index k = 0; k < n_classes; ++k) rep.class_means.row(k) /= counts[static_cast<std::size_t>(k)];
    rep.global_mean /= static_cast<double>(rows.size());

    rep.ratios = Matrix::Constant(n_classes, kNumBins, std::numeric_limits<double>::quiet_NaN());
    rep.per_bin_class_counts = Eigen::VectorXi::Zero(kNumBins);

    SelectionResult res;
    std::vector<int> zero_bins;
    for (int i = 0; i < kNumBins; ++i) {
        if (!(rep.global_mean[i] > 0.0)) {
            zero_bins.push_back(i + 1);
            continue;
        }
        rep.ratios.col(i) = rep.class_means.col(i) / rep.global_mean[i];
        const int hot = static_cast<int>((rep.ratios.col(i).array() > threshold).count());
        rep.per_bin_class_counts[i] = hot;
        if (hot >= 1 && hot <= max_classes_per_bin) res.mask.kept.push_back(i + 1);
    }
    if (!zero_bins.empty()) {
        std::string msg = "global mean is zero at " + std::to_string(zero_bins.size()) + " bin(s), excluded:";
        for (int b : zero_bins) msg += " " + std::to_string(b);
        rep.warnings.push_back(std::move(msg));
    }
    res.report = std::move(rep);
    return res;
}

SelectionResult compute_selection(const std::vector<SpectrumRow>& rows, double threshold,
                                  int max_classes_per_bin) {
    auto res = analyze_selection(rows, threshold, max_classes_per_bin);
    if (res.mask.empty())
        throw SelectionError("feature selection kept no bins at threshold " + text::format_double(threshold) +
                             " with at most " + std::to_string(max_classes_per_bin) + " class(es) per bin");
    return res;
}

Vector apply_mask(const SpectrumRow& row, const FeatureMask& mask) {
    if (mask.empty()) throw ValidationError("apply_mask: empty mask");
    Vector out(static_cast<Eigen::Index>(mask.size()));
    for (std::size_t j = 0; j < mask.size(); ++j) {
        const int b = mask.kept[j];
        if (b < 1 || b > row.bins.size()) throw ValidationError("apply_mask: bin index out of range");
        out[static_cast<Eigen::Index>(j)] = row.bins[b - 1];
    }
    return out;
}

void write_selection_report(std::ostream& os, const SelectionReport& report) {
    char buf[40];
    auto emit_row = [&](const std::string& name, const auto& values) {
        os << name;
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            const double v = values[i];
            if (std::isnan(v)) {
                os << ",";
            } else {
                std::snprintf(buf, sizeof(buf), ",%.10g", v);
                os << buf;
            }
        }
        os << "\n";
    };
    os << "# threshold=" << text::format_double(report.threshold)
       << " max_classes_per_bin=" << report.max_classes_per_bin << "\n";
    for (const auto& w : report.warnings) os << "# warning: " << w << "\n";
    os << "row";
    for (int i = 1; i <= kNumBins; ++i) os << ",hz" << i;
    os << "\n";
    for (std::size_t k = 0; k < report.labels.size(); ++k)
        emit_row("ratio:" + report.labels[k], Vector(report.ratios.row(static_cast<Eigen::Index>(k)).transpose()));
    for (std::size_t k = 0; k < report.labels.size(); ++k)
        emit_row("mean:" + report.labels[k], Vector(report.class_means.row(static_cast<Eigen::Index>(k)).transpose()));
    emit_row("mean:all", report.global_mean);
    emit_row("super_threshold_classes", Vector(report.per_bin_class_counts.cast<double>()));
}

void write_mask(std::ostream& os, const FeatureMask& mask) {
    os << "# retained bins (Hz), " << mask.size() << " total\n";
    for (int b : mask.kept) os << b << "\n";
}

FeatureMask read_mask(std::istream& is) {
    FeatureMask m;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto b = text::parse_int<int>(line);
        if (!b || *b < 1 || *b > kNumBins)
            throw ParseError("mask line " + std::to_string(line_no) + ": expected a bin in 1..300");
        m.kept.push_back(*b);
    }
    std::sort(m.kept.begin(), m.kept.end());
    m.kept.erase(std::unique(m.kept.begin(), m.kept.end()), m.kept.end());
    return m;
}

} // namespace sigclass
