#include "sigclass/spectral.hpp"

#include "sigclass/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <random>
#include <unordered_map>

namespace sigclass {

namespace {

const Fft<double>& cached_plan(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<Fft<double>>> plans;
    auto& slot = plans[n];
    if (!slot) slot = std::make_unique<Fft<double>>(n);
    return *slot;
}

} // namespace

std::vector<Eigen::Index> block_offsets(const Recording& rec, int count, std::uint64_t seed) {
    if (count < 1) throw ValidationError("extract_blocks: count must be >= 1");
    const auto n = static_cast<Eigen::Index>(rec.num_samples());
    const Eigen::Index len = rec.sample_rate_hz;
    if (len <= 0 || n < len) throw ValidationError("extract_blocks: recording '" + rec.label + "' is shorter than 1 s");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> dist(0, n - len);
    std::vector<Eigen::Index> offsets(static_cast<std::size_t>(count));
    for (auto& o : offsets) o = dist(rng);
    return offsets;
}

ChannelBlocks extract_blocks(const Recording& rec, int count, std::uint64_t seed) {
    const auto offsets = block_offsets(rec, count, seed);
    const Eigen::Index len = rec.sample_rate_hz;
    ChannelBlocks out;
    for (std::size_t c = 0; c < rec.channel_ids.size(); ++c) {
        auto& blocks = out[rec.channel_ids[c]];
        blocks.reserve(offsets.size());
        for (const auto off : offsets)
            blocks.push_back(TimeBlock{rec.channel_ids[c], rec.label, off, rec.samples[c].segment(off, len)});
    }
    return out;
}

Spectrum magnitude_spectrum(const TimeBlock& block) {
    const auto n = static_cast<std::size_t>(block.samples.size());
    if (n < static_cast<std::size_t>(2 * kNumBins))
        throw ValidationError("magnitude_spectrum: block needs >= 600 samples for a 300 Hz bin");
    if (!block.samples.allFinite()) throw ValidationError("magnitude_spectrum: block contains non-finite samples");

    const auto X = cached_plan(n).forward_real(std::span<const double>(block.samples.data(), n));
    Spectrum s{block.channel_id, block.label, Vector(kNumBins)};
    for (int i = 0; i < kNumBins; ++i) s.bins[i] = std::abs(X[static_cast<std::size_t>(i + 1)]);
    return s;
}

HeatMap build_heatmap(const std::vector<HeatMapInput>& spectra) {
    if (spectra.empty()) throw ValidationError("build_heatmap: no spectra");
    HeatMap hm;
    hm.label = spectra.front().spectrum.label;
    hm.rows.reserve(spectra.size());
    for (const auto& in : spectra) {
        if (in.spectrum.label != hm.label) throw ValidationError("build_heatmap: spectra carry different labels");
        const double peak = in.spectrum.bins.maxCoeff();
        Vector v = peak > 0.0 ? Vector((in.spectrum.bins / peak) * 10.0) : Vector(Vector::Zero(in.spectrum.bins.size()));
        hm.rows.push_back(HeatMapRow{in.spectrum.channel_id, in.trial, std::move(v)});
    }
    return hm;
}

void write_heatmap_pgm(std::ostream& os, const HeatMap& hm) {
    os << "P2\n# " << hm.label << "\n" << kNumBins << ' ' << hm.rows.size() << "\n255\n";
    for (const auto& row : hm.rows) {
        for (Eigen::Index i = 0; i < row.values.size(); ++i) {
            const long px = std::lround(std::clamp(row.values[i], 0.0, 10.0) * 25.5);
            os << (i ? " " : "") << px;
        }
        os << "\n";
    }
}

void write_heatmap_csv(std::ostream& os, const HeatMap& hm) {
    os << "channel_id,trial";
    for (int i = 1; i <= kNumBins; ++i) os << ",hz" << i;
    os << "\n";
    char buf[32];
    for (const auto& row : hm.rows) {
        os << row.channel_id << ',' << row.trial;
        for (Eigen::Index i = 0; i < row.values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%.6f", row.values[i]);
            os << buf;
        }
        os << "\n";
    }
}

void write_spectra_csv(std::ostream& os, const std::vector<Spectrum>& spectra) {
    os << "label,channel_id";
    for (int i = 1; i <= kNumBins; ++i) os << ",hz" << i;
    os << "\n";
    char buf[40];
    for (const auto& s : spectra) {
        os << s.label << ',' << s.channel_id;
        for (Eigen::Index i = 0; i < s.bins.size(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", s.bins[i]);
            os << buf;
        }
        os << "\n";
    }
}

} // namespace sigclass
