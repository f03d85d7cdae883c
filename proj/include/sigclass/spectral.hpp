#ifndef SIGCLASS_SPECTRAL_HPP
#define SIGCLASS_SPECTRAL_HPP

// 1 s block extraction, 300-bin magnitude spectra and normalized heat maps.

#include "sigclass/common.hpp"
#include "sigclass/synthgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sigclass {

/// Exactly one second of one channel. Bin width is therefore 1 Hz.
struct TimeBlock {
    std::string channel_id;
    std::string label;
    Eigen::Index offset = 0; // first sample in the source recording
    Vector samples;
};

/// bins[i] = |X(i+1 Hz)| for i in 0..299.
struct Spectrum {
    std::string channel_id;
    std::string label;
    Vector bins;
};

struct HeatMapRow {
    std::string channel_id;
    int trial = 0;
    Vector values; // 300 values in [0, 10]
};

struct HeatMap {
    std::string label;
    std::vector<HeatMapRow> rows;
};

/// Blocks per channel, keyed by channel id. All channels share the same
/// `count` offsets, drawn uniformly over [0, duration - 1 s].
using ChannelBlocks = std::map<std::string, std::vector<TimeBlock>>;

ChannelBlocks extract_blocks(const Recording& rec, int count, std::uint64_t seed);

/// Start offsets used by extract_blocks for the same arguments.
std::vector<Eigen::Index> block_offsets(const Recording& rec, int count, std::uint64_t seed);

Spectrum magnitude_spectrum(const TimeBlock& block);

/// Input rows are (channel, trial, spectrum); each row scales to a peak of 10.
struct HeatMapInput {
    int trial = 0;
    Spectrum spectrum;
};

HeatMap build_heatmap(const std::vector<HeatMapInput>& spectra);

/// ASCII PGM (P2), one image row per heat-map row, 10 -> 255.
void write_heatmap_pgm(std::ostream& os, const HeatMap& hm);

/// channel_id,trial,bin1..bin300
void write_heatmap_csv(std::ostream& os, const HeatMap& hm);

/// label,channel_id,bin1..bin300
void write_spectra_csv(std::ostream& os, const std::vector<Spectrum>& spectra);

} // namespace sigclass

#endif // SIGCLASS_SPECTRAL_HPP
