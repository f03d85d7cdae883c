#ifndef SIGCLASS_SYNTHGEN_HPP
#define SIGCLASS_SYNTHGEN_HPP

// Synthetic multi-channel vehicle signatures: sums of jittered sinusoids per
// sensor channel plus white Gaussian noise.

#include "sigclass/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sigclass {

enum class SensorKind { Microphone, Geophone, Accelerometer, Magnetometer };

std::string to_string(SensorKind kind);
SensorKind sensor_kind_from_string(const std::string& s);

struct SensorChannel {
    std::string id;
    SensorKind kind = SensorKind::Microphone;
    std::string placement;
};

using ChannelRoster = std::vector<SensorChannel>;

struct SpectralLine {
    int freq_hz = 1;
    double amplitude = 0.0;
    double jitter_hz = 0.0; // std-dev of the per-second frequency wobble
};

struct TargetProfile {
    std::string label;
    std::map<std::string, std::vector<SpectralLine>> lines_per_channel;
    double noise_rms = 1.0;
};

struct Recording {
    std::string label;
    int sample_rate_hz = 0;
    double duration_s = 0.0;
    std::vector<std::string> channel_ids;
    std::vector<Vector> samples; // one array per channel, same order as channel_ids

    std::size_t num_samples() const { return samples.empty() ? 0 : static_cast<std::size_t>(samples.front().size()); }
    const Vector& channel(const std::string& id) const;
};

enum class TargetGroup { Group1, Group2 };

std::string to_string(TargetGroup g);
TargetGroup target_group_from_string(const std::string& s);

/// The 13 sensor positions of the field setup.
ChannelRoster default_roster();

/// Channels fused for the given group.
std::vector<std::string> group_channels(TargetGroup g);

/// Class labels for the group; "AllQuiet" comes first.
std::vector<std::string> group_labels(TargetGroup g);

struct ProfileOptions {
    double noise_rms = 1.0;
    double min_amplitude = 0.2;
    double max_amplitude = 1.0;
    double jitter_hz = 0.5;
    int min_line_separation_hz = 3; // across every line in the group
    int min_freq_hz = 8;
    int max_freq_hz = 295;
    int min_lines = 4;
    int max_lines = 6;
};

/// Random but mutually distinct profiles: 7 for Group1, 4 for Group2.
std::vector<TargetProfile> build_group_profiles(TargetGroup group, std::uint64_t seed,
                                                const ProfileOptions& opts = {});

Recording synthesize_recording(const TargetProfile& profile, const ChannelRoster& setup,
                               double duration_s, int sample_rate_hz, std::uint64_t seed);

// Human-editable profile file:
//   [profile TruckA]
//   noise_rms = 1.0
//   line = geophone-front-10m 37 0.25 0.5     # channel freq amplitude jitter
void write_profiles(std::ostream& os, const std::vector<TargetProfile>& profiles);
std::vector<TargetProfile> read_profiles(std::istream& is);

// Recording file: one text header line
//   #sigclass-recording label=<l> rate=<hz> samples=<n> channels=<a,b,c>
// followed by n rows of little-endian float64 values, one per channel.
void save_recording(const std::filesystem::path& path, const Recording& rec);
Recording load_recording(const std::filesystem::path& path);

} // namespace sigclass

#endif // SIGCLASS_SYNTHGEN_HPP
