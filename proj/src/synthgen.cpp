#include "sigclass/synthgen.hpp"

#include "sigclass/byteio.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace sigclass {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* const kRecordingMagic = "#sigclass-recording";

} // namespace

std::string to_string(SensorKind kind) {
    switch (kind) {
    case SensorKind::Microphone: return "microphone";
    case SensorKind::Geophone: return "geophone";
    case SensorKind::Accelerometer: return "accelerometer";
    case SensorKind::Magnetometer: return "magnetometer";
    }
    return "unknown";
}

SensorKind sensor_kind_from_string(const std::string& s) {
    if (s == "microphone") return SensorKind::Microphone;
    if (s == "geophone") return SensorKind::Geophone;
    if (s == "accelerometer") return SensorKind::Accelerometer;
    if (s == "magnetometer") return SensorKind::Magnetometer;
    throw ConfigError("unknown sensor kind '" + s + "'");
}

std::string to_string(TargetGroup g) { return g == TargetGroup::Group1 ? "Group1" : "Group2"; }

TargetGroup target_group_from_string(const std::string& s) {
    if (s == "Group1" || s == "group1" || s == "1") return TargetGroup::Group1;
    if (s == "Group2" || s == "group2" || s == "2") return TargetGroup::Group2;
    throw ConfigError("unknown target group '" + s + "' (expected Group1 or Group2)");
}

const Vector& Recording::channel(const std::string& id) const {
    const auto it = std::find(channel_ids.begin(), channel_ids.end(), id);
    if (it == channel_ids.end()) throw ConfigError("recording '" + label + "' has no channel '" + id + "'");
    return samples[static_cast<std::size_t>(it - channel_ids.begin())];
}

ChannelRoster default_roster() {
    using K = SensorKind;
    return {
        {"mic-front-10m", K::Microphone, "10m front"},
        {"mic-front-5m", K::Microphone, "5m front"},
        {"mic-on-target", K::Microphone, "on target"},
        {"mic-side-10m", K::Microphone, "10m side"},
        {"geophone-front-10m", K::Geophone, "10m front"},
        {"geophone-front-5m", K::Geophone, "5m front"},
        {"accel-front-10m", K::Accelerometer, "10m front"},
        {"accel-front-5m", K::Accelerometer, "5m front"},
        {"accel-engine", K::Accelerometer, "on target engine"},
        {"accel-roof", K::Accelerometer, "on target roof"},
        {"magnetometer-x", K::Magnetometer, "10m side, x axis away from target"},
        {"magnetometer-y", K::Magnetometer, "10m side, y axis along sensor line"},
        {"magnetometer-z", K::Magnetometer, "10m side, z axis up"},
    };
}

std::vector<std::string> group_channels(TargetGroup g) {
    if (g == TargetGroup::Group1) return {"mic-front-10m", "mic-side-10m", "geophone-front-10m", "accel-front-10m"};
    return {"geophone-front-10m", "accel-front-5m", "magnetometer-z"};
}

std::vector<std::string> group_labels(TargetGroup g) {
    if (g == TargetGroup::Group1)
        return {"AllQuiet", "HondaCivic", "ToyotaCorolla", "FordF150", "DieselSprinter", "FordFusion", "AcuraMDX"};
    return {"AllQuiet", "HondaGenerator", "FordF150", "Saab83"};
}

std::vector<TargetProfile> build_group_profiles(TargetGroup group, std::uint64_t seed,
                                                const ProfileOptions& opts) {
    if (opts.min_lines < 3 || opts.max_lines < opts.min_lines)
        throw ConfigError("profile options: need 3 <= min_lines <= max_lines");
    if (opts.min_freq_hz < 1 || opts.max_freq_hz > kNumBins || opts.min_freq_hz > opts.max_freq_hz)
        throw ConfigError("profile options: line band must lie within 1..300 Hz");

    std::mt19937_64 rng(seed);
    const auto labels = group_labels(group);
    const auto channels = group_channels(group);

    std::uniform_int_distribution<int> n_lines_dist(opts.min_lines, opts.max_lines);
    std::uniform_int_distribution<int> freq_dist(opts.min_freq_hz, opts.max_freq_hz);
    std::uniform_real_distribution<double> amp_dist(opts.min_amplitude, opts.max_amplitude);
    std::uniform_int_distribution<std::size_t> chan_dist(0, channels.size() - 1);
    std::bernoulli_distribution second_channel(0.5);

    std::vector<int> used;
    auto far_enough = [&](int f) {
        return std::all_of(used.begin(), used.end(),
                           [&](int u) { return std::abs(u - f) >= opts.min_line_separation_hz; });
    };

    std::vector<TargetProfile> profiles;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        TargetProfile p;
        p.label = labels[i];
        p.noise_rms = opts.noise_rms;
        for (const auto& ch : channels) p.lines_per_channel[ch];
        if (i == 0) { // AllQuiet: background only
            profiles.push_back(std::move(p));
            continue;
        }
        const int n_lines = n_lines_dist(rng);
        const std::size_t offset = chan_dist(rng);
        for (int l = 0; l < n_lines; ++l) {
            int f = 0;
            int tries = 0;
            do {
                f = freq_dist(rng);
                if (++tries > 10000)
                    throw ConfigError("profile options: cannot place lines with the requested separation");
            } while (!far_enough(f));
            used.push_back(f);

            const SpectralLine line{f, amp_dist(rng), opts.jitter_hz};
            // Rotate through the channels so each profile spans at least two.
            const std::size_t c0 = (offset + static_cast<std::size_t>(l)) % channels.size();
            p.lines_per_channel[channels[c0]].push_back(line);
            if (second_channel(rng)) {
                const std::size_t c1 = chan_dist(rng);
                if (c1 != c0) p.lines_per_channel[channels[c1]].push_back(line);
            }
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

Recording synthesize_recording(const TargetProfile& profile, const ChannelRoster& setup,
                               double duration_s, int sample_rate_hz, std::uint64_t seed) {
    if (!(duration_s >= 1.0)) throw ValidationError("synthesize_recording: duration must be >= 1 s");
    if (sample_rate_hz < 2 * kNumBins)
        throw ValidationError("synthesize_recording: sample rate must be >= 600 Hz");
    const double n_real = duration_s * sample_rate_hz;
    const auto n = static_cast<Eigen::Index>(std::llround(n_real));
    if (std::abs(n_real - static_cast<double>(n)) > 1e-6)
        throw ValidationError("synthesize_recording: rate x duration must be an integer sample count");
    if (!(profile.noise_rms >= 0.0) || !std::isfinite(profile.noise_rms))
        throw ValidationError("profile '" + profile.label + "': noise_rms must be finite and >= 0");

    std::set<std::string> ids;
    for (const auto& ch : setup)
        if (!ids.insert(ch.id).second) throw ConfigError("duplicate channel id '" + ch.id + "' in setup");
    for (const auto& [id, lines] : profile.lines_per_channel) {
        if (!ids.count(id))
            throw ConfigError("profile '" + profile.label + "' references unknown channel '" + id + "'");
        for (const auto& line : lines) {
            if (!std::isfinite(line.amplitude) || line.amplitude < 0.0)
                throw ValidationError("profile '" + profile.label + "': line amplitude must be finite and >= 0");
            if (line.freq_hz < 1 || line.freq_hz > kNumBins)
                throw ValidationError("profile '" + profile.label + "': line frequency outside 1..300 Hz");
            if (!std::isfinite(line.jitter_hz) || line.jitter_hz < 0.0)
                throw ValidationError("profile '" + profile.label + "': jitter must be finite and >= 0");
        }
    }

    Recording rec;
    rec.label = profile.label;
    rec.sample_rate_hz = sample_rate_hz;
    rec.duration_s = duration_s;

    const double rate = sample_rate_hz;
    const Eigen::Index n_seconds = (n + sample_rate_hz - 1) / sample_rate_hz;

    for (std::size_t c = 0; c < setup.size(); ++c) {
        const auto& ch = setup[c];
        // Seeded by id so a channel's samples do not depend on the rest of the setup.
        std::mt19937_64 rng(derive_seed(seed, fnv1a(ch.id)));
        Vector x = Vector::Zero(n);

        const auto it = profile.lines_per_channel.find(ch.id);
        if (it != profile.lines_per_channel.end()) {
            std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
            for (const auto& line : it->second) {
                double phase = phase_dist(rng);
                std::normal_distribution<double> wobble(0.0, line.jitter_hz > 0.0 ? line.jitter_hz : 1.0);
                for (Eigen::Index s = 0; s < n_seconds; ++s) {
                    const double f = line.freq_hz + (line.jitter_hz > 0.0 ? wobble(rng) : 0.0);
                    const double w = kTwoPi * f / rate;
                    const Eigen::Index begin = s * sample_rate_hz;
                    const Eigen::Index end = std::min(n, begin + sample_rate_hz);
                    for (Eigen::Index t = begin; t < end; ++t)
                        x[t] += line.amplitude * std::sin(phase + w * static_cast<double>(t - begin));
                    // Carry the phase so the wobble does not introduce steps.
                    phase = std::fmod(phase + w * static_cast<double>(end - begin), kTwoPi);
                }
            }
        }
        if (profile.noise_rms > 0.0) {
            std::normal_distribution<double> noise(0.0, profile.noise_rms);
            for (Eigen::Index t = 0; t < n; ++t) x[t] += noise(rng);
        }
        rec.channel_ids.push_back(ch.id);
        rec.samples.push_back(std::move(x));
    }
    return rec;
}

void write_profiles(std::ostream& os, const std::vector<TargetProfile>& profiles) {
    os << "# line = <channel> <freq_hz> <amplitude> <jitter_hz>\n";
    for (const auto& p : profiles) {
        os << "\n[profile " << p.label << "]\n";
        os << "noise_rms = " << text::format_double(p.noise_rms) << "\n";
        for (const auto& [ch, lines] : p.lines_per_channel) {
            if (lines.empty()) os << "channel = " << ch << "\n";
            for (const auto& l : lines)
                os << "line = " << ch << ' ' << l.freq_hz << ' ' << text::format_double(l.amplitude) << ' '
                   << text::format_double(l.jitter_hz) << "\n";
        }
    }
}

std::vector<TargetProfile> read_profiles(std::istream& is) {
    std::vector<TargetProfile> out;
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError("profiles line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(is, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            const auto parts = text::split_ws(line.substr(1, line.size() - 2));
            if (parts.size() != 2 || parts[0] != "profile") fail("expected [profile <label>]");
            out.push_back(TargetProfile{std::string(parts[1]), {}, 1.0});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        if (out.empty()) fail("entry outside a [profile] section");
        const auto key = text::trim(line.substr(0, eq));
        const auto value = text::trim(line.substr(eq + 1));
        auto& p = out.back();
        if (key == "noise_rms") {
            const auto v = text::parse_double(value);
            if (!v) fail("noise_rms is not a number");
            p.noise_rms = *v;
        } else if (key == "channel") {
            p.lines_per_channel[std::string(value)];
        } else if (key == "line") {
            const auto f = text::split_ws(value);
            if (f.size() < 3 || f.size() > 4) fail("line needs <channel> <freq_hz> <amplitude> [jitter_hz]");
            const auto freq = text::parse_int<int>(f[1]);
            const auto amp = text::parse_double(f[2]);
            const auto jit = f.size() == 4 ? text::parse_double(f[3]) : std::optional<double>(0.0);
            if (!freq || !amp || !jit) fail("line fields must be numeric");
            p.lines_per_channel[std::string(f[0])].push_back(SpectralLine{*freq, *amp, *jit});
        } else {
            fail("unknown key '" + std::string(key) + "'");
        }
    }
    return out;
}

void save_recording(const std::filesystem::path& path, const Recording& rec) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write recording " + path.string());
    os << kRecordingMagic << " label=" << rec.label << " rate=" << rec.sample_rate_hz
       << " samples=" << rec.num_samples() << " channels=";
    for (std::size_t c = 0; c < rec.channel_ids.size(); ++c) os << (c ? "," : "") << rec.channel_ids[c];
    os << "\n";
    const auto n = static_cast<Eigen::Index>(rec.num_samples());
    for (Eigen::Index t = 0; t < n; ++t)
        for (const auto& ch : rec.samples) byteio::put_f64(os, ch[t]);
    if (!os) throw ConfigError("failed writing recording " + path.string());
}

Recording load_recording(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open recording " + path.string());
    std::string header;
    std::getline(is, header);
    const auto fields = text::split_ws(header);
    if (fields.empty() || fields[0] != kRecordingMagic)
        throw ParseError(path.string() + " line 1: not a sigclass recording");

    Recording rec;
    std::optional<std::size_t> n;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto eq = fields[i].find('=');
        if (eq == std::string_view::npos) throw ParseError(path.string() + " line 1: malformed header field");
        const auto key = fields[i].substr(0, eq);
        const auto value = fields[i].substr(eq + 1);
        if (key == "label") {
            rec.label = std::string(value);
        } else if (key == "rate") {
            const auto r = text::parse_int<int>(value);
            if (!r || *r < 2 * kNumBins) throw ParseError(path.string() + " line 1: bad rate");
            rec.sample_rate_hz = *r;
        } else if (key == "samples") {
            n = text::parse_int<std::size_t>(value);
            if (!n) throw ParseError(path.string() + " line 1: bad sample count");
        } else if (key == "channels") {
            for (auto id : text::split(value, ',')) rec.channel_ids.emplace_back(id);
        }
    }
    if (rec.label.empty() || rec.sample_rate_hz == 0 || !n || rec.channel_ids.empty())
        throw ParseError(path.string() + " line 1: incomplete header");

    const auto count = static_cast<Eigen::Index>(*n);
    rec.samples.assign(rec.channel_ids.size(), Vector(count));
    for (Eigen::Index t = 0; t < count; ++t)
        for (auto& ch : rec.samples)
            if (!byteio::get_f64(is, ch[t]))
                throw ParseError(path.string() + ": truncated sample data at row " + std::to_string(t + 2));
    rec.duration_s = static_cast<double>(*n) / rec.sample_rate_hz;
    return rec;
}

} // namespace sigclass
