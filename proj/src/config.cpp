#include "sigclass/config.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace sigclass {

namespace {

double to_double(const std::string& key, const std::string& v) {
    const auto d = text::parse_double(v);
    if (!d || !std::isfinite(*d)) throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    return *d;
}

int to_int(const std::string& key, const std::string& v) {
    const auto i = text::parse_int<int>(v);
    if (!i) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    return *i;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("config: '" + key + "' expects on/off, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v) {
    std::vector<std::string> out;
    for (auto item : text::split(v, ',')) {
        item = text::trim(item);
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

} // namespace

ChannelRoster PipelineConfig::resolved_roster() const {
    auto all = default_roster();
    if (roster.empty()) return all;
    ChannelRoster out;
    for (const auto& id : roster) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const SensorChannel& c) { return c.id == id; });
        if (it == all.end()) throw ConfigError("config: roster names unknown channel '" + id + "'");
        out.push_back(*it);
    }
    return out;
}

FusionWeights PipelineConfig::fusion_weights() const {
    if (weights.empty()) return FusionWeights::uniform(group_channels(group));
    FusionWeights w;
    for (const auto& [id, value] : weights) {
        w.selected_channels.push_back(id);
        w.weights[id] = value;
    }
    return w;
}

int PipelineConfig::resolved_blocks_per_recording(std::size_t num_labels) const {
    if (blocks_per_recording > 0) return blocks_per_recording;
    const auto recordings = static_cast<int>(num_labels) * trials;
    return (target_rows + recordings - 1) / recordings;
}

int PipelineConfig::resolved_max_classes_per_bin(std::size_t num_labels) const {
    return max_classes_per_bin > 0 ? max_classes_per_bin : default_max_classes_per_bin(static_cast<int>(num_labels));
}

void PipelineConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("config: " + what);
    };
    require(sample_rate_hz >= 2 * kNumBins, "sample_rate_hz must be >= 600");
    require(duration_s >= 1.0, "duration_s must be >= 1");
    require(trials >= 1, "trials must be >= 1");
    require(target_rows >= 1, "target_rows must be >= 1");
    require(blocks_per_recording >= 0, "blocks_per_recording must be >= 0");
    require(heatmap_blocks >= 1, "heatmap_blocks must be >= 1");
    require(threshold > 1.0, "threshold must be > 1");
    require(max_classes_per_bin >= 0, "max_classes_per_bin must be >= 0");
    require(train.train_fraction > 0.0 && train.train_fraction < 1.0, "train_fraction must lie in (0, 1)");
    require(train.batch_size >= 1, "batch_size must be >= 1");
    require(train.runs >= 1, "runs must be >= 1");
    require(train.learn_rate >= 0.0, "learn_rate must be >= 0");
    require(profile.noise_rms >= 0.0, "noise_rms must be >= 0");
    double total = 0.0;
    for (const auto& [id, w] : weights) {
        require(w >= 0.0, "weight for '" + id + "' must be >= 0");
        total += w;
    }
    require(weights.empty() || total > 0.0, "fusion weights sum to zero");
    resolved_roster();
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto& p = cfg.profile;
    auto& t = cfg.train;
    if (key == "group") {
        cfg.group = target_group_from_string(value);
    } else if (key == "seed") {
        const auto s = text::parse_int<std::uint64_t>(value);
        if (!s) throw ConfigError("config: 'seed' expects a non-negative integer, got '" + value + "'");
        cfg.seed = *s;
    } else if (key == "sample_rate_hz") {
        cfg.sample_rate_hz = to_int(key, value);
    } else if (key == "duration_s") {
        cfg.duration_s = to_double(key, value);
    } else if (key == "trials") {
        cfg.trials = to_int(key, value);
    } else if (key == "roster") {
        cfg.roster = value == "all" ? std::vector<std::string>{} : to_list(value);
    } else if (key == "profiles_file") {
        cfg.profiles_file = value;
    } else if (key == "noise_rms") {
        p.noise_rms = to_double(key, value);
    } else if (key == "min_amplitude") {
        p.min_amplitude = to_double(key, value);
    } else if (key == "max_amplitude") {
        p.max_amplitude = to_double(key, value);
    } else if (key == "jitter_hz") {
        p.jitter_hz = to_double(key, value);
    } else if (key == "min_line_separation_hz") {
        p.min_line_separation_hz = to_int(key, value);
    } else if (key == "min_lines") {
        p.min_lines = to_int(key, value);
    } else if (key == "max_lines") {
        p.max_lines = to_int(key, value);
    } else if (key == "target_rows") {
        cfg.target_rows = to_int(key, value);
    } else if (key == "blocks_per_recording") {
        cfg.blocks_per_recording = to_int(key, value);
    } else if (key == "heatmap_blocks") {
        cfg.heatmap_blocks = to_int(key, value);
    } else if (key == "weights") {
        cfg.weights.clear();
        if (value == "default") return;
        for (const auto& item : to_list(value)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw ConfigError("config: weights entries look like channel:weight");
            cfg.weights.emplace_back(item.substr(0, colon), to_double(key, item.substr(colon + 1)));
        }
    } else if (key == "threshold") {
        cfg.threshold = to_double(key, value);
    } else if (key == "max_classes_per_bin") {
        cfg.max_classes_per_bin = value == "auto" ? 0 : to_int(key, value);
    } else if (key == "train_fraction") {
        t.train_fraction = to_double(key, value);
    } else if (key == "batch_size") {
        t.batch_size = to_int(key, value);
    } else if (key == "runs") {
        t.runs = to_int(key, value);
    } else if (key == "learn_rate") {
        t.learn_rate = to_double(key, value);
    } else if (key == "normalize_rows") {
        t.normalize_rows = to_bool(key, value);
    } else if (key == "stratified") {
        t.stratified = to_bool(key, value);
    } else if (key == "out") {
        cfg.out_dir = value;
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

PipelineConfig parse_config(std::istream& is, const std::string& source) {
    PipelineConfig cfg;
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(source + " line " + std::to_string(line_no) + ": expected key = value");
        try {
            apply_setting(cfg, std::string(text::trim(line.substr(0, eq))), std::string(text::trim(line.substr(eq + 1))));
        } catch (const ConfigError& e) {
            throw ConfigError(source + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    return parse_config(is, path.string());
}

void write_config(std::ostream& os, const PipelineConfig& cfg) {
    using text::format_double;
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
        return s;
    };
    os << "group = " << to_string(cfg.group) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "sample_rate_hz = " << cfg.sample_rate_hz << "\n";
    os << "duration_s = " << format_double(cfg.duration_s) << "\n";
    os << "trials = " << cfg.trials << "\n";
    os << "roster = " << (cfg.roster.empty() ? std::string("all") : list(cfg.roster)) << "\n";
    if (!cfg.profiles_file.empty()) os << "profiles_file = " << cfg.profiles_file << "\n";
    os << "noise_rms = " << format_double(cfg.profile.noise_rms) << "\n";
    os << "min_amplitude = " << format_double(cfg.profile.min_amplitude) << "\n";
    os << "max_amplitude = " << format_double(cfg.profile.max_amplitude) << "\n";
    os << "jitter_hz = " << format_double(cfg.profile.jitter_hz) << "\n";
    os << "min_line_separation_hz = " << cfg.profile.min_line_separation_hz << "\n";
    os << "min_lines = " << cfg.profile.min_lines << "\n";
    os << "max_lines = " << cfg.profile.max_lines << "\n";
    os << "target_rows = " << cfg.target_rows << "\n";
    os << "blocks_per_recording = " << cfg.blocks_per_recording << "\n";
    os << "heatmap_blocks = " << cfg.heatmap_blocks << "\n";
    const auto w = cfg.fusion_weights();
    os << "weights = ";
    for (std::size_t i = 0; i < w.selected_channels.size(); ++i) {
        const auto& id = w.selected_channels[i];
        os << (i ? "," : "") << id << ':' << format_double(w.weights.at(id));
    }
    os << "\n";
    os << "threshold = " << format_double(cfg.threshold) << "\n";
    os << "max_classes_per_bin = " << cfg.max_classes_per_bin << "\n";
    os << "train_fraction = " << format_double(cfg.train.train_fraction) << "\n";
    os << "batch_size = " << cfg.train.batch_size << "\n";
    os << "runs = " << cfg.train.runs << "\n";
    os << "learn_rate = " << format_double(cfg.train.learn_rate) << "\n";
    os << "normalize_rows = " << (cfg.train.normalize_rows ? "on" : "off") << "\n";
    os << "stratified = " << (cfg.train.stratified ? "on" : "off") << "\n";
    os << "out = " << cfg.out_dir.string() << "\n";
}

} // namespace sigclass
