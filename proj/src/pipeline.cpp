#include "sigclass/pipeline.hpp"

#include "sigclass/checkpoint.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sigclass {

namespace fs = std::filesystem;

namespace {

enum SeedStream : std::uint64_t {
    kProfileStream = 10,
    kRecordingStream = 11,
    kBlockStream = 12,
    kHeatmapStream = 13,
    kTrainStream = 14,
};

std::uint64_t per_file(std::uint64_t stream_seed, std::size_t label_index, int trial) {
    return derive_seed(stream_seed, label_index * 100000 + static_cast<std::uint64_t>(trial));
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream os(path, mode);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

std::vector<std::string> labels_of(const std::vector<TargetProfile>& profiles) {
    std::vector<std::string> out;
    for (const auto& p : profiles) out.push_back(p.label);
    return out;
}

class Manifest {
public:
    Manifest(const PipelineConfig& cfg, std::string stage) : dir_(cfg.out_dir), stage_(std::move(stage)) {
        body_ << "# sigclass " << stage_ << " manifest\n";
        write_config(body_, cfg);
        body_ << "\n";
    }
    void file(const std::string& name, const std::string& detail = {}) {
        body_ << "file " << name << (detail.empty() ? "" : " " + detail) << "\n";
    }
    void note(const std::string& line) { body_ << line << "\n"; }
    void save() {
        auto os = open_out(dir_ / (stage_ + ".manifest"));
        os << body_.str();
    }

private:
    fs::path dir_;
    std::string stage_;
    std::ostringstream body_;
};

/// Profiles persisted by cmd_synth take precedence so later stages see the
/// exact signatures that were synthesized.
std::vector<TargetProfile> stage_profiles(const PipelineConfig& cfg) {
    const auto path = cfg.out_dir / "profiles.txt";
    if (!fs::exists(path)) throw ParseError("missing " + path.string() + " (run synth first)");
    std::ifstream is(path);
    auto profiles = read_profiles(is);
    if (profiles.empty()) throw ParseError(path.string() + ": no profiles");
    return profiles;
}

Recording load_stage_recording(const PipelineConfig& cfg, const std::string& label, int trial) {
    const auto path = cfg.out_dir / "recordings" / recording_filename(label, trial);
    if (!fs::exists(path)) throw ParseError("missing recording " + path.string() + " (run synth first)");
    return load_recording(path);
}

} // namespace

std::vector<TargetProfile> resolve_profiles(const PipelineConfig& cfg) {
    if (!cfg.profiles_file.empty()) {
        std::ifstream is(cfg.profiles_file);
        if (!is) throw ConfigError("cannot open profiles file " + cfg.profiles_file);
        auto p = read_profiles(is);
        if (p.size() < 2) throw ConfigError("profiles file needs at least 2 profiles");
        return p;
    }
    return build_group_profiles(cfg.group, derive_seed(cfg.seed, kProfileStream), cfg.profile);
}

std::uint64_t recording_seed(const PipelineConfig& cfg, std::size_t label_index, int trial) {
    return per_file(derive_seed(cfg.seed, kRecordingStream), label_index, trial);
}

std::uint64_t block_seed(const PipelineConfig& cfg, std::size_t label_index, int trial) {
    return per_file(derive_seed(cfg.seed, kBlockStream), label_index, trial);
}

std::uint64_t heatmap_seed(const PipelineConfig& cfg, std::size_t label_index, int trial) {
    return per_file(derive_seed(cfg.seed, kHeatmapStream), label_index, trial);
}

std::uint64_t training_seed(const PipelineConfig& cfg) { return derive_seed(cfg.seed, kTrainStream); }

std::string recording_filename(const std::string& label, int trial) {
    return label + "_t" + std::to_string(trial) + ".rec";
}

std::vector<SpectrumRow> rows_from_recording(const Recording& rec, const FusionWeights& w, int blocks,
                                             std::uint64_t seed) {
    const auto per_channel = extract_blocks(rec, blocks, seed);
    for (const auto& id : w.selected_channels)
        if (!per_channel.count(id))
            throw ConfigError("recording '" + rec.label + "' lacks fused channel '" + id + "'");
    std::vector<SpectrumRow> rows;
    rows.reserve(static_cast<std::size_t>(blocks));
    for (int b = 0; b < blocks; ++b) {
        std::map<std::string, Spectrum> spectra;
        for (const auto& id : w.selected_channels)
            spectra.emplace(id, magnitude_spectrum(per_channel.at(id)[static_cast<std::size_t>(b)]));
        rows.push_back(fuse(spectra, w));
    }
    return rows;
}

Dataset build_dataset(const PipelineConfig& cfg) {
    cfg.validate();
    const auto profiles = resolve_profiles(cfg);
    const auto weights = cfg.fusion_weights();
    const auto full = cfg.resolved_roster();
    ChannelRoster fused;
    for (const auto& id : weights.selected_channels) {
        const auto it = std::find_if(full.begin(), full.end(), [&](const SensorChannel& c) { return c.id == id; });
        if (it == full.end()) throw ConfigError("fusion channel '" + id + "' is not in the roster");
        fused.push_back(*it);
    }
    const int blocks = cfg.resolved_blocks_per_recording(profiles.size());

    std::vector<SpectrumRow> rows;
    for (std::size_t li = 0; li < profiles.size(); ++li) {
        for (int t = 0; t < cfg.trials; ++t) {
            // Lines on channels outside the fused set do not affect the fused rows.
            TargetProfile restricted = profiles[li];
            std::erase_if(restricted.lines_per_channel, [&](const auto& kv) {
                return std::none_of(fused.begin(), fused.end(), [&](const SensorChannel& c) { return c.id == kv.first; });
            });
            const auto rec = synthesize_recording(restricted, fused, cfg.duration_s, cfg.sample_rate_hz,
                                                  recording_seed(cfg, li, t));
            auto r = rows_from_recording(rec, weights, blocks, block_seed(cfg, li, t));
            rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
        }
    }
    return make_dataset(std::move(rows));
}

TrainOutcome run_training(const PipelineConfig& cfg, const Dataset& ds) {
    TrainOutcome out;
    const auto max_per_bin = cfg.resolved_max_classes_per_bin(ds.label_vocab.size());
    out.selection = compute_selection(ds.rows, cfg.threshold, max_per_bin);

    TrainConfig tc = cfg.train;
    tc.threshold = cfg.threshold;
    tc.seed = training_seed(cfg);
    out.training = train(ds, out.selection.mask, tc);

    std::vector<SpectrumRow> test_rows, train_rows;
    for (auto i : out.training.split.test) test_rows.push_back(ds.rows[i]);
    for (auto i : out.training.split.train) train_rows.push_back(ds.rows[i]);
    out.test = evaluate(out.training.model, test_rows);
    out.train = evaluate(out.training.model, train_rows);
    return out;
}

void cmd_synth(const PipelineConfig& cfg, std::ostream& log) {
    cfg.validate();
    ensure_dir(cfg.out_dir / "recordings");
    const auto profiles = resolve_profiles(cfg);
    const auto roster = cfg.resolved_roster();

    Manifest manifest(cfg, "synth");
    {
        auto os = open_out(cfg.out_dir / "profiles.txt");
        write_profiles(os, profiles);
    }
    manifest.file("profiles.txt");
    for (std::size_t li = 0; li < profiles.size(); ++li) {
        for (int t = 0; t < cfg.trials; ++t) {
            const auto seed = recording_seed(cfg, li, t);
            const auto rec = synthesize_recording(profiles[li], roster, cfg.duration_s, cfg.sample_rate_hz, seed);
            const auto name = recording_filename(profiles[li].label, t);
            save_recording(cfg.out_dir / "recordings" / name, rec);
            manifest.file("recordings/" + name, "label=" + profiles[li].label + " trial=" + std::to_string(t) +
                                                    " seed=" + std::to_string(seed));
        }
    }
    manifest.save();
    log << "synth: " << profiles.size() << " labels x " << cfg.trials << " trials -> "
        << (cfg.out_dir / "recordings").string() << "\n";
}

void cmd_rows(const PipelineConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto profiles = stage_profiles(cfg);
    const auto weights = cfg.fusion_weights();
    const int blocks = cfg.resolved_blocks_per_recording(profiles.size());

    std::vector<SpectrumRow> rows;
    Manifest manifest(cfg, "rows");
    for (std::size_t li = 0; li < profiles.size(); ++li) {
        for (int t = 0; t < cfg.trials; ++t) {
            const auto rec = load_stage_recording(cfg, profiles[li].label, t);
            const auto seed = block_seed(cfg, li, t);
            auto r = rows_from_recording(rec, weights, blocks, seed);
            rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
            manifest.note("source recordings/" + recording_filename(profiles[li].label, t) +
                          " blocks=" + std::to_string(blocks) + " seed=" + std::to_string(seed));
        }
    }
    {
        auto os = open_out(cfg.out_dir / "rows.csv");
        write_rows(os, rows);
    }
    manifest.file("rows.csv", "rows=" + std::to_string(rows.size()));
    manifest.save();
    log << "rows: " << rows.size() << " fused rows -> " << (cfg.out_dir / "rows.csv").string() << "\n";
}

void cmd_heatmap(const PipelineConfig& cfg, const std::string& label, std::ostream& log) {
    cfg.validate();
    const auto profiles = stage_profiles(cfg);
    const auto labels = labels_of(profiles);
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ConfigError("heatmap: unknown label '" + label + "'");
    const auto li = static_cast<std::size_t>(it - labels.begin());

    // Rows grouped by channel in recording order, trials within a channel.
    std::vector<std::string> channel_order;
    std::map<std::string, std::vector<HeatMapInput>> by_channel;
    std::vector<Spectrum> raw;
    for (int t = 0; t < cfg.trials; ++t) {
        const auto rec = load_stage_recording(cfg, label, t);
        if (channel_order.empty()) channel_order = rec.channel_ids;
        const auto blocks = extract_blocks(rec, cfg.heatmap_blocks, heatmap_seed(cfg, li, t));
        for (const auto& id : rec.channel_ids) {
            for (const auto& blk : blocks.at(id)) {
                auto s = magnitude_spectrum(blk);
                raw.push_back(s);
                by_channel[id].push_back(HeatMapInput{t, std::move(s)});
            }
        }
    }
    std::vector<HeatMapInput> ordered;
    std::vector<Spectrum> raw_ordered;
    for (const auto& id : channel_order)
        for (auto& in : by_channel[id]) {
            raw_ordered.push_back(in.spectrum);
            ordered.push_back(std::move(in));
        }
    const auto hm = build_heatmap(ordered);

    ensure_dir(cfg.out_dir / "heatmaps");
    Manifest manifest(cfg, "heatmap_" + label);
    {
        auto os = open_out(cfg.out_dir / "heatmaps" / (label + ".pgm"));
        write_heatmap_pgm(os, hm);
    }
    {
        auto os = open_out(cfg.out_dir / "heatmaps" / (label + ".csv"));
        write_heatmap_csv(os, hm);
    }
    {
        auto os = open_out(cfg.out_dir / "heatmaps" / (label + "_spectra.csv"));
        write_spectra_csv(os, raw_ordered);
    }
    manifest.file("heatmaps/" + label + ".pgm", "rows=" + std::to_string(hm.rows.size()));
    manifest.file("heatmaps/" + label + ".csv");
    manifest.file("heatmaps/" + label + "_spectra.csv");
    manifest.save();
    log << "heatmap: " << label << " " << hm.rows.size() << " rows over " << channel_order.size()
        << " channels -> " << (cfg.out_dir / "heatmaps").string() << "\n";
}

TrainOutcome cmd_train(const PipelineConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto rows_path = cfg.out_dir / "rows.csv";
    if (!fs::exists(rows_path)) throw ParseError("missing " + rows_path.string() + " (run rows first)");
    const auto ds = load_rows(rows_path);

    Manifest manifest(cfg, "train");
    const auto max_per_bin = cfg.resolved_max_classes_per_bin(ds.label_vocab.size());
    const auto sel = analyze_selection(ds.rows, cfg.threshold, max_per_bin);
    {
        auto os = open_out(cfg.out_dir / "selection.csv");
        write_selection_report(os, sel.report);
    }
    manifest.file("selection.csv");
    for (const auto& w : sel.report.warnings) log << "warning: " << w << "\n";
    if (sel.mask.empty()) {
        manifest.note("selection failed: no bins kept");
        manifest.save();
    }

    auto outcome = run_training(cfg, ds);
    for (const auto& w : outcome.training.split.warnings) log << "warning: " << w << "\n";
    {
        auto os = open_out(cfg.out_dir / "mask.txt");
        write_mask(os, outcome.selection.mask);
    }
    {
        auto os = open_out(cfg.out_dir / "runlog.csv");
        write_runlog_csv(os, outcome.training.log);
    }
    {
        auto os = open_out(cfg.out_dir / "confusion.csv");
        write_confusion_csv(os, outcome.test.confusion);
    }
    save_checkpoint(cfg.out_dir / "model.ckpt", outcome.training.model);
    manifest.file("mask.txt", "bins=" + std::to_string(outcome.selection.mask.size()));
    manifest.file("runlog.csv", "runs=" + std::to_string(outcome.training.log.records.size()));
    manifest.file("confusion.csv");
    manifest.file("model.ckpt");
    manifest.save();

    const auto& last = outcome.training.log.records.back();
    log << "rows: " << ds.rows.size() << " (" << outcome.training.split.train.size() << " train / "
        << outcome.training.split.test.size() << " test), classes: " << ds.label_vocab.size() << "\n";
    log << "mask size: " << outcome.selection.mask.size() << "\n";
    log << std::fixed << std::setprecision(4);
    log << "runs: " << outcome.training.log.records.size() << ", final train loss " << last.train_loss
        << ", train accuracy " << outcome.train.accuracy << "\n";
    log << "test accuracy: " << outcome.test.accuracy << " (per-element " << outcome.test.bit_accuracy << ")\n";
    log.unsetf(std::ios::floatfield);
    log << "confusion matrix (rows = actual):\n";
    print_confusion(log, outcome.test.confusion);
    return outcome;
}

Evaluation cmd_eval(const PipelineConfig& cfg, const fs::path& checkpoint, const fs::path& rows,
                    bool test_split_only, std::ostream& log) {
    cfg.validate();
    const auto model = load_checkpoint(checkpoint);
    if (!fs::exists(rows)) throw ParseError("missing rows file " + rows.string());
    const auto ds = load_rows(rows);
    for (const auto& l : ds.label_vocab)
        if (std::find(model.labels.begin(), model.labels.end(), l) == model.labels.end())
            throw ValidationError("eval: label '" + l + "' is unknown to the checkpoint");

    std::vector<SpectrumRow> subset;
    if (test_split_only) {
        TrainConfig tc = cfg.train;
        tc.seed = training_seed(cfg);
        for (auto i : split(ds, tc).test) subset.push_back(ds.rows[i]);
    } else {
        subset = ds.rows;
    }
    auto ev = evaluate(model, subset);

    ensure_dir(cfg.out_dir);
    Manifest manifest(cfg, "eval");
    manifest.note("checkpoint " + checkpoint.string());
    manifest.note("rows " + rows.string() + (test_split_only ? " (test split)" : " (all rows)"));
    {
        auto os = open_out(cfg.out_dir / "eval_confusion.csv");
        write_confusion_csv(os, ev.confusion);
    }
    manifest.file("eval_confusion.csv");
    manifest.save();

    log << "evaluated " << subset.size() << " rows, mask size " << model.mask.size() << "\n";
    log << std::fixed << std::setprecision(4) << "accuracy: " << ev.accuracy << " (per-element "
        << ev.bit_accuracy << ")\n";
    log.unsetf(std::ios::floatfield);
    print_confusion(log, ev.confusion);
    return ev;
}

} // namespace sigclass
