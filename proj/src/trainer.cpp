#include "sigclass/trainer.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>

namespace sigclass {

namespace {

enum SeedStream : std::uint64_t { kSplitStream = 1, kInitStream = 2, kBatchStream = 3 };

struct Scores {
    double exact = 0.0;
    double bits = 0.0;
    double loss = 0.0;
};

Scores score(const DnnParams<double>& p, const Matrix& x, const Matrix& y) {
    Scores s;
    if (x.cols() == 0) return s;
    const auto tr = forward(p, x);
    s.loss = loss(tr.logits, y);
    long exact = 0;
    long bits = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        bool all = true;
        for (Eigen::Index k = 0; k < y.rows(); ++k) {
            const bool on = tr.logits(k, j) >= 0.0;
            const bool want = y(k, j) > 0.5;
            if (on == want) {
                ++bits;
            } else {
                all = false;
            }
        }
        exact += all ? 1 : 0;
    }
    s.exact = static_cast<double>(exact) / static_cast<double>(x.cols());
    s.bits = static_cast<double>(bits) / static_cast<double>(y.size());
    return s;
}

std::vector<SpectrumRow> gather(const Dataset& ds, const std::vector<std::size_t>& idx) {
    std::vector<SpectrumRow> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(ds.rows[i]);
    return out;
}

} // namespace

int Dataset::label_index(const std::string& label) const {
    const auto it = std::find(label_vocab.begin(), label_vocab.end(), label);
    return it == label_vocab.end() ? -1 : static_cast<int>(it - label_vocab.begin());
}

Dataset make_dataset(std::vector<SpectrumRow> rows) {
    Dataset ds;
    ds.rows = std::move(rows);
    for (const auto& r : ds.rows)
        if (std::find(ds.label_vocab.begin(), ds.label_vocab.end(), r.label) == ds.label_vocab.end())
            ds.label_vocab.push_back(r.label);
    return ds;
}

Dataset read_rows(std::istream& is, const std::string& source) {
    std::vector<SpectrumRow> rows;
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError(source + " line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(is, raw)) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = text::split(line, ',');
        if (fields.size() != kNumBins + 1)
            fail("expected 301 fields, found " + std::to_string(fields.size()));
        SpectrumRow row{Vector(kNumBins), std::string(text::trim(fields[kNumBins]))};
        if (row.label.empty()) fail("empty label");
        for (int i = 0; i < kNumBins; ++i) {
            const auto v = text::parse_double(fields[static_cast<std::size_t>(i)]);
            if (!v || !std::isfinite(*v)) fail("field " + std::to_string(i + 1) + " is not a finite number");
            row.bins[i] = *v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source + ": no data rows");
    return make_dataset(std::move(rows));
}

Dataset load_rows(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open rows file " + path.string());
    return read_rows(is, path.string());
}

void write_rows(std::ostream& os, const std::vector<SpectrumRow>& rows) {
    os << "# 300 fused magnitudes (1..300 Hz), then label\n";
    char buf[40];
    for (const auto& r : rows) {
        for (Eigen::Index i = 0; i < r.bins.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,", r.bins[i]);
            os << buf;
        }
        os << r.label << "\n";
    }
}

Vector one_hot(const std::string& label, const std::vector<std::string>& vocab) {
    const auto it = std::find(vocab.begin(), vocab.end(), label);
    if (it == vocab.end()) throw ValidationError("one_hot: label '" + label + "' is not in the vocabulary");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(vocab.size()));
    v[it - vocab.begin()] = 1.0;
    return v;
}

Split split(const Dataset& ds, const TrainConfig& cfg) {
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw ValidationError("split: train_fraction must lie in (0, 1)");
    const std::size_t n = ds.rows.size();
    if (n < 2) throw ValidationError("split: need at least 2 rows");

    std::mt19937_64 rng(derive_seed(cfg.seed, kSplitStream));
    Split s;
    auto n_train_of = [&](std::size_t count) {
        const auto k = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(count)));
        return std::clamp<std::size_t>(k, 1, count - 1);
    };

    if (!cfg.stratified) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto k = n_train_of(n);
        s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    } else {
        for (const auto& label : ds.label_vocab) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n; ++i)
                if (ds.rows[i].label == label) idx.push_back(i);
            std::shuffle(idx.begin(), idx.end(), rng);
            const auto k = idx.size() >= 2 ? n_train_of(idx.size()) : idx.size();
            s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
            s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
        }
    }

    for (const auto& label : ds.label_vocab) {
        const bool present = std::any_of(s.train.begin(), s.train.end(),
                                         [&](std::size_t i) { return ds.rows[i].label == label; });
        if (!present) s.warnings.push_back("class '" + label + "' has no training rows");
    }
    return s;
}

Matrix feature_matrix(const std::vector<SpectrumRow>& rows, const FeatureMask& mask, bool normalize_rows) {
    Matrix x(static_cast<Eigen::Index>(mask.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        Vector f = apply_mask(rows[j], mask);
        if (normalize_rows) {
            const double peak = f.cwiseAbs().maxCoeff();
            if (peak > 0.0) f /= peak;
        }
        x.col(static_cast<Eigen::Index>(j)) = f;
    }
    return x;
}

Matrix target_matrix(const std::vector<SpectrumRow>& rows, const std::vector<std::string>& vocab) {
    Matrix y(static_cast<Eigen::Index>(vocab.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) y.col(static_cast<Eigen::Index>(j)) = one_hot(rows[j].label, vocab);
    return y;
}

TrainResult train(const Dataset& ds, const FeatureMask& mask, const TrainConfig& cfg) {
    if (mask.empty()) throw ConfigError("train: feature selection produced an empty mask");
    return train(ds, mask, cfg,
                 init_network<double>(static_cast<Eigen::Index>(mask.size()),
                                      static_cast<Eigen::Index>(ds.label_vocab.size()),
                                      derive_seed(cfg.seed, kInitStream)));
}

TrainResult train(const Dataset& ds, const FeatureMask& mask, const TrainConfig& cfg, DnnParams<double> initial) {
    if (mask.empty()) throw ConfigError("train: feature selection produced an empty mask");
    if (initial.input_dim() != static_cast<Eigen::Index>(mask.size()))
        throw ValidationError("train: network input size differs from the mask size");
    if (initial.num_classes() != static_cast<Eigen::Index>(ds.label_vocab.size()))
        throw ValidationError("train: network output size differs from the class count");
    if (cfg.runs < 1) throw ValidationError("train: runs must be >= 1");
    if (!(cfg.learn_rate >= 0.0)) throw ValidationError("train: learn rate must be >= 0");

    TrainResult res;
    res.split = split(ds, cfg);
    if (cfg.batch_size < 1 || static_cast<std::size_t>(cfg.batch_size) > res.split.train.size())
        throw ValidationError("train: batch size " + std::to_string(cfg.batch_size) + " exceeds " +
                              std::to_string(res.split.train.size()) + " training rows");

    const auto train_rows = gather(ds, res.split.train);
    const auto test_rows = gather(ds, res.split.test);
    const Matrix x_train = feature_matrix(train_rows, mask, cfg.normalize_rows);
    const Matrix y_train = target_matrix(train_rows, ds.label_vocab);
    const Matrix x_test = feature_matrix(test_rows, mask, cfg.normalize_rows);
    const Matrix y_test = target_matrix(test_rows, ds.label_vocab);

    DnnParams<double> p = std::move(initial);
    res.optimizer = AdamState<double>::fresh(p, cfg.learn_rate);

    std::mt19937_64 rng(derive_seed(cfg.seed, kBatchStream));
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(x_train.cols()));
    std::iota(pool.begin(), pool.end(), 0);
    const auto b = static_cast<std::size_t>(cfg.batch_size);
    Matrix xb(x_train.rows(), cfg.batch_size);
    Matrix yb(y_train.rows(), cfg.batch_size);

    res.log.records.reserve(static_cast<std::size_t>(cfg.runs));
    for (int run = 1; run <= cfg.runs; ++run) {
        // Partial Fisher-Yates: the first b entries become a uniform sample
        // without replacement.
        for (std::size_t i = 0; i < b; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
            xb.col(static_cast<Eigen::Index>(i)) = x_train.col(pool[i]);
            yb.col(static_cast<Eigen::Index>(i)) = y_train.col(pool[i]);
        }
        const auto tr = forward(p, xb);
        RunRecord rec;
        rec.run = run;
        rec.batch_loss = loss(tr.logits, yb);
        adam_step(p, backward(p, tr, yb), res.optimizer);

        const auto on_train = score(p, x_train, y_train);
        const auto on_test = score(p, x_test, y_test);
        rec.train_loss = on_train.loss;
        rec.train_acc = on_train.exact;
        rec.train_bit_acc = on_train.bits;
        rec.test_loss = on_test.loss;
        rec.test_acc = on_test.exact;
        rec.test_bit_acc = on_test.bits;
        if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.batch_loss))
            throw NumericalError("train: loss diverged at run " + std::to_string(run));
        res.log.records.push_back(rec);
    }

    res.model.params = std::move(p);
    res.model.mask = mask;
    res.model.labels = ds.label_vocab;
    res.model.normalize_rows = cfg.normalize_rows;
    return res;
}

Evaluation evaluate(const DnnParams<double>& p, const std::vector<SpectrumRow>& rows, const FeatureMask& mask,
                    const std::vector<std::string>& vocab, bool normalize_rows) {
    if (rows.empty()) throw ValidationError("evaluate: no rows");
    if (p.num_classes() != static_cast<Eigen::Index>(vocab.size()))
        throw ValidationError("evaluate: vocabulary size differs from the network output size");
    const Matrix x = feature_matrix(rows, mask, normalize_rows);
    const Matrix y = target_matrix(rows, vocab);
    const auto tr = forward(p, x);

    Evaluation ev;
    const auto c = static_cast<Eigen::Index>(vocab.size());
    ev.confusion.labels = vocab;
    ev.confusion.counts = Eigen::MatrixXi::Zero(c, c + 1);
    int correct = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const int actual = static_cast<int>(std::find(vocab.begin(), vocab.end(), rows[static_cast<std::size_t>(j)].label) - vocab.begin());
        const int pred = decide(tr.logits.col(j));
        ev.confusion.counts(actual, pred == kUnclassified ? c : pred) += 1;
        correct += pred == actual ? 1 : 0;
    }
    const auto s = score(p, x, y);
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
    ev.bit_accuracy = s.bits;
    ev.loss = s.loss;
    return ev;
}

Evaluation evaluate(const Model& model, const std::vector<SpectrumRow>& rows) {
    return evaluate(model.params, rows, model.mask, model.labels, model.normalize_rows);
}

void write_runlog_csv(std::ostream& os, const RunLog& log) {
    os << "run,train_loss,train_acc,test_acc,test_loss,batch_loss,train_bit_acc,test_bit_acc\n";
    char buf[256];
    for (const auto& r : log.records) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.run, r.train_loss,
                      r.train_acc, r.test_acc, r.test_loss, r.batch_loss, r.train_bit_acc, r.test_bit_acc);
        os << buf;
    }
}

void write_confusion_csv(std::ostream& os, const ConfusionMatrix& cm) {
    os << "actual\\predicted";
    for (const auto& l : cm.labels) os << ',' << l;
    os << ",Unclassified\n";
    for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
        os << cm.labels[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) os << ',' << cm.counts(r, c);
        os << "\n";
    }
}

void print_confusion(std::ostream& os, const ConfusionMatrix& cm) {
    std::size_t w = std::string("Unclassified").size();
    for (const auto& l : cm.labels) w = std::max(w, l.size());
    const int width = static_cast<int>(w) + 1;
    os << std::setw(width) << "";
    for (const auto& l : cm.labels) os << std::setw(width) << l;
    os << std::setw(width) << "Unclassified" << "\n";
    for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
        os << std::setw(width) << cm.labels[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) os << std::setw(width) << cm.counts(r, c);
        os << "\n";
    }
}

} // namespace sigclass
