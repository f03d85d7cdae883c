#include "sigclass/fuse_select.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace sigclass;

namespace {

Spectrum flat(const std::string& ch, double v, const std::string& label = "L") {
    return Spectrum{ch, label, Vector::Constant(kNumBins, v)};
}

// Rows of one class, every bin 1 except the given (hz, value) overrides.
std::vector<SpectrumRow> class_rows(const std::string& label, int n, std::initializer_list<std::pair<int, double>> hot) {
    std::vector<SpectrumRow> rows;
    for (int i = 0; i < n; ++i) {
        SpectrumRow r{Vector::Ones(kNumBins), label};
        for (auto [hz, v] : hot) r.bins[hz - 1] = v;
        rows.push_back(r);
    }
    return rows;
}

void append(std::vector<SpectrumRow>& a, const std::vector<SpectrumRow>& b) { a.insert(a.end(), b.begin(), b.end()); }

// Straight-line reimplementation of the bin rule, used as the oracle for
// the randomized checks.
std::vector<int> oracle_mask(const std::vector<SpectrumRow>& rows, double threshold, int guard) {
    std::vector<std::string> labels;
    for (const auto& r : rows)
        if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
    std::vector<int> kept;
    for (int bin = 0; bin < kNumBins; ++bin) {
        double all = 0.0;
        for (const auto& r : rows) all += r.bins[bin];
        all /= static_cast<double>(rows.size());
        if (all <= 0.0) continue;
        int hot = 0;
        for (const auto& l : labels) {
            double sum = 0.0;
            int n = 0;
            for (const auto& r : rows)
                if (r.label == l) {
                    sum += r.bins[bin];
                    ++n;
                }
            if (sum / n / all > threshold) ++hot;
        }
        if (hot >= 1 && hot <= guard) kept.push_back(bin + 1);
    }
    return kept;
}

} // namespace

TEST(Fuse, SingleChannelIsIdentity) {
    Spectrum s{"a", "L", Vector::LinSpaced(kNumBins, 0.5, 9.0)};
    const auto row = fuse({{"a", s}}, FusionWeights::uniform({"a"}));
    EXPECT_EQ(row.bins, s.bins);
    EXPECT_EQ(row.label, "L");
}

TEST(Fuse, WorkedExamples) {
    const std::map<std::string, Spectrum> m{{"a", flat("a", 2.0)}, {"b", flat("b", 4.0)}, {"c", flat("c", 100.0)}};
    const auto eq = fuse(m, FusionWeights::uniform({"a", "b"}));
    EXPECT_TRUE(eq.bins.isApproxToConstant(3.0, 0.0));
    FusionWeights w{{"a", "b"}, {{"a", 1.0}, {"b", 3.0}}};
    EXPECT_TRUE(fuse(m, w).bins.isApproxToConstant(3.5, 0.0));
    // Zero weight drops a channel entirely.
    FusionWeights z{{"a", "c"}, {{"a", 1.0}, {"c", 0.0}}};
    EXPECT_TRUE(fuse(m, z).bins.isApproxToConstant(2.0, 0.0));
}

TEST(Fuse, Errors) {
    const std::map<std::string, Spectrum> m{{"a", flat("a", 2.0)}, {"b", flat("b", 4.0, "Other")}};
    EXPECT_THROW(fuse(m, FusionWeights::uniform({"a", "missing"})), ConfigError);
    EXPECT_THROW(fuse(m, FusionWeights{{"a"}, {{"a", 0.0}}}), ValidationError);
    EXPECT_THROW(fuse(m, FusionWeights{{"a"}, {{"a", -1.0}}}), ValidationError);
    EXPECT_THROW(fuse(m, FusionWeights::uniform({"a", "b"})), ValidationError);
    EXPECT_THROW(fuse(m, FusionWeights{}), ConfigError);
}

TEST(Fuse, ConvexCombinationProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 50.0), wu(0.01, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::map<std::string, Spectrum> m;
        FusionWeights w;
        for (const char* id : {"a", "b", "c", "d"}) {
            Spectrum s{id, "L", Vector(kNumBins)};
            for (int i = 0; i < kNumBins; ++i) s.bins[i] = u(rng);
            m[id] = s;
            w.selected_channels.push_back(id);
            w.weights[id] = wu(rng);
        }
        const auto row = fuse(m, w);
        for (int i = 0; i < kNumBins; ++i) {
            double lo = 1e300, hi = -1e300;
            for (const auto& [id, s] : m) {
                lo = std::min(lo, s.bins[i]);
                hi = std::max(hi, s.bins[i]);
            }
            ASSERT_GE(row.bins[i], lo - 1e-12);
            ASSERT_LE(row.bins[i], hi + 1e-12);
        }
        // Uniform rescaling of the weights changes nothing.
        FusionWeights w2 = w;
        for (auto& [id, v] : w2.weights) v *= 7.0;
        EXPECT_LT((fuse(m, w2).bins - row.bins).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Select, SingleStandoutBin) {
    auto rows = class_rows("A", 10, {{50, 10.0}});
    append(rows, class_rows("B", 10, {}));
    const auto res = compute_selection(rows, 1.5, 1);
    EXPECT_EQ(res.mask.kept, std::vector<int>{50});
    EXPECT_NEAR(res.report.ratios(0, 49), 10.0 / 5.5, 1e-15);
    EXPECT_EQ(res.report.per_bin_class_counts[49], 1);
    EXPECT_EQ(res.report.labels, (std::vector<std::string>{"A", "B"}));
}

TEST(Select, IdenticalClassesSelectNothing) {
    auto rows = class_rows("A", 12, {});
    append(rows, class_rows("B", 12, {}));
    EXPECT_THROW(compute_selection(rows, 1.75, 1), SelectionError);
    EXPECT_TRUE(analyze_selection(rows, 1.75, 1).mask.empty());
}

TEST(Select, GuardDropsBinsHotInTooManyClasses) {
    auto rows = class_rows("A", 10, {{7, 10.0}, {9, 10.0}});
    append(rows, class_rows("B", 10, {{7, 10.0}}));
    append(rows, class_rows("C", 10, {}));
    append(rows, class_rows("D", 10, {}));
    const auto res = compute_selection(rows, 1.5, 1);
    EXPECT_EQ(res.mask.kept, std::vector<int>{9});
    EXPECT_EQ(res.report.per_bin_class_counts[6], 2);
    EXPECT_EQ(compute_selection(rows, 1.5, 2).mask.kept, (std::vector<int>{7, 9}));
}

TEST(Select, RatioEqualToThresholdIsExcluded) {
    // Class mean 3, other class 1: ratio 3 / 2 = 1.5 exactly.
    auto rows = class_rows("A", 10, {{100, 3.0}, {200, 3.0001}});
    append(rows, class_rows("B", 10, {}));
    const auto res = analyze_selection(rows, 1.5, 1);
    EXPECT_EQ(res.report.ratios(0, 99), 1.5);
    EXPECT_EQ(res.mask.kept, std::vector<int>{200});
}

TEST(Select, ZeroMeanBinsAreWarnedAndSkipped) {
    auto rows = class_rows("A", 10, {{3, 0.0}, {40, 9.0}});
    append(rows, class_rows("B", 10, {{3, 0.0}}));
    const auto res = compute_selection(rows, 1.5, 1);
    EXPECT_EQ(res.mask.kept, std::vector<int>{40});
    ASSERT_EQ(res.report.warnings.size(), 1u);
    EXPECT_NE(res.report.warnings[0].find(" 3"), std::string::npos);
    EXPECT_TRUE(std::isnan(res.report.ratios(0, 2)));
    EXPECT_EQ(res.report.per_bin_class_counts[2], 0);
}

TEST(Select, Preconditions) {
    auto rows = class_rows("A", 10, {{5, 5.0}});
    append(rows, class_rows("B", 10, {}));
    EXPECT_THROW(compute_selection(rows, 1.0, 1), ValidationError);
    EXPECT_THROW(compute_selection(rows, 1.5, 0), ValidationError);
    EXPECT_THROW(compute_selection(class_rows("A", 20, {}), 1.5, 1), ValidationError);
    auto few = class_rows("A", 10, {{5, 5.0}});
    append(few, class_rows("B", 9, {}));
    EXPECT_THROW(compute_selection(few, 1.5, 1), ValidationError);
    rows[3].bins[10] = std::nan("");
    EXPECT_THROW(compute_selection(rows, 1.5, 1), ValidationError);
}

TEST(Select, DefaultGuard) {
    EXPECT_EQ(default_max_classes_per_bin(2), 1);
    EXPECT_EQ(default_max_classes_per_bin(3), 1);
    EXPECT_EQ(default_max_classes_per_bin(4), 1);
    EXPECT_EQ(default_max_classes_per_bin(5), 2);
    EXPECT_EQ(default_max_classes_per_bin(7), 3);
}

TEST(Select, AgreesWithOracleOnRandomData) {
    std::mt19937_64 rng(8);
    std::gamma_distribution<double> g(2.0, 1.0);
    const std::vector<std::string> labels{"A", "B", "C", "D", "E"};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<SpectrumRow> rows;
        for (std::size_t k = 0; k < labels.size(); ++k)
            for (int n = 0; n < 10 + trial; ++n) {
                SpectrumRow r{Vector(kNumBins), labels[k]};
                for (int i = 0; i < kNumBins; ++i) r.bins[i] = g(rng) * (i % 7 == static_cast<int>(k) ? 4.0 : 1.0);
                rows.push_back(r);
            }
        for (double t : {1.3, 1.75, 2.5})
            for (int guard : {1, 2, 4}) EXPECT_EQ(analyze_selection(rows, t, guard).mask.kept, oracle_mask(rows, t, guard));
    }
}

TEST(Select, StableUnderRowOrderAndUniformScale) {
    auto rows = class_rows("A", 10, {{50, 10.0}, {61, 4.0}});
    append(rows, class_rows("B", 10, {{12, 6.0}}));
    append(rows, class_rows("C", 10, {{290, 3.0}}));
    const auto base = compute_selection(rows, 1.75, 1).mask.kept;
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(2));
    EXPECT_EQ(compute_selection(shuffled, 1.75, 1).mask.kept, base);
    for (auto& r : rows) r.bins *= 123.0;
    EXPECT_EQ(compute_selection(rows, 1.75, 1).mask.kept, base);
}

TEST(Mask, ApplyInAscendingOrder) {
    SpectrumRow row{Vector::LinSpaced(kNumBins, 1.0, 300.0), "L"};
    for (std::size_t n : {3u, 23u, 115u}) {
        FeatureMask m;
        for (std::size_t j = 0; j < n; ++j) m.kept.push_back(static_cast<int>(1 + 2 * j));
        const auto v = apply_mask(row, m);
        ASSERT_EQ(v.size(), static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(v[static_cast<Eigen::Index>(j)], 1.0 + 2.0 * j);
    }
    EXPECT_THROW(apply_mask(row, FeatureMask{}), ValidationError);
    EXPECT_THROW(apply_mask(row, FeatureMask{{301}}), ValidationError);
}

TEST(Mask, FileRoundTripAndErrors) {
    FeatureMask m{{4, 17, 250}};
    std::ostringstream os;
    write_mask(os, m);
    std::istringstream is(os.str());
    EXPECT_EQ(read_mask(is).kept, m.kept);
    std::istringstream bad("# header\n5\n0\n");
    try {
        read_mask(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Select, ReportLayout) {
    auto rows = class_rows("A", 10, {{50, 10.0}});
    append(rows, class_rows("B", 10, {}));
    const auto res = compute_selection(rows, 1.5, 1);
    std::ostringstream os;
    write_selection_report(os, res.report);
    const auto text = os.str();
    EXPECT_NE(text.find("# threshold=1.5 max_classes_per_bin=1\n"), std::string::npos);
    EXPECT_NE(text.find("\nratio:A,1,"), std::string::npos);
    EXPECT_NE(text.find("\nmean:all,1,"), std::string::npos);
    EXPECT_NE(text.find("\nsuper_threshold_classes,0,"), std::string::npos);
}
