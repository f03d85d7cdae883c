#include "sigclass/spectral.hpp"

#include "dft_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace sigclass;

namespace {

Recording ramp_recording(double seconds, int rate) {
    Recording rec;
    rec.label = "Ramp";
    rec.sample_rate_hz = rate;
    rec.duration_s = seconds;
    const auto n = static_cast<Eigen::Index>(seconds * rate);
    rec.channel_ids = {"a", "b"};
    rec.samples = {Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1)),
                   Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1)) * -2.0};
    return rec;
}

Spectrum spectrum_of(std::initializer_list<std::pair<int, double>> peaks, const std::string& label = "L") {
    Spectrum s{"ch", label, Vector::Zero(kNumBins)};
    for (auto [hz, v] : peaks) s.bins[hz - 1] = v;
    return s;
}

} // namespace

TEST(Blocks, CountOffsetsAndSharedAcrossChannels) {
    const auto rec = ramp_recording(60.0, 1000);
    const auto blocks = extract_blocks(rec, 20, 5);
    ASSERT_EQ(blocks.size(), 2u);
    const auto& a = blocks.at("a");
    const auto& b = blocks.at("b");
    ASSERT_EQ(a.size(), 20u);
    ASSERT_EQ(b.size(), 20u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].samples.size(), 1000);
        EXPECT_EQ(a[i].offset, b[i].offset);
        EXPECT_GE(a[i].offset, 0);
        EXPECT_LE(a[i].offset, 59000);
        // The ramp encodes the sample index, so content must equal the offset.
        EXPECT_EQ(a[i].samples[0], static_cast<double>(a[i].offset));
        EXPECT_EQ(a[i].samples[999], static_cast<double>(a[i].offset + 999));
        EXPECT_EQ(a[i].label, "Ramp");
    }
    EXPECT_EQ(block_offsets(rec, 20, 5), block_offsets(rec, 20, 5));
    EXPECT_NE(block_offsets(rec, 20, 5), block_offsets(rec, 20, 6));
}

TEST(Blocks, ExactlyOneSecondStartsAtZero) {
    const auto rec = ramp_recording(1.0, 2000);
    for (auto off : block_offsets(rec, 7, 3)) EXPECT_EQ(off, 0);
}

TEST(Blocks, ErrorsOnShortRecordingOrBadCount) {
    auto rec = ramp_recording(1.0, 1000);
    rec.samples = {Vector::Zero(999), Vector::Zero(999)};
    EXPECT_THROW(extract_blocks(rec, 1, 1), ValidationError);
    EXPECT_THROW(extract_blocks(ramp_recording(2.0, 1000), 0, 1), ValidationError);
}

TEST(Spectrum, MatchesOracleOnRandomBlock) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    TimeBlock b{"c", "L", 0, Vector(2000)};
    for (Eigen::Index i = 0; i < 2000; ++i) b.samples[i] = g(rng);
    const auto s = magnitude_spectrum(b);
    const auto want = test_oracle::naive_dft_real(std::vector<double>(b.samples.data(), b.samples.data() + 2000));
    ASSERT_EQ(s.bins.size(), kNumBins);
    for (int i = 0; i < kNumBins; ++i) EXPECT_NEAR(s.bins[i], std::abs(want[i + 1]), 1e-9 * 2000);
    EXPECT_EQ(s.channel_id, "c");
    EXPECT_EQ(s.label, "L");
}

TEST(Spectrum, OnBinSinusoidAndDcExcluded) {
    TimeBlock b{"c", "L", 0, Vector(1000)};
    for (Eigen::Index t = 0; t < 1000; ++t)
        b.samples[t] = 5.0 + 0.8 * std::cos(2.0 * std::numbers::pi * 60.0 * static_cast<double>(t) / 1000.0);
    const auto s = magnitude_spectrum(b);
    EXPECT_NEAR(s.bins[59], 1000 * 0.8 / 2.0, 1e-6 * 1000 * 0.8);
    // The constant offset lands in the dropped DC bin only.
    EXPECT_LT(s.bins[0], 1e-8);
    EXPECT_LT(s.bins.maxCoeff() - s.bins[59], 1e-9);
}

TEST(Spectrum, ZeroBlockAndInvalidBlocks) {
    EXPECT_TRUE(magnitude_spectrum(TimeBlock{"c", "L", 0, Vector::Zero(600)}).bins.isZero(0.0));
    EXPECT_THROW(magnitude_spectrum(TimeBlock{"c", "L", 0, Vector::Zero(599)}), ValidationError);
    Vector v = Vector::Zero(1000);
    v[3] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(magnitude_spectrum(TimeBlock{"c", "L", 0, v}), ValidationError);
}

TEST(HeatMap, RowsScaleToPeakOfTen) {
    const auto hm = build_heatmap({{1, spectrum_of({{10, 2.5}, {20, 5.0}})}, {2, spectrum_of({})}});
    ASSERT_EQ(hm.rows.size(), 2u);
    EXPECT_EQ(hm.label, "L");
    EXPECT_EQ(hm.rows[0].values[19], 10.0);
    EXPECT_EQ(hm.rows[0].values[9], 5.0);
    EXPECT_EQ(hm.rows[0].trial, 1);
    EXPECT_TRUE(hm.rows[1].values.isZero(0.0));
}

TEST(HeatMap, RangePropertyOnRandomSpectra) {
    std::mt19937_64 rng(4);
    std::lognormal_distribution<double> d(0.0, 3.0);
    std::vector<HeatMapInput> in;
    for (int r = 0; r < 50; ++r) {
        Spectrum s{"ch", "L", Vector(kNumBins)};
        for (int i = 0; i < kNumBins; ++i) s.bins[i] = d(rng);
        in.push_back({r % 5, s});
    }
    const auto hm = build_heatmap(in);
    ASSERT_EQ(hm.rows.size(), 50u);
    for (const auto& row : hm.rows) {
        EXPECT_GE(row.values.minCoeff(), 0.0);
        EXPECT_EQ(row.values.maxCoeff(), 10.0);
    }
}

TEST(HeatMap, RejectsMixedLabelsAndEmptyInput) {
    EXPECT_THROW(build_heatmap({}), ValidationError);
    EXPECT_THROW(build_heatmap({{1, spectrum_of({{1, 1.0}}, "A")}, {1, spectrum_of({{1, 1.0}}, "B")}}),
                 ValidationError);
}

TEST(HeatMap, PgmAndCsvOutput) {
    const auto hm = build_heatmap({{3, spectrum_of({{1, 4.0}, {2, 2.0}})}});
    std::ostringstream pgm;
    write_heatmap_pgm(pgm, hm);
    std::istringstream p(pgm.str());
    std::string magic, comment_hash, comment_label;
    int w = 0, h = 0, maxv = 0;
    p >> magic >> comment_hash >> comment_label >> w >> h >> maxv;
    EXPECT_EQ(magic, "P2");
    EXPECT_EQ(w, 300);
    EXPECT_EQ(h, 1);
    EXPECT_EQ(maxv, 255);
    int v0 = 0, v1 = 0, v2 = 0;
    p >> v0 >> v1 >> v2;
    EXPECT_EQ(v0, 255);
    EXPECT_EQ(v1, 128); // 5 * 25.5 = 127.5 rounds away from zero
    EXPECT_EQ(v2, 0);

    std::ostringstream csv;
    write_heatmap_csv(csv, hm);
    const auto text = csv.str();
    EXPECT_EQ(text.rfind("channel_id,trial,hz1,hz2,", 0), 0u);
    EXPECT_NE(text.find("\nch,3,10.000000,5.000000,0.000000,"), std::string::npos);

    std::ostringstream sp;
    write_spectra_csv(sp, {spectrum_of({{1, 0.1}})});
    EXPECT_NE(sp.str().find("\nL,ch,0.10000000000000001,0,"), std::string::npos);
}
