#include <screenscale/classifier.hpp>
#include <screenscale/synth.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace screenscale;

namespace {

/// Brute-force N_HG: visits every pixel and every forward neighbour directly.
int oracle_high_gradient(const std::vector<double>& v, int w, int h, double g) {
    int n = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double best = 0.0;
            if (x + 1 < w) best = std::max(best, std::abs(v[y * w + x + 1] - v[y * w + x]));
            if (y + 1 < h) best = std::max(best, std::abs(v[(y + 1) * w + x] - v[y * w + x]));
            n += best > g;
        }
    return n;
}

/// Brute-force N_BC over a gray block: histogram by std::map, then a direct count.
std::pair<int, int> oracle_base_color_gray(const std::vector<std::uint8_t>& px) {
    std::map<int, int> hist;
    for (auto p : px) ++hist[p];
    int base = hist.begin()->first;
    for (auto [v, c] : hist)
        if (c > hist[base]) base = v;
    int count = 0;
    for (auto p : px) count += std::abs(p - base) <= 2;
    return {base, count};
}

std::vector<double> stripes_luma() {
    std::vector<double> v(256);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) v[y * 16 + x] = (x % 2) ? 255.0 : 0.0;
    return v;
}

Raster stripes_rgb() {
    Raster r(16, 16, 3);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            for (int c = 0; c < 3; ++c) r.at(x, y, c) = (x % 2) ? 255 : 0;
    return r;
}

const NeighborLabels kAllPictorial{ContentType::pictorial, ContentType::pictorial, ContentType::pictorial};

}  // namespace

TEST(CountHighGradient, ConstantBlockHasNone) {
    const std::vector<double> v(256, 42.0);
    EXPECT_EQ(count_high_gradient(LumaBlock::dense(v, 16, 16), 32.0), 0);
}

TEST(CountHighGradient, UnitStripes) {
    const auto v = stripes_luma();
    EXPECT_EQ(oracle_high_gradient(v, 16, 16, 32.0), 240);
    EXPECT_EQ(count_high_gradient(LumaBlock::dense(v, 16, 16), 32.0), 240);
}

TEST(CountHighGradient, GentleRampHasNone) {
    std::vector<double> v(256);
    for (int i = 0; i < 256; ++i) v[i] = i % 16;
    EXPECT_EQ(count_high_gradient(LumaBlock::dense(v, 16, 16), 32.0), 0);
}

TEST(CountHighGradient, MatchesOracleOnRandomBlocks) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> dim(1, 16);
    std::uniform_real_distribution<double> val(0.0, 255.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = dim(rng), h = dim(rng);
        std::vector<double> v(static_cast<std::size_t>(w) * h);
        for (double& x : v) x = val(rng);
        EXPECT_EQ(count_high_gradient(LumaBlock::dense(v, w, h), 60.0), oracle_high_gradient(v, w, h, 60.0));
    }
}

TEST(CountHighGradient, StridedViewOfPlane) {
    Plane p(40, 20, 0.0);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 40; ++x) p.at(x, y) = (x >= 20) ? 200.0 : 0.0;
    // Block starting at x=16 contains the edge between columns 19 and 20.
    const BlockRect r{16, 0, 16, 16};
    EXPECT_EQ(count_high_gradient(LumaBlock::of(p, r), 32.0), 16);
}

TEST(BaseColorCount, ConstantBlock) {
    const Raster r(16, 16, 3, 10);
    const BaseColor bc = base_color_count(ColorBlock::of(r, {0, 0, 16, 16}));
    EXPECT_EQ(bc.color, (std::array<std::uint8_t, 3>{10, 10, 10}));
    EXPECT_EQ(bc.count, 256);
}

TEST(BaseColorCount, TieBreaksToSmallestColor) {
    const Raster r = stripes_rgb();
    const BaseColor bc = base_color_count(ColorBlock::of(r, {0, 0, 16, 16}));
    EXPECT_EQ(bc.color, (std::array<std::uint8_t, 3>{0, 0, 0}));
    EXPECT_EQ(bc.count, 128);
}

TEST(BaseColorCount, NearBaseFixture) {
    // 80 x 10, 60 x 9, 60 x 11, and 56 distinct values far from 10.
    std::vector<std::uint8_t> px;
    px.insert(px.end(), 80, 10);
    px.insert(px.end(), 60, 9);
    px.insert(px.end(), 60, 11);
    for (int i = 0; i < 56; ++i) px.push_back(static_cast<std::uint8_t>(60 + 3 * i));
    std::shuffle(px.begin(), px.end(), std::mt19937(5));
    const auto [obase, ocount] = oracle_base_color_gray(px);
    EXPECT_EQ(obase, 10);
    EXPECT_EQ(ocount, 200);
    const BaseColor bc = base_color_count(ColorBlock::dense(px, 16, 16, 1));
    EXPECT_EQ(bc.color[0], 10);
    EXPECT_EQ(bc.count, 200);
}

TEST(BaseColorCount, RgbUsesPerChannelBox) {
    Raster r(16, 16, 3, 0);
    for (int i = 0; i < 256; ++i) {
        auto* p = &r.samples()[3 * i];
        if (i < 100) { p[0] = 50; p[1] = 60; p[2] = 70; }
        else if (i < 150) { p[0] = 52; p[1] = 58; p[2] = 71; }  // inside the box
        else if (i < 180) { p[0] = 53; p[1] = 60; p[2] = 70; }  // red off by 3
        else { p[0] = 200; p[1] = static_cast<std::uint8_t>(i); p[2] = 9; }
    }
    const BaseColor bc = base_color_count(ColorBlock::of(r, {0, 0, 16, 16}));
    EXPECT_EQ(bc.color, (std::array<std::uint8_t, 3>{50, 60, 70}));
    EXPECT_EQ(bc.count, 150);
}

TEST(BaseColorCount, InvariantUnderPixelPermutation) {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> v(0, 12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> px(256 * 3);
        for (auto& s : px) s = static_cast<std::uint8_t>(100 + v(rng));
        const BaseColor a = base_color_count(ColorBlock::dense(px, 16, 16, 3));
        // Shuffle whole pixels.
        std::vector<std::array<std::uint8_t, 3>> pixels(256);
        for (int i = 0; i < 256; ++i) pixels[i] = {px[3 * i], px[3 * i + 1], px[3 * i + 2]};
        std::shuffle(pixels.begin(), pixels.end(), rng);
        for (int i = 0; i < 256; ++i)
            for (int c = 0; c < 3; ++c) px[3 * i + c] = pixels[i][c];
        const BaseColor b = base_color_count(ColorBlock::dense(px, 16, 16, 3));
        EXPECT_EQ(a.count, b.count);
        EXPECT_EQ(a.color, b.color);
    }
}

TEST(ClassifyBlock, ConstantIsPictorial) {
    const Raster r(16, 16, 3, 200);
    const Plane l = to_luma(r);
    EXPECT_EQ(classify_block(LumaBlock::of(l, {0, 0, 16, 16}), ColorBlock::of(r, {0, 0, 16, 16}), {}),
              ContentType::pictorial);
}

TEST(ClassifyBlock, StripesAreText) {
    const Raster r = stripes_rgb();
    const Plane l = to_luma(r);
    EXPECT_EQ(classify_block(LumaBlock::of(l, {0, 0, 16, 16}), ColorBlock::of(r, {0, 0, 16, 16}), {}),
              ContentType::text);
}

TEST(ClassifyBlock, RandomNoiseIsPictorial) {
    int pictorial = 0;
    constexpr int trials = 200;
    for (int i = 0; i < trials; ++i) {
        const Raster r = synth::noise_image(16, 16, 1000 + i);
        const Plane l = to_luma(r);
        pictorial += classify_block(LumaBlock::of(l, {0, 0, 16, 16}), ColorBlock::of(r, {0, 0, 16, 16}), {}) ==
                     ContentType::pictorial;
    }
    EXPECT_GE(pictorial, trials * 99 / 100);
}

TEST(ClassifyBlock, StepOneDominates) {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> nbc(0, 256);
    const ClassifierParams p;
    for (int hg = 0; hg < 20; ++hg) {
        for (int k = 0; k < 20; ++k) {
            const BlockFeatures f{hg, nbc(rng), 256};
            EXPECT_EQ(classify_block(f, p, {}), ContentType::pictorial);
            EXPECT_EQ(classify_block(f, p, kAllPictorial), ContentType::pictorial);
        }
    }
}

TEST(ClassifyBlock, AdaptiveThresholdUsesAllThreeNeighbours) {
    const ClassifierParams p;
    const BlockFeatures f{100, 130, 256};  // L2_low < N_BC <= L2_high
    EXPECT_EQ(classify_block(f, p, {}), ContentType::text);
    EXPECT_EQ(classify_block(f, p, kAllPictorial), ContentType::pictorial);
    EXPECT_EQ(classify_block(f, p, {ContentType::pictorial, ContentType::pictorial, std::nullopt}), ContentType::text);
    EXPECT_EQ(classify_block(f, p, {ContentType::pictorial, ContentType::text, ContentType::pictorial}),
              ContentType::text);
}

TEST(ClassifyBlock, NeighbourMonotonicity) {
    // Leaving the all-pictorial context can only flip pictorial -> text.
    std::mt19937 rng(29);
    std::uniform_int_distribution<int> count(0, 256);
    const std::vector<NeighborLabels> others{
        {},
        {ContentType::text, ContentType::pictorial, ContentType::pictorial},
        {ContentType::pictorial, ContentType::text, ContentType::pictorial},
        {ContentType::pictorial, ContentType::pictorial, ContentType::text},
        {ContentType::text, ContentType::text, ContentType::text},
    };
    const ClassifierParams p;
    for (int i = 0; i < 2000; ++i) {
        const BlockFeatures f{count(rng), count(rng), 256};
        const ContentType base = classify_block(f, p, kAllPictorial);
        for (const auto& ctx : others) {
            const ContentType t = classify_block(f, p, ctx);
            if (base == ContentType::text) { EXPECT_EQ(t, ContentType::text); }
        }
    }
}

TEST(ClassifyBlock, PartialBlockThresholdsScale) {
    const ClassifierParams p;
    // 128-pixel block: L1 -> 10, L2_low -> 50.
    EXPECT_EQ(classify_block(BlockFeatures{12, 60, 128}, p, {}), ContentType::text);
    EXPECT_EQ(classify_block(BlockFeatures{9, 60, 128}, p, {}), ContentType::pictorial);
    EXPECT_EQ(classify_block(BlockFeatures{12, 50, 128}, p, {}), ContentType::pictorial);
}

TEST(ClassifierParams, Validation) {
    EXPECT_NO_THROW(ClassifierParams{}.validate());
    EXPECT_THROW((ClassifierParams{0.0, 20, 100, 160}.validate()), std::invalid_argument);
    EXPECT_THROW((ClassifierParams{32, 0, 100, 160}.validate()), std::invalid_argument);
    EXPECT_THROW((ClassifierParams{32, 20, 160, 100}.validate()), std::invalid_argument);
    EXPECT_THROW((ClassifierParams{32, 20, 100, 300}.validate()), std::invalid_argument);
}

TEST(ClassifyImage, ConstantImageIsPictorial) {
    const Raster r(100, 50, 3, 77);
    const ContentMap m = classify(r, {});
    EXPECT_EQ(m.blocks_x(), 7);
    EXPECT_EQ(m.blocks_y(), 4);
    EXPECT_EQ(m.count(ContentType::pictorial), 28u);
    EXPECT_EQ(m.major_type(), ContentType::pictorial);
}

TEST(ClassifyImage, SingleBlock) {
    const Raster r = stripes_rgb();
    const ContentMap m = classify(r, {});
    ASSERT_EQ(m.labels().size(), 1u);
    EXPECT_EQ(m.labels()[0], ContentType::text);
    EXPECT_EQ(m.major_type(), ContentType::text);
}

TEST(ClassifyImage, CompositeMatchesGroundTruth) {
    const auto c = synth::text_picture_composite(320, 192, 42);
    const ContentMap m = classify(c.image, {});
    std::size_t agree = 0;
    for (std::size_t i = 0; i < c.truth.size(); ++i) agree += m.labels()[i] == c.truth[i];
    EXPECT_GE(static_cast<double>(agree) / c.truth.size(), 0.9);
}

TEST(ClassifyImage, DeterministicAndCountingAgnostic) {
    const auto c = synth::text_picture_composite(200, 120, 9);
    const ContentMap a = classify(c.image, {});
    const ContentMap b = classify(c.image, {});
    OpTally tally;
    const ContentMap counted = classify(c.image, {}, &tally);
    EXPECT_EQ(a.labels(), b.labels());
    EXPECT_EQ(a.labels(), counted.labels());
    EXPECT_GT(tally.snapshot().classification.additions, 0u);
}

TEST(ClassifyImage, GrayscaleInput) {
    Raster r(32, 16, 1, 255);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) r.at(x, y) = (x % 2) ? 255 : 0;
    const ContentMap m = classify(r, {});
    EXPECT_EQ(m.block_label(0, 0), ContentType::text);
    EXPECT_EQ(m.block_label(1, 0), ContentType::pictorial);
}

TEST(ContentMap, MajorTypeTieGoesToText) {
    const ContentMap m(BlockGrid(32, 16), {ContentType::pictorial, ContentType::text});
    EXPECT_EQ(m.major_type(), ContentType::text);
    const ContentMap n(BlockGrid(48, 16), {ContentType::pictorial, ContentType::text, ContentType::pictorial});
    EXPECT_EQ(n.major_type(), ContentType::pictorial);
}

TEST(ContentMap, PixelLabelsConstantWithinBlocks) {
    const auto c = synth::text_picture_composite(100, 70, 3);
    const ContentMap m = classify(c.image, {});
    for (int y = 0; y < 70; ++y)
        for (int x = 0; x < 100; ++x) EXPECT_EQ(m.pixel_type(x, y), m.block_label(x / 16, y / 16));
}

TEST(ContentMap, MaskEncoding) {
    const ContentMap m(BlockGrid(32, 32), {ContentType::text, ContentType::pictorial, ContentType::pictorial,
                                           ContentType::text});
    const Raster mask = m.to_mask();
    EXPECT_EQ(mask.width(), 2);
    EXPECT_EQ(mask.height(), 2);
    EXPECT_EQ(mask.at(0, 0), 255);
    EXPECT_EQ(mask.at(1, 0), 0);
    EXPECT_EQ(mask.at(1, 1), 255);
}
