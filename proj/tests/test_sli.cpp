#include <screenscale/baselines.hpp>
#include <screenscale/sli.hpp>
#include <screenscale/synth.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace screenscale;

namespace {

std::vector<double> random_signal(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> v(0.0, 255.0);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (double& x : s) x = v(rng);
    return s;
}

Raster random_image(std::mt19937& rng, int w, int h, int channels = 3) {
    std::uniform_int_distribution<int> v(0, 255);
    Raster r(w, h, channels);
    for (auto& s : r.samples()) s = static_cast<std::uint8_t>(v(rng));
    return r;
}

double max_abs_diff(const std::vector<Plane>& a, const std::vector<Plane>& b) {
    double m = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c)
        for (std::size_t i = 0; i < a[c].size(); ++i) m = std::max(m, std::abs(a[c].values()[i] - b[c].values()[i]));
    return m;
}

bool bit_identical(const std::vector<Plane>& a, const std::vector<Plane>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t c = 0; c < a.size(); ++c)
        if (!std::equal(a[c].values().begin(), a[c].values().end(), b[c].values().begin())) return false;
    return true;
}

Raster transpose(const Raster& r) {
    Raster t(r.height(), r.width(), r.channels());
    for (int y = 0; y < r.height(); ++y)
        for (int x = 0; x < r.width(); ++x)
            for (int c = 0; c < r.channels(); ++c) t.at(y, x, c) = r.at(x, y, c);
    return t;
}

Plane transpose(const Plane& p) {
    Plane t(p.height(), p.width());
    for (int y = 0; y < p.height(); ++y)
        for (int x = 0; x < p.width(); ++x) t.at(y, x) = p.at(x, y);
    return t;
}

/// Independent route for the adaptive pipeline: drive the public 1-D
/// primitives row by row and column by column.
Plane reference_adaptive(const Plane& src, const ContentMap& map, const OffsetTable& off, double factor) {
    const int w = src.width(), h = src.height();
    const int ow = scaled_size(w, factor), oh = scaled_size(h, factor);
    const ContentType major = map.major_type();
    std::vector<double> xs(static_cast<std::size_t>(ow)), ys(static_cast<std::size_t>(oh));
    for (int i = 0; i < ow; ++i) xs[i] = map_output_coordinate(i, factor);
    for (int i = 0; i < oh; ++i) ys[i] = map_output_coordinate(i, factor);

    Plane mid(ow, h);
    for (int y = 0; y < h; ++y) {
        std::vector<double> f(src.row(y).begin(), src.row(y).end()), taus(static_cast<std::size_t>(w));
        for (int x = 0; x < w; ++x) taus[x] = off.get(map.pixel_type(x, y), Direction::horizontal);
        const auto c = prefilter_1d(f, taus);
        const auto row = interpolate_1d(c, off.get(major, Direction::horizontal), xs);
        std::copy(row.begin(), row.end(), mid.row(y).begin());
    }
    Plane out(ow, oh);
    for (int x = 0; x < ow; ++x) {
        std::vector<double> f(static_cast<std::size_t>(h)), taus(static_cast<std::size_t>(h));
        const int sx = nearest_source_index(x, factor, w);
        for (int y = 0; y < h; ++y) {
            f[y] = mid.at(x, y);
            taus[y] = off.get(map.pixel_type(sx, y), Direction::vertical);
        }
        const auto c = prefilter_1d(f, taus);
        const auto col = interpolate_1d(c, off.get(major, Direction::vertical), ys);
        for (int y = 0; y < oh; ++y) out.at(x, y) = col[y];
    }
    return out;
}

}  // namespace

TEST(Prefilter, ZeroShiftIsIdentity) {
    const std::vector<double> f{3, 1, 4};
    EXPECT_EQ(prefilter_1d(f, 0.0), f);
}

TEST(Prefilter, ConstantIsFixedPoint) {
    const std::vector<double> f{5, 5, 5, 5};
    for (double c : prefilter_1d(f, 0.2)) EXPECT_NEAR(c, 5.0, 1e-12);
}

TEST(Prefilter, HandEvaluatedRecursion) {
    const std::vector<double> f{0, 1, 0};
    const auto c = prefilter_1d(f, 0.2, 0.0);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_NEAR(c[0], 0.0, 1e-12);
    EXPECT_NEAR(c[1], 1.25, 1e-12);
    EXPECT_NEAR(c[2], -0.3125, 1e-12);
}

TEST(Prefilter, RejectsUnstableShift) {
    const std::vector<double> f{1, 2};
    EXPECT_THROW(prefilter_1d(f, 0.5), std::invalid_argument);
    EXPECT_THROW(prefilter_1d(f, -0.01), std::invalid_argument);
    EXPECT_THROW(prefilter_1d(f, std::vector<double>{0.1}), std::invalid_argument);
    EXPECT_THROW(prefilter_1d(std::vector<double>{}, 0.1), std::invalid_argument);
}

TEST(Prefilter, StaysWithinStabilityBound) {
    std::mt19937 rng(5);
    for (double tau : {0.05, 0.11, 0.21}) {
        const double ratio = tau / (1 - tau);
        const double bound = 255.0 * (1.0 / (1.0 - tau)) / (1.0 - ratio);
        for (int i = 0; i < 50; ++i) {
            const auto f = random_signal(rng, 200);
            for (double c : prefilter_1d(f, tau)) EXPECT_LE(std::abs(c), bound);
        }
        // Worst case: alternating extremes.
        std::vector<double> alt(200);
        for (int n = 0; n < 200; ++n) alt[n] = n % 2 ? 255.0 : 0.0;
        for (double c : prefilter_1d(alt, tau)) EXPECT_LE(std::abs(c), bound);
    }
}

TEST(Interpolate, ZeroShiftMidpoint) {
    const std::vector<double> c{0, 1}, x{0.5};
    EXPECT_NEAR(interpolate_1d(c, 0.0, x)[0], 0.5, 1e-15);
}

TEST(Interpolate, HandEvaluatedShiftedBasis) {
    const std::vector<double> c{0, 1.25, -0.3125};
    const std::vector<double> x{1.2, 1.0};
    const auto v = interpolate_1d(c, 0.2, x);
    EXPECT_NEAR(v[0], 1.25, 1e-12);
    EXPECT_NEAR(v[1], 1.0, 1e-12);
}

TEST(Interpolate, ClampsOutOfRangePositions) {
    const std::vector<double> f{2, 4, 8};
    const auto c = prefilter_1d(f, 0.15);
    const std::vector<double> x{-3.0, 0.0, 2.0, 9.0};
    const auto v = interpolate_1d(c, 0.15, x);
    EXPECT_NEAR(v[0], 2.0, 1e-12);
    EXPECT_NEAR(v[1], 2.0, 1e-12);
    EXPECT_NEAR(v[2], 8.0, 1e-12);
    EXPECT_NEAR(v[3], 8.0, 1e-12);
}

TEST(Interpolate, SampleReproductionProperty) {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> len(1, 80);
    std::uniform_real_distribution<double> tau(0.0, 0.49);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = len(rng);
        const double t = tau(rng);
        const auto f = random_signal(rng, n);
        std::vector<double> pos(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pos[i] = i;
        const auto v = interpolate_1d(prefilter_1d(f, t), t, pos);
        for (int i = 0; i < n; ++i) ASSERT_NEAR(v[i], f[i], 1e-9) << "tau=" << t << " n=" << n;
    }
}

TEST(Coordinates, OriginAligned) {
    EXPECT_EQ(map_output_coordinate(0, 1.5), 0.0);
    EXPECT_EQ(map_output_coordinate(3, 1.5), 2.0);
    EXPECT_NEAR(map_output_coordinate(1919, 1.5), 1279.0 + 1.0 / 3.0, 1e-9);
    EXPECT_THROW(map_output_coordinate(1, 0.0), std::invalid_argument);
}

TEST(Coordinates, NearestSourceTiesGoToSmallerIndex) {
    EXPECT_EQ(nearest_source_index(1, 2.0, 10), 0);   // 0.5
    EXPECT_EQ(nearest_source_index(3, 2.0, 10), 1);   // 1.5
    EXPECT_EQ(nearest_source_index(2, 1.5, 10), 1);   // 1.333
    EXPECT_EQ(nearest_source_index(5, 3.0, 10), 2);   // 1.667
    EXPECT_EQ(nearest_source_index(40, 2.0, 10), 9);  // clamped
}

TEST(ScaledSize, RoundsHalfAwayAndRejectsBadInput) {
    EXPECT_EQ(scaled_size(1280, 1.5), 1920);
    EXPECT_EQ(scaled_size(5, 1.5), 8);
    EXPECT_EQ(scaled_size(3, 0.5), 2);
    EXPECT_THROW(scaled_size(1, 0.1), std::invalid_argument);
    EXPECT_THROW(scaled_size(10, -1.0), std::invalid_argument);
    EXPECT_THROW(scaled_size(1 << 20, 4.0), std::overflow_error);
}

TEST(ScaleAdaptive, ScreenResolutionOutputSize) {
    const Raster in(1280, 768, 3, 50);
    ScaleJob job;
    const Raster out = scale_adaptive(in, job, ContentMap::uniform(1280, 768, ContentType::text));
    EXPECT_EQ(out.width(), 1920);
    EXPECT_EQ(out.height(), 1152);
}

TEST(ScaleAdaptive, PreservesConstants) {
    const auto c = synth::text_picture_composite(64, 48, 1);
    const ContentMap map = classify(c.image, {});
    Raster flat(64, 48, 3);
    for (int i = 0; i < 64 * 48; ++i) {
        flat.samples()[3 * i] = 17;
        flat.samples()[3 * i + 1] = 130;
        flat.samples()[3 * i + 2] = 254;
    }
    for (double factor : {0.5, 1.0, 1.5, 2.0, 3.7}) {
        ScaleJob job;
        job.factor = factor;
        const auto planes = scale_adaptive_planes(flat, job, map);
        const double want[3] = {17, 130, 254};
        for (int ch = 0; ch < 3; ++ch)
            for (double v : planes[ch].values()) ASSERT_NEAR(v, want[ch], 1e-9);
        const Raster out = round_to_raster(planes);
        for (int i = 0; i < out.width() * out.height(); ++i) {
            ASSERT_EQ(out.samples()[3 * i], 17);
            ASSERT_EQ(out.samples()[3 * i + 2], 254);
        }
    }
}

TEST(ScaleAdaptive, UnitFactorReproducesInput) {
    std::mt19937 rng(3);
    const Raster in = random_image(rng, 37, 29);
    for (ContentType t : {ContentType::text, ContentType::pictorial}) {
        ScaleJob job;
        job.factor = 1.0;
        const auto planes = scale_adaptive_planes(in, job, ContentMap::uniform(37, 29, t));
        const auto src = to_planes(in);
        EXPECT_LT(max_abs_diff(planes, src), 1e-9);
        EXPECT_EQ(round_to_raster(planes), in);
    }
}

TEST(ScaleAdaptive, MatchesOneDimensionalReference) {
    const auto c = synth::text_picture_composite(80, 48, 77);
    const ContentMap map = classify(c.image, {});
    ASSERT_GT(map.count(ContentType::text), 0u);
    ASSERT_GT(map.count(ContentType::pictorial), 0u);
    OffsetTable off;  // make every entry distinct so mix-ups show
    off.set(ContentType::text, Direction::horizontal, 0.05);
    off.set(ContentType::text, Direction::vertical, 0.30);
    off.set(ContentType::pictorial, Direction::horizontal, 0.15);
    off.set(ContentType::pictorial, Direction::vertical, 0.22);
    for (double factor : {1.5, 2.0, 0.75}) {
        ScaleJob job;
        job.factor = factor;
        job.offsets = off;
        const auto planes = scale_adaptive_planes(c.image, job, map);
        const auto src = to_planes(c.image);
        for (int ch = 0; ch < 3; ++ch) {
            const Plane ref = reference_adaptive(src[ch], map, off, factor);
            for (std::size_t i = 0; i < ref.size(); ++i)
                ASSERT_NEAR(planes[ch].values()[i], ref.values()[i], 1e-9) << "factor " << factor;
        }
    }
}

TEST(ScaleAdaptive, ZeroOffsetsMatchBilinear) {
    std::mt19937 rng(8);
    const Raster in = random_image(rng, 64, 48);
    ScaleJob job;
    job.offsets = OffsetTable::uniform(0.0);
    const ContentMap map = classify(in, {});
    const auto a = scale_adaptive_planes(in, job, map);
    const auto b = scale_bilinear_planes(in, job.factor);
    EXPECT_LT(max_abs_diff(a, b), 1e-6);
}

TEST(ScaleAdaptive, DeterministicAcrossThreadCounts) {
    const auto c = synth::text_picture_composite(160, 96, 5);
    const ContentMap map = classify(c.image, {});
    ScaleJob job;
    const auto one = scale_adaptive_planes(c.image, job, map);
    for (int threads : {2, 3, 7}) {
        job.threads = threads;
        EXPECT_TRUE(bit_identical(one, scale_adaptive_planes(c.image, job, map))) << threads;
    }
}

TEST(ScaleAdaptive, InstrumentationDoesNotChangeOutput) {
    const auto c = synth::text_picture_composite(96, 64, 6);
    const ContentMap map = classify(c.image, {});
    ScaleJob job;
    const auto plain = scale_adaptive_planes(c.image, job, map);
    OpTally tally;
    job.tally = &tally;
    job.threads = 3;
    const auto counted = scale_adaptive_planes(c.image, job, map);
    EXPECT_TRUE(bit_identical(plain, counted));
    const OpCounts n = count_ops(&tally);
    EXPECT_GT(n.prefilter.multiplications, 0u);
    EXPECT_GT(n.interpolation.additions, 0u);
}

TEST(ScaleAdaptive, RejectsMismatchedMapAndBadOffsets) {
    const Raster in(32, 32, 1);
    ScaleJob job;
    EXPECT_THROW(scale_adaptive(in, job, ContentMap::uniform(48, 32, ContentType::text)), std::invalid_argument);
    job.offsets = OffsetTable::uniform(0.5);
    EXPECT_THROW(scale_adaptive(in, job, ContentMap::uniform(32, 32, ContentType::text)), std::invalid_argument);
}

TEST(ScaleFixedSli, ConstantAndSize) {
    const Raster in(1280, 768, 1, 93);
    const Raster out = scale_fixed_sli(in, 1.5);
    EXPECT_EQ(out.width(), 1920);
    EXPECT_EQ(out.height(), 1152);
    for (auto s : out.samples()) ASSERT_EQ(s, 93);
}

TEST(ScaleFixedSli, ZeroShiftIsBilinear) {
    std::mt19937 rng(12);
    for (double factor : {1.5, 2.0, 0.6, 3.0}) {
        const Raster in = random_image(rng, 33, 21);
        const auto a = scale_fixed_sli_planes(in, factor, 0.0);
        const auto b = scale_bilinear_planes(in, factor);
        EXPECT_LT(max_abs_diff(a, b), 1e-6);
        EXPECT_TRUE(bit_identical(a, b));
    }
}

TEST(ScaleFixedSli, UniformShiftMatchesUniformAdaptive) {
    std::mt19937 rng(14);
    const Raster in = random_image(rng, 40, 40);
    ScaleJob job;
    job.offsets = OffsetTable::uniform(kFixedSliTau);
    const auto a = scale_adaptive_planes(in, job, classify(in, {}));
    const auto b = scale_fixed_sli_planes(in, job.factor);
    EXPECT_LT(max_abs_diff(a, b), 1e-9);
}

TEST(ScaleFixedSli, SeparableOrderDoesNotMatter) {
    std::mt19937 rng(21);
    const Raster in = random_image(rng, 45, 31, 1);
    for (double factor : {1.5, 2.25}) {
        const auto rows_first = scale_fixed_sli_planes(in, factor, 0.17);
        const auto cols_first = scale_fixed_sli_planes(transpose(in), factor, 0.17);
        const Plane back = transpose(cols_first[0]);
        ASSERT_EQ(back.width(), rows_first[0].width());
        for (std::size_t i = 0; i < back.size(); ++i)
            ASSERT_NEAR(back.values()[i], rows_first[0].values()[i], 1e-6);
    }
}
