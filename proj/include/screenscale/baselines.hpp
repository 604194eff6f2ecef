/**
 * @file baselines.hpp
 * @brief Reference scalers (bilinear, Keys bicubic), PSNR, and the
 * operation-count bound for the adaptive pipeline.
 *
 * Both scalers use the same origin-aligned grid and edge replication as the
 * SLI engine so that their outputs can be compared sample for sample.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "instrument.hpp"
#include "raster.hpp"
#include "resample.hpp"
#include "sli.hpp"

namespace screenscale {

inline constexpr double kKeysA = -0.5;

namespace detail {

struct LinearWeights {
    int i0;
    int i1;
    double w0;
    double w1;
};

inline std::vector<LinearWeights> linear_weights(int in_size, int out_size, double factor) {
    std::vector<LinearWeights> out(static_cast<std::size_t>(out_size));
    for (int o = 0; o < out_size; ++o) {
        double x = o / factor;
        if (x > in_size - 1) x = in_size - 1;
        const double base = std::floor(x);
        const double t = x - base;
        const int i = static_cast<int>(base);
        out[o] = {i, std::min(i + 1, in_size - 1), 1.0 - t, t};
    }
    return out;
}

template <typename Arith, int NC, typename Sink>
void bilinear_unit(const Raster& src, const std::vector<LinearWeights>& cols, const std::vector<LinearWeights>& rows,
                   const StripUnit& u, const Sink& sink, OpTally* tally) {
    const int h = src.height();
    const int sw = u.width();
    const std::size_t plane = static_cast<std::size_t>(sw);
    const int src_end = cols[static_cast<std::size_t>(u.x_end - 1)].i1 + 1;
    const LinearWeights* cw = cols.data() + u.x_begin;
    std::vector<double> f(static_cast<std::size_t>(src_end) * NC);
    std::vector<double> ring(2 * NC * plane);
    std::vector<double> out(plane);
    auto line = [&](int y, int ch) { return ring.data() + (static_cast<std::size_t>(y & 1) * NC + ch) * plane; };
    Arith a;
    int yo = 0;
    const int oh = static_cast<int>(rows.size());
    for (int y = 0; y < h; ++y) {
        load_row(src, y, src_end, f.data());
        for (int j = 0; j < sw; ++j) {
            const auto& k = cw[j];
            for (int ch = 0; ch < NC; ++ch)
                line(y, ch)[j] = a.add(a.mul(k.w0, f[k.i0 * NC + ch]), a.mul(k.w1, f[k.i1 * NC + ch]));
        }
        for (; yo < oh && rows[static_cast<std::size_t>(yo)].i1 <= y; ++yo) {
            const auto& k = rows[static_cast<std::size_t>(yo)];
            for (int ch = 0; ch < NC; ++ch) {
                const double* p = line(k.i0, ch);
                const double* q = line(k.i1, ch);
                for (int j = 0; j < sw; ++j) out[j] = a.add(a.mul(k.w0, p[j]), a.mul(k.w1, q[j]));
                sink(u, ch, yo, out.data());
            }
        }
    }
    a.flush(tally, Phase::interpolation);
}

template <typename Sink>
void run_bilinear(const Raster& src, int ow, int oh, double factor, int threads, OpTally* tally, const Sink& sink) {
    const auto cols = linear_weights(src.width(), ow, factor);
    const auto rows = linear_weights(src.height(), oh, factor);
    for_each_unit(strip_units(ow, threads), threads, [&](const StripUnit& u) {
        const bool rgb = src.channels() == 3;
        if (tally != nullptr) {
            if (rgb) bilinear_unit<CountingArith, 3>(src, cols, rows, u, sink, tally);
            else bilinear_unit<CountingArith, 1>(src, cols, rows, u, sink, tally);
        } else {
            if (rgb) bilinear_unit<PlainArith, 3>(src, cols, rows, u, sink, nullptr);
            else bilinear_unit<PlainArith, 1>(src, cols, rows, u, sink, nullptr);
        }
    });
}

/// Keys cubic convolution kernel.
inline double keys_kernel(double s, double a) noexcept {
    s = std::abs(s);
    if (s <= 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
    if (s < 2.0) return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
    return 0.0;
}

struct CubicWeights {
    std::array<int, 4> idx;
    std::array<double, 4> w;
};

inline std::vector<CubicWeights> cubic_weights(int in_size, int out_size, double factor, double a) {
    std::vector<CubicWeights> out(static_cast<std::size_t>(out_size));
    for (int o = 0; o < out_size; ++o) {
        double x = o / factor;
        if (x > in_size - 1) x = in_size - 1;
        const double base = std::floor(x);
        const double t = x - base;
        const int i = static_cast<int>(base);
        CubicWeights cw;
        for (int k = 0; k < 4; ++k) {
            cw.idx[k] = std::clamp(i - 1 + k, 0, in_size - 1);
            cw.w[k] = keys_kernel(t - (k - 1), a);
        }
        out[o] = cw;
    }
    return out;
}

template <typename Arith, int NC, typename Sink>
void bicubic_unit(const Raster& src, const std::vector<CubicWeights>& cols, const std::vector<CubicWeights>& rows,
                  const StripUnit& u, const Sink& sink, OpTally* tally) {
    const int h = src.height();
    const int sw = u.width();
    const std::size_t plane = static_cast<std::size_t>(sw);
    const int src_end = cols[static_cast<std::size_t>(u.x_end - 1)].idx[3] + 1;
    const CubicWeights* cw = cols.data() + u.x_begin;
    std::vector<double> f(static_cast<std::size_t>(src_end) * NC);
    std::vector<double> ring(4 * NC * plane);
    std::vector<double> out(plane);
    auto line = [&](int y, int ch) { return ring.data() + (static_cast<std::size_t>(y & 3) * NC + ch) * plane; };
    Arith ar;
    int yo = 0;
    const int oh = static_cast<int>(rows.size());
    for (int y = 0; y < h; ++y) {
        load_row(src, y, src_end, f.data());
        for (int j = 0; j < sw; ++j) {
            const auto& k = cw[j];
            for (int ch = 0; ch < NC; ++ch) {
                double acc = ar.mul(k.w[0], f[k.idx[0] * NC + ch]);
                for (int t = 1; t < 4; ++t) acc = ar.add(acc, ar.mul(k.w[t], f[k.idx[t] * NC + ch]));
                line(y, ch)[j] = acc;
            }
        }
        for (; yo < oh && rows[static_cast<std::size_t>(yo)].idx[3] <= y; ++yo) {
            const auto& k = rows[static_cast<std::size_t>(yo)];
            for (int ch = 0; ch < NC; ++ch) {
                const double* r0 = line(k.idx[0], ch);
                const double* r1 = line(k.idx[1], ch);
                const double* r2 = line(k.idx[2], ch);
                const double* r3 = line(k.idx[3], ch);
                for (int j = 0; j < sw; ++j) {
                    double acc = ar.mul(k.w[0], r0[j]);
                    acc = ar.add(acc, ar.mul(k.w[1], r1[j]));
                    acc = ar.add(acc, ar.mul(k.w[2], r2[j]));
                    acc = ar.add(acc, ar.mul(k.w[3], r3[j]));
                    out[j] = acc;
                }
                sink(u, ch, yo, out.data());
            }
        }
    }
    ar.flush(tally, Phase::interpolation);
}

template <typename Sink>
void run_bicubic(const Raster& src, int ow, int oh, double factor, int threads, OpTally* tally, const Sink& sink) {
    const auto cols = cubic_weights(src.width(), ow, factor, kKeysA);
    const auto rows = cubic_weights(src.height(), oh, factor, kKeysA);
    for_each_unit(strip_units(ow, threads), threads, [&](const StripUnit& u) {
        const bool rgb = src.channels() == 3;
        if (tally != nullptr) {
            if (rgb) bicubic_unit<CountingArith, 3>(src, cols, rows, u, sink, tally);
            else bicubic_unit<CountingArith, 1>(src, cols, rows, u, sink, tally);
        } else {
            if (rgb) bicubic_unit<PlainArith, 3>(src, cols, rows, u, sink, nullptr);
            else bicubic_unit<PlainArith, 1>(src, cols, rows, u, sink, nullptr);
        }
    });
}

}  // namespace detail

inline std::vector<Plane> scale_bilinear_planes(const Raster& raster, double factor, int threads = 1,
                                                OpTally* tally = nullptr) {
    const int ow = scaled_size(raster.width(), factor);
    const int oh = scaled_size(raster.height(), factor);
    auto out = detail::make_planes(raster.channels(), ow, oh);
    detail::run_bilinear(raster, ow, oh, factor, threads, tally, detail::PlaneSink{out});
    return out;
}

inline Raster scale_bilinear(const Raster& raster, double factor, int threads = 1, OpTally* tally = nullptr) {
    Raster out(scaled_size(raster.width(), factor), scaled_size(raster.height(), factor), raster.channels());
    detail::run_bilinear(raster, out.width(), out.height(), factor, threads, tally, detail::RasterSink{out});
    return out;
}

inline std::vector<Plane> scale_bicubic_planes(const Raster& raster, double factor, int threads = 1,
                                               OpTally* tally = nullptr) {
    const int ow = scaled_size(raster.width(), factor);
    const int oh = scaled_size(raster.height(), factor);
    auto out = detail::make_planes(raster.channels(), ow, oh);
    detail::run_bicubic(raster, ow, oh, factor, threads, tally, detail::PlaneSink{out});
    return out;
}

inline Raster scale_bicubic(const Raster& raster, double factor, int threads = 1, OpTally* tally = nullptr) {
    Raster out(scaled_size(raster.width(), factor), scaled_size(raster.height(), factor), raster.channels());
    detail::run_bicubic(raster, out.width(), out.height(), factor, threads, tally, detail::RasterSink{out});
    return out;
}

/// Integer-factor area reduction: each output sample is the rounded mean of
/// a k x k input cell. Trailing rows and columns that do not fill a cell are
/// dropped.
inline Raster reduce_area(const Raster& raster, int k) {
    if (k < 1) throw std::invalid_argument("reduce_area: factor must be >= 1");
    const int ow = raster.width() / k;
    const int oh = raster.height() / k;
    if (ow < 1 || oh < 1) throw std::invalid_argument("reduce_area: image smaller than one cell");
    const int nc = raster.channels();
    Raster out(ow, oh, nc);
    const double inv = 1.0 / (static_cast<double>(k) * k);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            for (int c = 0; c < nc; ++c) {
                int sum = 0;
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx) sum += raster.at(x * k + dx, y * k + dy, c);
                out.at(x, y, c) = quantize_sample(sum * inv);
            }
    return out;
}

// ---------------------------------------------------------------------------
// Quality

struct QualityReport {
    double mse = 0.0;
    double psnr = std::numeric_limits<double>::infinity();  // over all samples
    std::vector<double> channel_mse;
    std::vector<double> channel_psnr;
    bool identical = true;
};

inline double psnr_from_mse(double mse) noexcept {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

inline QualityReport psnr(const Raster& reference, const Raster& candidate) {
    if (reference.width() != candidate.width() || reference.height() != candidate.height() ||
        reference.channels() != candidate.channels())
        throw std::invalid_argument("psnr: image dimensions differ");
    const int nc = reference.channels();
    auto a = reference.samples();
    auto b = candidate.samples();
    std::vector<double> sq(static_cast<std::size_t>(nc), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        sq[i % nc] += d * d;
    }
    QualityReport r;
    double total = 0.0;
    for (int c = 0; c < nc; ++c) {
        total += sq[c];
        const double m = sq[c] / static_cast<double>(reference.pixel_count());
        r.channel_mse.push_back(m);
        r.channel_psnr.push_back(psnr_from_mse(m));
    }
    r.mse = total / static_cast<double>(a.size());
    r.psnr = psnr_from_mse(r.mse);
    r.identical = r.mse == 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Complexity accounting

/// Sizes the complexity bound is expressed in. in/out count samples
/// (pixels times channels); blocks counts 16x16 classification blocks.
struct ComplexitySizes {
    std::uint64_t n_in = 0;
    std::uint64_t n_out = 0;
    std::uint64_t n_blocks = 0;

    static ComplexitySizes of(const Raster& in, const Raster& out) {
        return {static_cast<std::uint64_t>(in.samples().size()), static_cast<std::uint64_t>(out.samples().size()),
                static_cast<std::uint64_t>(BlockGrid(in.width(), in.height()).block_count())};
    }
};

/// Upper bound for the adaptive pipeline: 9 N_in + 8 N_out + 4 N_b additions
/// and 4 N_in + 8 N_out multiplications.
struct ComplexityBound {
    std::uint64_t additions;
    std::uint64_t multiplications;
};

inline ComplexityBound adaptive_complexity_bound(const ComplexitySizes& s) noexcept {
    return {9 * s.n_in + 8 * s.n_out + 4 * s.n_blocks, 4 * s.n_in + 8 * s.n_out};
}

}  // namespace screenscale
