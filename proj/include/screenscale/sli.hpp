/**
 * @file sli.hpp
 * @brief Shift-linear interpolation (SLI) and the content-adaptive separable
 * scaling pipeline.
 *
 * SLI reconstructs a signal as sum_n c_n * tri(x - n - tau), where tri is the
 * linear B-spline. The coefficients come from the causal recursion
 *
 *     c_n = f_n / (1 - tau) - tau / (1 - tau) * c_{n-1},
 *
 * which makes the reconstruction pass through every sample:
 * (1 - tau) c_n + tau c_{n-1} = f_n.
 *
 * The adaptive pipeline lets the pre-filter tau follow each pixel's content
 * type while the interpolation tau is a single frame-wide value chosen by the
 * frame's major content type.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "instrument.hpp"
#include "raster.hpp"
#include "resample.hpp"

namespace screenscale {

enum class Direction : std::uint8_t { horizontal = 0, vertical = 1 };

inline std::string_view to_string(Direction d) noexcept { return d == Direction::horizontal ? "h" : "v"; }

inline void validate_tau(double tau) {
    if (!(tau >= 0.0 && tau < 0.5)) throw std::invalid_argument("shift offset must lie in [0, 0.5)");
}

/// Shift offset per (content type, direction). Defaults are offsets trained
/// for screen text and pictorial regions.
struct OffsetTable {
    // [content type][direction]
    std::array<std::array<double, 2>, 2> tau{{{0.110, 0.124}, {0.112, 0.114}}};

    double get(ContentType t, Direction d) const noexcept {
        return tau[static_cast<int>(t)][static_cast<int>(d)];
    }
    void set(ContentType t, Direction d, double value) { tau[static_cast<int>(t)][static_cast<int>(d)] = value; }

    static OffsetTable uniform(double value) {
        OffsetTable t;
        for (auto& row : t.tau) row.fill(value);
        return t;
    }

    void validate() const {
        for (const auto& row : tau)
            for (double v : row) validate_tau(v);
    }
    friend bool operator==(const OffsetTable&, const OffsetTable&) = default;
};

inline constexpr double kFixedSliTau = 0.21;

enum class CoordinateConvention : std::uint8_t { origin_aligned };
enum class BoundaryPolicy : std::uint8_t { replicate };

struct ScaleJob {
    double factor = 1.5;
    OffsetTable offsets{};
    CoordinateConvention coordinates = CoordinateConvention::origin_aligned;
    BoundaryPolicy boundary = BoundaryPolicy::replicate;
    int threads = 1;
    OpTally* tally = nullptr;  // attach to count pixel-path operations
};

// ---------------------------------------------------------------------------
// 1-D primitives

/// Causal pre-filter with a per-sample shift. The virtual coefficient before
/// the first sample defaults to f_0, which keeps constant signals fixed.
inline std::vector<double> prefilter_1d(std::span<const double> samples, std::span<const double> taus,
                                        std::optional<double> initial = std::nullopt) {
    if (samples.empty()) throw std::invalid_argument("prefilter_1d: empty signal");
    if (taus.size() != samples.size()) throw std::invalid_argument("prefilter_1d: tau length mismatch");
    for (double t : taus) validate_tau(t);
    std::vector<double> c(samples.size());
    double prev = initial.value_or(samples[0]);
    for (std::size_t n = 0; n < samples.size(); ++n) {
        const double g = 1.0 / (1.0 - taus[n]);
        const double r = taus[n] * g;
        prev = g * samples[n] - r * prev;
        c[n] = prev;
    }
    return c;
}

inline std::vector<double> prefilter_1d(std::span<const double> samples, double tau,
                                        std::optional<double> initial = std::nullopt) {
    const std::vector<double> taus(samples.size(), tau);
    return prefilter_1d(samples, taus, initial);
}

/// Origin-aligned grid: output sample i sits at input coordinate i / factor.
inline double map_output_coordinate(int output_index, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    return output_index / factor;
}

/// Two-tap reconstruction at one position.
struct Tap {
    int i0 = 0;
    int i1 = 0;
    double w0 = 1.0;
    double w1 = 0.0;
};

/// Taps for position x (clamped to [0, n-1]) with the basis shifted by tau.
/// Coefficient indices outside the signal replicate the edge coefficient.
inline Tap shifted_linear_tap(double x, double tau, int n) noexcept {
    const double last = static_cast<double>(n - 1);
    x = std::clamp(x, 0.0, last);
    const double u = x - tau;
    const double base = std::floor(u);
    const double t = u - base;
    const int i = static_cast<int>(base);
    return {std::clamp(i, 0, n - 1), std::clamp(i + 1, 0, n - 1), 1.0 - t, t};
}

inline std::vector<double> interpolate_1d(std::span<const double> coefficients, double tau,
                                          std::span<const double> positions) {
    if (coefficients.empty()) throw std::invalid_argument("interpolate_1d: no coefficients");
    validate_tau(tau);
    const int n = static_cast<int>(coefficients.size());
    std::vector<double> out;
    out.reserve(positions.size());
    for (double x : positions) {
        const Tap tap = shifted_linear_tap(x, tau, n);
        out.push_back(tap.w0 * coefficients[tap.i0] + tap.w1 * coefficients[tap.i1]);
    }
    return out;
}

/// round(size * factor), rejecting empty or oversized results.
inline int scaled_size(int size, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("scale factor must be positive");
    const double s = std::round(size * factor);
    if (s < 1.0) throw std::invalid_argument("scaled dimension rounds to zero");
    if (s > static_cast<double>(1 << 20)) throw std::overflow_error("scaled dimension overflow");
    return static_cast<int>(s);
}

/// Nearest source index for an output position; exact half-way ties go to the
/// smaller index.
inline int nearest_source_index(int output_index, double factor, int n) noexcept {
    const double x = std::clamp(output_index / factor, 0.0, static_cast<double>(n - 1));
    const double base = std::floor(x);
    const int i = static_cast<int>(base) + (x - base > 0.5 ? 1 : 0);
    return std::clamp(i, 0, n - 1);
}

// ---------------------------------------------------------------------------
// Separable engine

namespace detail {

/// Pre-filter gains for one class of rows: c = gain * f - feedback * c_prev.
struct FilterRow {
    std::vector<double> gain;
    std::vector<double> feedback;
};

/// Per-sample pre-filter setup. row_class[y] selects which FilterRow applies
/// to line y of the pass.
struct FilterField {
    std::vector<FilterRow> rows;
    std::vector<int> row_class;
};

inline FilterRow make_filter_row(std::span<const double> taus) {
    FilterRow row;
    row.gain.resize(taus.size());
    row.feedback.resize(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        row.gain[i] = 1.0 / (1.0 - taus[i]);
        row.feedback[i] = taus[i] * row.gain[i];
    }
    return row;
}

inline FilterField constant_field(int width, int height, double tau) {
    FilterField f;
    f.rows.push_back(make_filter_row(std::vector<double>(static_cast<std::size_t>(width), tau)));
    f.row_class.assign(static_cast<std::size_t>(height), 0);
    return f;
}

inline std::vector<Tap> axis_taps(int in_size, int out_size, double factor, double tau) {
    std::vector<Tap> taps(static_cast<std::size_t>(out_size));
    for (int o = 0; o < out_size; ++o) taps[o] = shifted_linear_tap(map_output_coordinate(o, factor), tau, in_size);
    return taps;
}

struct PassPlan {
    int out_width = 0;
    int out_height = 0;
    FilterField horizontal_filter;  // indexed by source row, over source columns
    FilterField vertical_filter;    // indexed by source row, over output columns
    std::vector<Tap> horizontal_taps;
    std::vector<Tap> vertical_taps;
    int threads = 1;
    OpTally* tally = nullptr;
};

/// Streams one column strip across all NC channels: each source row is
/// pre-filtered and resampled horizontally, pre-filtered vertically against
/// the previous coefficient row, and output rows are emitted once both of
/// their vertical taps exist.
template <typename Arith, int NC, typename Sink>
void run_sli_unit(const Raster& src, const PassPlan& plan, const StripUnit& u, const Sink& sink) {
    const int h = src.height();
    const int sw = u.width();
    const std::size_t plane = static_cast<std::size_t>(sw);
    const int src_end = plan.horizontal_taps[static_cast<std::size_t>(u.x_end - 1)].i1 + 1;
    const Tap* htaps = plan.horizontal_taps.data() + u.x_begin;

    std::vector<double> f(static_cast<std::size_t>(src_end) * NC);
    std::vector<double> c(static_cast<std::size_t>(src_end) * NC);
    std::vector<double> ring(2 * NC * plane);  // [row parity][channel][column]
    std::vector<double> out(plane);
    auto line = [&](int y, int ch) { return ring.data() + (static_cast<std::size_t>(y & 1) * NC + ch) * plane; };
    Arith pre, interp;
    int yo = 0;
    for (int y = 0; y < h; ++y) {
        load_row(src, y, src_end, f.data());
        const FilterRow& hr = plan.horizontal_filter.rows[plan.horizontal_filter.row_class[y]];
        std::array<double, NC> prev;
        for (int ch = 0; ch < NC; ++ch) prev[ch] = f[ch];
        for (int x = 0; x < src_end; ++x) {
            const double g = hr.gain[x];
            const double r = hr.feedback[x];
            for (int ch = 0; ch < NC; ++ch) {
                prev[ch] = pre.sub(pre.mul(g, f[x * NC + ch]), pre.mul(r, prev[ch]));
                c[x * NC + ch] = prev[ch];
            }
        }

        for (int j = 0; j < sw; ++j) {
            const Tap& t = htaps[j];
            for (int ch = 0; ch < NC; ++ch)
                line(y, ch)[j] = interp.add(interp.mul(t.w0, c[t.i0 * NC + ch]), interp.mul(t.w1, c[t.i1 * NC + ch]));
        }

        // At y == 0 the virtual previous coefficient is the sample itself.
        const FilterRow& vr = plan.vertical_filter.rows[plan.vertical_filter.row_class[y]];
        const double* g = vr.gain.data() + u.x_begin;
        const double* r = vr.feedback.data() + u.x_begin;
        for (int ch = 0; ch < NC; ++ch) {
            double* cur = line(y, ch);
            const double* up = y == 0 ? cur : line(y - 1, ch);
            for (int j = 0; j < sw; ++j) cur[j] = pre.sub(pre.mul(g[j], cur[j]), pre.mul(r[j], up[j]));
        }

        for (; yo < plan.out_height && plan.vertical_taps[static_cast<std::size_t>(yo)].i1 <= y; ++yo) {
            const Tap& t = plan.vertical_taps[static_cast<std::size_t>(yo)];
            for (int ch = 0; ch < NC; ++ch) {
                const double* a = line(t.i0, ch);
                const double* b = line(t.i1, ch);
                for (int j = 0; j < sw; ++j) out[j] = interp.add(interp.mul(t.w0, a[j]), interp.mul(t.w1, b[j]));
                sink(u, ch, yo, out.data());
            }
        }
    }
    pre.flush(plan.tally, Phase::prefilter);
    interp.flush(plan.tally, Phase::interpolation);
}

template <typename Arith, typename Sink>
void run_sli_unit(const Raster& src, const PassPlan& plan, const StripUnit& u, const Sink& sink) {
    if (src.channels() == 3)
        run_sli_unit<Arith, 3>(src, plan, u, sink);
    else
        run_sli_unit<Arith, 1>(src, plan, u, sink);
}

template <typename Sink>
void run_sli(const Raster& src, const PassPlan& plan, const Sink& sink) {
    // With several strips each strip repeats the horizontal recursion from the
    // left edge, and those repeats are counted.
    const auto units = strip_units(plan.out_width, plan.threads);
    for_each_unit(units, plan.threads, [&](const StripUnit& u) {
        if (plan.tally != nullptr)
            run_sli_unit<CountingArith>(src, plan, u, sink);
        else
            run_sli_unit<PlainArith>(src, plan, u, sink);
    });
}

inline std::vector<Plane> sli_planes(const Raster& src, const PassPlan& plan) {
    auto planes = make_planes(src.channels(), plan.out_width, plan.out_height);
    run_sli(src, plan, PlaneSink{planes});
    return planes;
}

inline Raster sli_raster(const Raster& src, const PassPlan& plan) {
    Raster out(plan.out_width, plan.out_height, src.channels());
    run_sli(src, plan, RasterSink{out});
    return out;
}

inline PassPlan adaptive_plan(const Raster& raster, const ScaleJob& job, const ContentMap& map) {
    job.offsets.validate();
    if (map.width() != raster.width() || map.height() != raster.height())
        throw std::invalid_argument("scale_adaptive: content map does not match image");
    const int w = raster.width();
    const int h = raster.height();

    PassPlan plan;
    plan.out_width = scaled_size(w, job.factor);
    plan.out_height = scaled_size(h, job.factor);
    plan.threads = job.threads;
    plan.tally = job.tally;

    const ContentType major = map.major_type();
    const int bs = map.grid().block_size();
    std::vector<int> nearest_col(static_cast<std::size_t>(plan.out_width));
    for (int xo = 0; xo < plan.out_width; ++xo) nearest_col[xo] = nearest_source_index(xo, job.factor, w);

    for (int by = 0; by < map.blocks_y(); ++by) {
        std::vector<double> th(static_cast<std::size_t>(w));
        for (int x = 0; x < w; ++x) th[x] = job.offsets.get(map.block_label(x / bs, by), Direction::horizontal);
        plan.horizontal_filter.rows.push_back(make_filter_row(th));

        std::vector<double> tv(static_cast<std::size_t>(plan.out_width));
        for (int xo = 0; xo < plan.out_width; ++xo)
            tv[xo] = job.offsets.get(map.block_label(nearest_col[xo] / bs, by), Direction::vertical);
        plan.vertical_filter.rows.push_back(make_filter_row(tv));
    }
    plan.horizontal_filter.row_class.resize(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) plan.horizontal_filter.row_class[y] = y / bs;
    plan.vertical_filter.row_class = plan.horizontal_filter.row_class;

    plan.horizontal_taps =
        axis_taps(w, plan.out_width, job.factor, job.offsets.get(major, Direction::horizontal));
    plan.vertical_taps =
        axis_taps(h, plan.out_height, job.factor, job.offsets.get(major, Direction::vertical));
    return plan;
}

}  // namespace detail

/// Content-adaptive SLI, real-valued output (one plane per channel).
///  1. per-pixel type and frame major type come from the content map;
///  2. rows are pre-filtered with tau[pixel type][h];
///  3. rows are resampled with tau[major][h];
///  4. columns of the intermediate are pre-filtered with tau[type of nearest
///     source pixel][v];
///  5. columns are resampled with tau[major][v].
inline std::vector<Plane> scale_adaptive_planes(const Raster& raster, const ScaleJob& job, const ContentMap& map) {
    return detail::sli_planes(raster, detail::adaptive_plan(raster, job, map));
}

inline Raster scale_adaptive(const Raster& raster, const ScaleJob& job, const ContentMap& map) {
    return detail::sli_raster(raster, detail::adaptive_plan(raster, job, map));
}

/// Classification followed by adaptive scaling. With job.tally attached the
/// classification cost is counted too.
inline Raster scale_content_adaptive(const Raster& raster, const ScaleJob& job, const ClassifierParams& params = {}) {
    return scale_adaptive(raster, job, classify(raster, params, job.tally));
}

namespace detail {

inline PassPlan fixed_plan(const Raster& raster, double factor, double tau, int threads, OpTally* tally) {
    validate_tau(tau);
    PassPlan plan;
    plan.out_width = scaled_size(raster.width(), factor);
    plan.out_height = scaled_size(raster.height(), factor);
    plan.threads = threads;
    plan.tally = tally;
    plan.horizontal_filter = constant_field(raster.width(), raster.height(), tau);
    plan.vertical_filter = constant_field(plan.out_width, raster.height(), tau);
    plan.horizontal_taps = axis_taps(raster.width(), plan.out_width, factor, tau);
    plan.vertical_taps = axis_taps(raster.height(), plan.out_height, factor, tau);
    return plan;
}

}  // namespace detail

/// SLI with one tau everywhere, no classification.
inline std::vector<Plane> scale_fixed_sli_planes(const Raster& raster, double factor, double tau = kFixedSliTau,
                                                 int threads = 1, OpTally* tally = nullptr) {
    return detail::sli_planes(raster, detail::fixed_plan(raster, factor, tau, threads, tally));
}

inline Raster scale_fixed_sli(const Raster& raster, double factor, double tau = kFixedSliTau, int threads = 1,
                              OpTally* tally = nullptr) {
    return detail::sli_raster(raster, detail::fixed_plan(raster, factor, tau, threads, tally));
}

}  // namespace screenscale
