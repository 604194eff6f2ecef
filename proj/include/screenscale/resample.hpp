/**
 * @file resample.hpp
 * @brief Shared plumbing for the streaming separable scalers: work split,
 * row loading from interleaved rasters, and output sinks.
 *
 * Every scaler walks source rows top to bottom once per column strip,
 * keeping only a few intermediate rows alive. Each output sample is
 * produced by the same operations whatever the split, so results do not
 * depend on the thread count.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "instrument.hpp"
#include "raster.hpp"

namespace screenscale::detail {

/// One unit of work: a half-open range of output columns, all channels.
struct StripUnit {
    int x_begin = 0;
    int x_end = 0;
    int width() const noexcept { return x_end - x_begin; }
};

inline std::vector<StripUnit> strip_units(int out_width, int threads) {
    const int strips = std::clamp(threads, 1, out_width);
    const int chunk = (out_width + strips - 1) / strips;
    std::vector<StripUnit> units;
    for (int x = 0; x < out_width; x += chunk) units.push_back({x, std::min(out_width, x + chunk)});
    return units;
}

/// Runs body(unit) over all units on up to `threads` workers.
template <typename Body>
void for_each_unit(const std::vector<StripUnit>& units, int threads, Body&& body) {
    parallel_for(static_cast<int>(units.size()), threads, [&](int b, int e) {
        for (int i = b; i < e; ++i) body(units[static_cast<std::size_t>(i)]);
    });
}

/// Converts pixels [0, count) of row y, all channels interleaved, to doubles.
inline void load_row(const Raster& r, int y, int count, double* dst) noexcept {
    const std::size_t n = static_cast<std::size_t>(count) * r.channels();
    const std::uint8_t* src = r.samples().data() + static_cast<std::size_t>(y) * r.width() * r.channels();
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
}

/// Collects real-valued output rows into planes.
struct PlaneSink {
    std::vector<Plane>& planes;
    void operator()(const StripUnit& u, int channel, int yo, const double* row) const noexcept {
        std::copy(row, row + u.width(), planes[static_cast<std::size_t>(channel)].row(yo).begin() + u.x_begin);
    }
};

/// Quantizes output rows straight into an interleaved raster.
struct RasterSink {
    Raster& out;
    void operator()(const StripUnit& u, int channel, int yo, const double* row) const noexcept {
        const int nc = out.channels();
        std::uint8_t* dst =
            out.samples().data() + (static_cast<std::size_t>(yo) * out.width() + u.x_begin) * nc + channel;
        for (int j = 0; j < u.width(); ++j) dst[static_cast<std::size_t>(j) * nc] = quantize_sample(row[j]);
    }
};

inline std::vector<Plane> make_planes(int channels, int width, int height) {
    return std::vector<Plane>(static_cast<std::size_t>(channels), Plane(width, height));
}

}  // namespace screenscale::detail
