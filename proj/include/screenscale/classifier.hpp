/**
 * @file classifier.hpp
 * @brief Two-step 16x16 block classification of screen images into text and
 * pictorial content.
 *
 * Step 1 counts high-gradient pixels; blocks with fewer than L1 of them are
 * pictorial. Step 2 looks at the base color (modal exact color) and counts
 * pixels within +-2 of it per channel. Text regions concentrate on a few base
 * colors, so a block is text when that count exceeds L2. L2 is raised when the
 * left, upper and upper-left neighbours are all pictorial.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "instrument.hpp"
#include "raster.hpp"

namespace screenscale {

enum class ContentType : std::uint8_t { text = 0, pictorial = 1 };

inline std::string_view to_string(ContentType t) noexcept { return t == ContentType::text ? "text" : "pictorial"; }

inline ContentType content_type_from_string(std::string_view s) {
    if (s == "text") return ContentType::text;
    if (s == "pictorial") return ContentType::pictorial;
    throw std::invalid_argument("unknown content type '" + std::string(s) + "'");
}

/// Step-2 polarity. true: a block is text when N_BC > L2.
inline constexpr bool kTextWhenBaseColorAbove = true;

struct ClassifierParams {
    double gradient_threshold = 32.0;  // G, luma units
    double l1 = 20.0;                  // min high-gradient pixels for step 2, per 256 pixels
    double l2_low = 100.0;             // base-color threshold, per 256 pixels
    double l2_high = 160.0;            // used when left/up/up-left are all pictorial

    void validate() const {
        if (!(gradient_threshold > 0.0)) throw std::invalid_argument("classifier: G must be > 0");
        if (!(l1 > 0.0 && l1 <= 256.0)) throw std::invalid_argument("classifier: L1 must be in (0, 256]");
        if (!(l2_low > 0.0 && l2_low < l2_high && l2_high <= 256.0))
            throw std::invalid_argument("classifier: require 0 < L2_low < L2_high <= 256");
    }
    friend bool operator==(const ClassifierParams&, const ClassifierParams&) = default;
};

/// Strided read-only window onto a luma plane.
struct LumaBlock {
    const double* origin = nullptr;
    int width = 0;
    int height = 0;
    int stride = 0;

    double at(int x, int y) const noexcept { return origin[static_cast<std::ptrdiff_t>(y) * stride + x]; }

    static LumaBlock of(const Plane& plane, const BlockRect& r) noexcept {
        return {plane.values().data() + static_cast<std::ptrdiff_t>(r.y0) * plane.width() + r.x0, r.width, r.height,
                plane.width()};
    }
    static LumaBlock dense(std::span<const double> values, int width, int height) noexcept {
        return {values.data(), width, height, width};
    }
};

/// Strided read-only window onto interleaved 8-bit pixels (1 or 3 channels).
struct ColorBlock {
    const std::uint8_t* origin = nullptr;
    int width = 0;
    int height = 0;
    int stride = 0;  // in samples
    int channels = 0;

    const std::uint8_t* pixel(int x, int y) const noexcept {
        return origin + static_cast<std::ptrdiff_t>(y) * stride + static_cast<std::ptrdiff_t>(x) * channels;
    }

    static ColorBlock of(const Raster& raster, const BlockRect& r) noexcept {
        const int stride = raster.width() * raster.channels();
        return {raster.samples().data() + static_cast<std::ptrdiff_t>(r.y0) * stride +
                    static_cast<std::ptrdiff_t>(r.x0) * raster.channels(),
                r.width, r.height, stride, raster.channels()};
    }
    static ColorBlock dense(std::span<const std::uint8_t> samples, int width, int height, int channels) noexcept {
        return {samples.data(), width, height, width * channels, channels};
    }
};

/// Number of pixels whose max(|forward dx|, |forward dy|) exceeds G. Pixels on
/// the last column/row use whichever forward neighbour exists.
///
/// Op tally per pixel: one subtraction per existing difference, one max when
/// both exist, one threshold comparison.
template <typename Arith = PlainArith>
int count_high_gradient(const LumaBlock& block, double g, Arith& arith) {
    const int w = block.width;
    const int h = block.height;
    int count = 0;
    for (int y = 0; y < h; ++y) {
        const double* row = block.origin + static_cast<std::ptrdiff_t>(y) * block.stride;
        if (y + 1 < h) {
            const double* next = row + block.stride;
            for (int x = 0; x + 1 < w; ++x) {
                const double mag = std::max(std::abs(row[x + 1] - row[x]), std::abs(next[x] - row[x]));
                count += mag > g ? 1 : 0;
            }
            count += std::abs(next[w - 1] - row[w - 1]) > g ? 1 : 0;
        } else {
            for (int x = 0; x + 1 < w; ++x) count += std::abs(row[x + 1] - row[x]) > g ? 1 : 0;
            count += 0.0 > g ? 1 : 0;
        }
    }
    if constexpr (Arith::counting) {
        const auto iw = static_cast<std::uint64_t>(w - 1);
        const auto ih = static_cast<std::uint64_t>(h - 1);
        arith.tick_add(4 * iw * ih + 3 * ih + 2 * iw + 1);
    }
    return count;
}

inline int count_high_gradient(const LumaBlock& block, double g) {
    PlainArith a;
    return count_high_gradient(block, g, a);
}

struct BaseColor {
    std::array<std::uint8_t, 3> color{};  // unused channels are zero
    int count = 0;                        // N_BC
};

/// Modal exact color (ties: smallest, channel-lexicographic) and the number
/// of pixels within +-2 of it on every channel. Colors are histogrammed in a
/// small open-addressing table; a block has at most 256 distinct colors.
template <typename Arith = PlainArith>
BaseColor base_color_count(const ColorBlock& block, Arith& arith) {
    constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;
    constexpr int kSlots = 512;
    const int n = block.width * block.height;
    if (n <= 0) return {};
    if (n > kSlots / 2) throw std::invalid_argument("base_color_count: block larger than 256 pixels");
    std::array<std::uint32_t, kSlots> keys;
    std::array<int, kSlots> counts;
    std::array<std::uint16_t, kSlots / 2> used{};  // occupied slots, in first-seen order
    int distinct = 0;
    keys.fill(kEmpty);

    for (int y = 0; y < block.height; ++y) {
        for (int x = 0; x < block.width; ++x) {
            const std::uint8_t* p = block.pixel(x, y);
            std::uint32_t k = 0;
            for (int c = 0; c < block.channels; ++c) k = (k << 8) | p[c];
            std::uint32_t slot = (k * 2654435761u) >> 23;
            while (keys[slot] != k && keys[slot] != kEmpty) slot = (slot + 1) & (kSlots - 1);
            if (keys[slot] == kEmpty) {
                keys[slot] = k;
                counts[slot] = 0;
                used[static_cast<std::size_t>(distinct++)] = static_cast<std::uint16_t>(slot);
            }
            ++counts[slot];
        }
    }
    arith.tick_add(static_cast<std::uint64_t>(n));  // one tally increment per pixel

    int mode = used[0];
    for (int u = 1; u < distinct; ++u) {
        const int i = used[static_cast<std::size_t>(u)];
        if (counts[i] > counts[mode] || (counts[i] == counts[mode] && keys[i] < keys[mode])) mode = i;
    }

    auto channel = [&](std::uint32_t key, int c) {
        return static_cast<int>((key >> (8 * (block.channels - 1 - c))) & 0xFFu);
    };
    BaseColor out;
    for (int c = 0; c < block.channels; ++c) out.color[c] = static_cast<std::uint8_t>(channel(keys[mode], c));
    for (int u = 0; u < distinct; ++u) {
        const int i = used[static_cast<std::size_t>(u)];
        bool inside = true;
        for (int c = 0; c < block.channels && inside; ++c)
            inside = std::abs(channel(keys[i], c) - channel(keys[mode], c)) <= 2;
        if (inside) {
            out.count += counts[i];
            arith.tick_add();
        }
    }
    return out;
}

inline BaseColor base_color_count(const ColorBlock& block) {
    PlainArith a;
    return base_color_count(block, a);
}

/// Labels of the left, upper and upper-left blocks; absent outside the image.
struct NeighborLabels {
    std::optional<ContentType> left;
    std::optional<ContentType> upper;
    std::optional<ContentType> upper_left;

    bool all_pictorial() const noexcept {
        auto pic = [](const std::optional<ContentType>& t) { return t && *t == ContentType::pictorial; };
        return pic(left) && pic(upper) && pic(upper_left);
    }
};

struct BlockFeatures {
    int high_gradient = 0;  // N_HG
    int base_color = 0;     // N_BC
    int pixel_count = 256;
};

/// Decision rule on precomputed features. Thresholds are expressed per 256
/// pixels and scale with the pixel count of partial edge blocks.
inline ContentType classify_block(const BlockFeatures& f, const ClassifierParams& params,
                                  const NeighborLabels& neighbors) {
    const double scale = f.pixel_count / 256.0;
    if (f.high_gradient < params.l1 * scale) return ContentType::pictorial;
    const double l2 = (neighbors.all_pictorial() ? params.l2_high : params.l2_low) * scale;
    const bool above = f.base_color > l2;
    return above == kTextWhenBaseColorAbove ? ContentType::text : ContentType::pictorial;
}

/// Evaluates both steps on the block's pixels. Step 2 is skipped when step 1
/// already decides.
template <typename Arith = PlainArith>
ContentType classify_block(const LumaBlock& luma, const ColorBlock& color, const ClassifierParams& params,
                           const NeighborLabels& neighbors, Arith& arith) {
    BlockFeatures f;
    f.pixel_count = luma.width * luma.height;
    f.high_gradient = count_high_gradient(luma, params.gradient_threshold, arith);
    if (f.high_gradient < params.l1 * (f.pixel_count / 256.0)) return ContentType::pictorial;
    f.base_color = base_color_count(color, arith).count;
    return classify_block(f, params, neighbors);
}

inline ContentType classify_block(const LumaBlock& luma, const ColorBlock& color, const ClassifierParams& params,
                                  const NeighborLabels& neighbors = {}) {
    PlainArith a;
    return classify_block(luma, color, params, neighbors, a);
}

class ContentMap {
public:
    ContentMap(BlockGrid grid, std::vector<ContentType> labels) : grid_(grid), labels_(std::move(labels)) {
        if (labels_.size() != static_cast<std::size_t>(grid_.block_count()))
            throw std::invalid_argument("content map: label count does not match grid");
        std::size_t text = 0;
        for (ContentType t : labels_) text += t == ContentType::text;
        // Ties go to text.
        major_ = 2 * text >= labels_.size() ? ContentType::text : ContentType::pictorial;
    }

    /// Uniform map: every block carries the same label.
    static ContentMap uniform(int width, int height, ContentType type) {
        BlockGrid g(width, height);
        return ContentMap(g, std::vector<ContentType>(static_cast<std::size_t>(g.block_count()), type));
    }

    const BlockGrid& grid() const noexcept { return grid_; }
    int blocks_x() const noexcept { return grid_.blocks_x(); }
    int blocks_y() const noexcept { return grid_.blocks_y(); }
    int width() const noexcept { return grid_.width(); }
    int height() const noexcept { return grid_.height(); }
    const std::vector<ContentType>& labels() const noexcept { return labels_; }
    ContentType major_type() const noexcept { return major_; }

    ContentType block_label(int bx, int by) const noexcept {
        return labels_[static_cast<std::size_t>(by) * grid_.blocks_x() + bx];
    }
    ContentType pixel_type(int x, int y) const noexcept {
        const auto [bx, by] = grid_.block_of(x, y);
        return block_label(bx, by);
    }
    std::size_t count(ContentType t) const noexcept {
        return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), t));
    }

    /// One pixel per block, text = 255.
    Raster to_mask() const {
        Raster mask(blocks_x(), blocks_y(), 1);
        for (int by = 0; by < blocks_y(); ++by)
            for (int bx = 0; bx < blocks_x(); ++bx)
                mask.at(bx, by) = block_label(bx, by) == ContentType::text ? 255 : 0;
        return mask;
    }

private:
    BlockGrid grid_;
    std::vector<ContentType> labels_;
    ContentType major_ = ContentType::text;
};

namespace detail {

/// Visits blocks in raster-scan order so that left/upper/upper-left labels
/// are final when a block is visited. luma_band(by) returns the luma rows of
/// block row `by` as {data, stride}.
template <typename Arith, typename LumaBand>
ContentMap label_blocks(const BlockGrid& grid, const Raster& color, const ClassifierParams& params, Arith& arith,
                        LumaBand&& luma_band) {
    std::vector<ContentType> labels(static_cast<std::size_t>(grid.block_count()));
    auto label = [&](int bx, int by) -> std::optional<ContentType> {
        if (bx < 0 || by < 0) return std::nullopt;
        return labels[static_cast<std::size_t>(by) * grid.blocks_x() + bx];
    };
    for (int by = 0; by < grid.blocks_y(); ++by) {
        const auto [band, stride] = luma_band(by);
        for (int bx = 0; bx < grid.blocks_x(); ++bx) {
            const BlockRect r = grid.block(bx, by);
            const NeighborLabels nb{label(bx - 1, by), label(bx, by - 1), label(bx - 1, by - 1)};
            const LumaBlock lb{band + r.x0, r.width, r.height, stride};
            labels[static_cast<std::size_t>(by) * grid.blocks_x() + bx] =
                classify_block(lb, ColorBlock::of(color, r), params, nb, arith);
        }
    }
    return ContentMap(grid, std::move(labels));
}

}  // namespace detail

/// Classifies every block of `color` using a precomputed luma plane.
template <typename Arith = PlainArith>
ContentMap classify_image(const Plane& luma, const Raster& color, const ClassifierParams& params, Arith& arith) {
    params.validate();
    if (luma.width() != color.width() || luma.height() != color.height())
        throw std::invalid_argument("classify_image: luma and color dimensions differ");
    const BlockGrid grid(luma.width(), luma.height());
    return detail::label_blocks(grid, color, params, arith, [&](int by) {
        return std::pair{luma.row(by * grid.block_size()).data(), luma.width()};
    });
}

inline ContentMap classify_image(const Plane& luma, const Raster& color, const ClassifierParams& params) {
    PlainArith a;
    return classify_image(luma, color, params, a);
}

/// Luma conversion plus classification. Luma is produced one block row at a
/// time and matches to_luma exactly. With a tally attached, the luma
/// weighting and block statistics are counted under Phase::classification.
inline ContentMap classify(const Raster& raster, const ClassifierParams& params, OpTally* tally = nullptr) {
    params.validate();
    const BlockGrid grid(raster.width(), raster.height());
    const int w = raster.width();
    const int bs = grid.block_size();
    std::vector<double> band(static_cast<std::size_t>(w) * bs);
    auto luma_band = [&](int by) {
        const int y0 = by * bs;
        const int rows = std::min(bs, raster.height() - y0);
        const std::size_t n = static_cast<std::size_t>(w) * rows;
        const std::uint8_t* src = raster.samples().data() + static_cast<std::size_t>(y0) * w * raster.channels();
        if (raster.channels() == 1) {
            for (std::size_t i = 0; i < n; ++i) band[i] = src[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                band[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        }
        return std::pair{static_cast<const double*>(band.data()), w};
    };
    if (tally == nullptr) {
        PlainArith a;
        return detail::label_blocks(grid, raster, params, a, luma_band);
    }
    CountingArith a;
    if (raster.channels() == 3) {
        a.tick_mul(3 * raster.pixel_count());
        a.tick_add(2 * raster.pixel_count());
    }
    ContentMap map = detail::label_blocks(grid, raster, params, a, luma_band);
    a.flush(tally, Phase::classification);
    return map;
}

}  // namespace screenscale
