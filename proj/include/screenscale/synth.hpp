/**
 * @file synth.hpp
 * @brief Deterministic synthetic screen content: rendered text regions,
 * smooth pictorial regions, composites with block ground truth, and block
 * corpora for offset training.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "classifier.hpp"
#include "raster.hpp"

namespace screenscale::synth {

using Rng = std::mt19937_64;
using Rgb = std::array<std::uint8_t, 3>;

struct Rect {
    int x0, y0, width, height;
};

inline void fill(Raster& img, const Rect& r, const Rgb& color) {
    for (int y = r.y0; y < r.y0 + r.height; ++y)
        for (int x = r.x0; x < r.x0 + r.width; ++x)
            for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = color[c];
}

/// A random 5x7 bitmap font. Every glyph has at least one full-height stem so
/// that glyphs read as strokes rather than speckle.
class BitmapFont {
public:
    static constexpr int kGlyphWidth = 5;
    static constexpr int kGlyphHeight = 7;

    explicit BitmapFont(Rng& rng, int glyph_count = 48) {
        std::bernoulli_distribution ink(0.35);
        std::uniform_int_distribution<int> col(0, kGlyphWidth - 1);
        for (int g = 0; g < glyph_count; ++g) {
            std::array<bool, kGlyphWidth * kGlyphHeight> bits{};
            for (auto&& b : bits) b = ink(rng);
            const int stem = col(rng);
            for (int y = 0; y < kGlyphHeight; ++y) bits[y * kGlyphWidth + stem] = true;
            glyphs_.push_back(bits);
        }
    }

    int size() const noexcept { return static_cast<int>(glyphs_.size()); }
    bool ink(int glyph, int x, int y) const noexcept { return glyphs_[glyph][y * kGlyphWidth + x]; }

private:
    std::vector<std::array<bool, kGlyphWidth * kGlyphHeight>> glyphs_;
};

/// Lines of glyphs on a flat background: 6 px character pitch, 10 px line pitch.
inline void render_text(Raster& img, const Rect& r, Rng& rng, const Rgb& background = {250, 250, 250}) {
    BitmapFont font(rng);
    fill(img, r, background);
    std::uniform_int_distribution<int> pick(0, font.size() - 1);
    std::bernoulli_distribution space(0.08);
    std::bernoulli_distribution colored_line(0.2);
    const std::array<Rgb, 3> inks{Rgb{20, 20, 20}, Rgb{10, 60, 200}, Rgb{180, 20, 30}};
    std::uniform_int_distribution<int> pick_ink(1, 2);

    constexpr int pitch_x = BitmapFont::kGlyphWidth + 1;
    constexpr int pitch_y = BitmapFont::kGlyphHeight + 3;
    for (int ly = r.y0 + 1; ly + BitmapFont::kGlyphHeight <= r.y0 + r.height; ly += pitch_y) {
        const Rgb ink = colored_line(rng) ? inks[pick_ink(rng)] : inks[0];
        for (int lx = r.x0 + 1; lx + BitmapFont::kGlyphWidth <= r.x0 + r.width; lx += pitch_x) {
            if (space(rng)) continue;
            const int g = pick(rng);
            for (int y = 0; y < BitmapFont::kGlyphHeight; ++y)
                for (int x = 0; x < BitmapFont::kGlyphWidth; ++x)
                    if (font.ink(g, x, y))
                        for (int c = 0; c < img.channels(); ++c) img.at(lx + x, ly + y, c) = ink[c];
        }
    }
}

/// Smooth photographic stand-in: a few low-frequency sinusoids per channel
/// plus mild noise. Local differences stay far below the default gradient
/// threshold.
inline void render_picture(Raster& img, const Rect& r, Rng& rng, double noise = 2.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, noise);
    struct Wave {
        double fx, fy, phase, amp;
    };
    std::array<std::vector<Wave>, 3> waves;
    std::array<double, 3> base{};
    for (int c = 0; c < 3; ++c) {
        base[c] = 70.0 + 110.0 * u(rng);
        for (int k = 0; k < 4; ++k) {
            const double period = 48.0 + 160.0 * u(rng);
            const double angle = 2.0 * std::numbers::pi * u(rng);
            waves[c].push_back({std::cos(angle) / period, std::sin(angle) / period, 2.0 * std::numbers::pi * u(rng),
                                8.0 + 14.0 * u(rng)});
        }
    }
    for (int y = r.y0; y < r.y0 + r.height; ++y) {
        for (int x = r.x0; x < r.x0 + r.width; ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                double v = base[c];
                for (const Wave& w : waves[c])
                    v += w.amp * std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
                img.at(x, y, c) = quantize_sample(v + n(rng));
            }
        }
    }
}

struct Composite {
    Raster image;
    std::vector<ContentType> truth;  // per 16x16 block, raster order
};

/// Left part (rounded to whole blocks) is text, the rest is pictorial.
inline Composite text_picture_composite(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    Composite out{Raster(width, height, 3), {}};
    const int split = std::max(16, (width / 2) / 16 * 16);
    render_text(out.image, {0, 0, std::min(split, width), height}, rng);
    if (split < width) render_picture(out.image, {split, 0, width - split, height}, rng);
    BlockGrid grid(width, height);
    for (int by = 0; by < grid.blocks_y(); ++by)
        for (int bx = 0; bx < grid.blocks_x(); ++bx)
            out.truth.push_back(bx * 16 < split ? ContentType::text : ContentType::pictorial);
    return out;
}

/// A full page of text.
inline Raster text_page(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    Raster img(width, height, 3);
    render_text(img, {0, 0, width, height}, rng);
    return img;
}

/// A full picture.
inline Raster picture(int width, int height, std::uint64_t seed) {
    Rng rng(seed);
    Raster img(width, height, 3);
    render_picture(img, {0, 0, width, height}, rng);
    return img;
}

/// Uniform-random RGB noise.
inline Raster noise_image(int width, int height, std::uint64_t seed, int channels = 3) {
    Rng rng(seed);
    std::uniform_int_distribution<int> v(0, 255);
    Raster img(width, height, channels);
    for (auto& s : img.samples()) s = static_cast<std::uint8_t>(v(rng));
    return img;
}

/// Training corpus: whole 16x16 blocks cut on a block-aligned grid from
/// freshly rendered text pages and pictures (50 blocks per 160x80 image).
struct Corpus {
    struct Source {
        Raster image;
        ContentType label;
    };
    struct Block {
        int source;
        int x;
        int y;
    };
    std::vector<Source> sources;
    std::vector<Block> blocks;

    std::vector<Plane> luma_blocks(ContentType label) const {
        std::vector<Plane> out;
        std::vector<Plane> lumas;
        for (const Source& s : sources) lumas.push_back(to_luma(s.image));
        for (const Block& b : blocks) {
            if (sources[b.source].label != label) continue;
            Plane p(16, 16);
            for (int y = 0; y < 16; ++y)
                for (int x = 0; x < 16; ++x) p.at(x, y) = lumas[b.source].at(b.x + x, b.y + y);
            out.push_back(std::move(p));
        }
        return out;
    }
};

inline Corpus training_corpus(std::uint64_t seed, int per_label = 200) {
    constexpr int w = 160;
    constexpr int h = 80;
    constexpr int per_image = (w / 16) * (h / 16);
    Corpus corpus;
    Rng seeds(seed);
    for (ContentType label : {ContentType::text, ContentType::pictorial}) {
        int remaining = per_label;
        while (remaining > 0) {
            const auto s = seeds();
            Raster img = label == ContentType::text ? text_page(w, h, s) : picture(w, h, s);
            const int index = static_cast<int>(corpus.sources.size());
            corpus.sources.push_back({std::move(img), label});
            for (int k = 0; k < per_image && remaining > 0; ++k, --remaining)
                corpus.blocks.push_back({index, (k % (w / 16)) * 16, (k / (w / 16)) * 16});
        }
    }
    return corpus;
}

}  // namespace screenscale::synth
