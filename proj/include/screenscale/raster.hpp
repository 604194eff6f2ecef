/**
 * @file raster.hpp
 * @brief 8-bit rasters, real-valued planes, block partitioning and PNM I/O.
 *
 * Every numeric stage of the library works on Plane (one channel of doubles).
 * Raster is the interchange format for files and for the final quantized output.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace screenscale {

class Raster {
public:
    Raster() = default;

    Raster(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels) {
        validate_shape(width, height, channels);
        samples_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    Raster(int width, int height, int channels, std::vector<std::uint8_t> samples)
        : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
        validate_shape(width, height, channels);
        if (samples_.size() != static_cast<std::size_t>(width) * height * channels)
            throw std::invalid_argument("raster: sample count does not match dimensions");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    std::span<const std::uint8_t> samples() const noexcept { return samples_; }
    std::span<std::uint8_t> samples() noexcept { return samples_; }

    std::uint8_t at(int x, int y, int c = 0) const { return samples_[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return samples_[index(x, y, c)]; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static void validate_shape(int w, int h, int c) {
        if (w < 1 || h < 1) throw std::invalid_argument("raster: dimensions must be positive");
        if (c != 1 && c != 3) throw std::invalid_argument("raster: channels must be 1 or 3");
    }
    std::size_t index(int x, int y, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> samples_;
};

class Plane {
public:
    Plane() = default;

    Plane(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        if (width < 1 || height < 1) throw std::invalid_argument("plane: dimensions must be positive");
        values_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    Plane(int width, int height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {
        if (width < 1 || height < 1) throw std::invalid_argument("plane: dimensions must be positive");
        if (values_.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("plane: value count does not match dimensions");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("plane: non-finite value");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    std::span<const double> row(int y) const noexcept {
        return std::span<const double>(values_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }
    std::span<double> row(int y) noexcept {
        return std::span<double>(values_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

struct BlockRect {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;

    int pixel_count() const noexcept { return width * height; }
    bool is_partial(int block_size) const noexcept { return width != block_size || height != block_size; }
};

/// Non-overlapping tiling of an image by square blocks. Edge blocks are
/// clipped (partial) when the image size is not a multiple of the block size.
class BlockGrid {
public:
    static constexpr int kBlockSize = 16;

    BlockGrid(int width, int height, int block_size = kBlockSize)
        : width_(width), height_(height), block_size_(block_size) {
        if (width < 1 || height < 1 || block_size < 1)
            throw std::invalid_argument("block grid: dimensions must be positive");
        blocks_x_ = (width + block_size - 1) / block_size;
        blocks_y_ = (height + block_size - 1) / block_size;
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int block_size() const noexcept { return block_size_; }
    int blocks_x() const noexcept { return blocks_x_; }
    int blocks_y() const noexcept { return blocks_y_; }
    int block_count() const noexcept { return blocks_x_ * blocks_y_; }

    BlockRect block(int bx, int by) const noexcept {
        const int x0 = bx * block_size_;
        const int y0 = by * block_size_;
        return {x0, y0, std::min(block_size_, width_ - x0), std::min(block_size_, height_ - y0)};
    }

    std::pair<int, int> block_of(int x, int y) const noexcept { return {x / block_size_, y / block_size_}; }

private:
    int width_;
    int height_;
    int block_size_;
    int blocks_x_ = 0;
    int blocks_y_ = 0;
};

// ---------------------------------------------------------------------------
// Conversions

/// BT.601 luma, real-valued. Single-channel rasters are copied through.
inline Plane to_luma(const Raster& raster) {
    Plane out(raster.width(), raster.height());
    auto src = raster.samples();
    auto dst = out.values();
    if (raster.channels() == 1) {
        std::copy(src.begin(), src.end(), dst.begin());
        return out;
    }
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    }
    return out;
}

/// Splits an interleaved raster into one plane per channel.
inline std::vector<Plane> to_planes(const Raster& raster) {
    std::vector<Plane> planes;
    const int nc = raster.channels();
    auto src = raster.samples();
    for (int c = 0; c < nc; ++c) {
        Plane p(raster.width(), raster.height());
        auto dst = p.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i * nc + c];
        planes.push_back(std::move(p));
    }
    return planes;
}

/// Round half away from zero, then clamp to [0, 255].
inline std::uint8_t quantize_sample(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 255.0) return 255;
    const int i = static_cast<int>(v);
    return static_cast<std::uint8_t>(i + (v - i >= 0.5 ? 1 : 0));
}

inline Raster round_to_raster(std::span<const Plane> planes) {
    if (planes.empty() || (planes.size() != 1 && planes.size() != 3))
        throw std::invalid_argument("round_to_raster: expected 1 or 3 planes");
    const int w = planes[0].width();
    const int h = planes[0].height();
    const int nc = static_cast<int>(planes.size());
    for (const auto& p : planes)
        if (p.width() != w || p.height() != h) throw std::invalid_argument("round_to_raster: plane size mismatch");
    Raster out(w, h, nc);
    auto dst = out.samples();
    for (int c = 0; c < nc; ++c) {
        auto src = planes[c].values();
        for (std::size_t i = 0; i < src.size(); ++i) dst[i * nc + c] = quantize_sample(src[i]);
    }
    return out;
}

inline Raster round_to_raster(const Plane& plane) { return round_to_raster(std::span<const Plane>(&plane, 1)); }

// ---------------------------------------------------------------------------
// PNM I/O (binary P5 / P6, maxval 255)

enum class ImageErrorKind { missing_file, malformed_header, truncated_payload, unsupported_maxval, write_failed };

class ImageError : public std::runtime_error {
public:
    ImageError(ImageErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ImageErrorKind kind() const noexcept { return kind_; }

private:
    ImageErrorKind kind_;
};

namespace detail {

inline std::string read_pnm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (std::isspace(ch)) {
            ch = in.get();
        } else {
            break;
        }
    }
    while (ch != EOF && !std::isspace(ch) && ch != '#') {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    }
    if (tok.empty()) throw ImageError(ImageErrorKind::malformed_header, path + ": unexpected end of header");
    // The single whitespace byte after maxval has been consumed by the loop above.
    if (ch == '#') in.unget();
    return tok;
}

inline int parse_header_int(const std::string& tok, const std::string& path) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9)
        throw ImageError(ImageErrorKind::malformed_header, path + ": bad header field '" + tok + "'");
    return std::stoi(tok);
}

}  // namespace detail

inline Raster load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError(ImageErrorKind::missing_file, path + ": cannot open file");

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw ImageError(ImageErrorKind::malformed_header, path + ": not a binary PGM/PPM file");
    const int channels = magic[1] == '6' ? 3 : 1;

    const int width = detail::parse_header_int(detail::read_pnm_token(in, path), path);
    const int height = detail::parse_header_int(detail::read_pnm_token(in, path), path);
    const int maxval = detail::parse_header_int(detail::read_pnm_token(in, path), path);
    if (width < 1 || height < 1) throw ImageError(ImageErrorKind::malformed_header, path + ": zero dimension");
    if (maxval != 255)
        throw ImageError(ImageErrorKind::unsupported_maxval, path + ": maxval " + std::to_string(maxval) + " (only 255)");

    const std::size_t expected = static_cast<std::size_t>(width) * height * channels;
    std::vector<std::uint8_t> samples(expected);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(expected));
    if (static_cast<std::size_t>(in.gcount()) != expected)
        throw ImageError(ImageErrorKind::truncated_payload,
                         path + ": payload has " + std::to_string(in.gcount()) + " of " + std::to_string(expected) +
                             " bytes");
    return Raster(width, height, channels, std::move(samples));
}

inline void save_image(const Raster& raster, const std::string& path) {
    if (path.empty()) throw ImageError(ImageErrorKind::write_failed, "save_image: empty path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ImageError(ImageErrorKind::write_failed, path + ": cannot open for writing");
    out << (raster.channels() == 3 ? "P6" : "P5") << '\n'
        << raster.width() << ' ' << raster.height() << '\n'
        << 255 << '\n';
    auto s = raster.samples();
    out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size()));
    out.flush();
    if (!out) throw ImageError(ImageErrorKind::write_failed, path + ": write failed");
}

}  // namespace screenscale
