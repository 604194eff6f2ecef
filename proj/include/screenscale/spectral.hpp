/**
 * @file spectral.hpp
 * @brief Offline shift-offset training from block energy densities.
 *
 * The reconstruction error of a shifted-linear interpolator is estimated in
 * the frequency domain as
 *
 *     eta(tau) = sqrt( 1/(2 pi) * sum_w |F(w)|^2 E_tau(w) )
 *
 * where |F|^2 is the averaged energy density of a block corpus and E_tau is
 * the Fourier error kernel of the interpolator. Sweeping tau, fitting a
 * polynomial to eta and taking its minimum yields the trained offset.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "classifier.hpp"
#include "raster.hpp"
#include "sli.hpp"

namespace screenscale {

inline constexpr int kSpectrumSize = 16;

/// Angular frequency of DFT bin `index` in a centred length-n spectrum:
/// index 0 is -pi, index n/2 is DC.
inline double bin_frequency(int index, int n = kSpectrumSize) noexcept {
    return 2.0 * std::numbers::pi * (index - n / 2) / n;
}

/// Averaged |DFT|^2 of a set of 16x16 blocks. The 2-D grid is indexed
/// [v][h] with both axes centred (see bin_frequency); the 1-D forms average
/// the grid over the orthogonal axis.
struct EnergyDensity {
    std::array<double, kSpectrumSize * kSpectrumSize> grid{};
    std::array<double, kSpectrumSize> horizontal{};
    std::array<double, kSpectrumSize> vertical{};
    int block_count = 0;

    double at(int v_index, int h_index) const noexcept { return grid[v_index * kSpectrumSize + h_index]; }
    double& at(int v_index, int h_index) noexcept { return grid[v_index * kSpectrumSize + h_index]; }

    std::span<const double> directional(Direction d) const noexcept {
        return d == Direction::horizontal ? std::span<const double>(horizontal) : std::span<const double>(vertical);
    }

    /// Recomputes the 1-D forms from the grid.
    void reduce() noexcept {
        horizontal.fill(0.0);
        vertical.fill(0.0);
        for (int v = 0; v < kSpectrumSize; ++v) {
            for (int h = 0; h < kSpectrumSize; ++h) {
                horizontal[h] += at(v, h) / kSpectrumSize;
                vertical[v] += at(v, h) / kSpectrumSize;
            }
        }
    }

    EnergyDensity scaled(double k) const {
        EnergyDensity d = *this;
        for (double& x : d.grid) x *= k;
        d.reduce();
        return d;
    }
};

/// Unnormalized forward DFT of each block (DC retained), squared magnitude,
/// averaged over blocks.
inline EnergyDensity block_energy_density(std::span<const Plane> blocks) {
    constexpr int n = kSpectrumSize;
    if (blocks.empty()) throw std::invalid_argument("energy density: no blocks");
    std::array<std::complex<double>, n * n> twiddle;  // [k][x] = exp(-j 2 pi k' x / n), k' = k - n/2
    for (int k = 0; k < n; ++k)
        for (int x = 0; x < n; ++x)
            twiddle[k * n + x] = std::polar(1.0, -2.0 * std::numbers::pi * (k - n / 2) * x / n);

    EnergyDensity d;
    std::array<std::complex<double>, n * n> rows;  // [y][kh]
    for (const Plane& b : blocks) {
        if (b.width() != n || b.height() != n) throw std::invalid_argument("energy density: block must be 16x16");
        for (int y = 0; y < n; ++y) {
            for (int kh = 0; kh < n; ++kh) {
                std::complex<double> acc = 0.0;
                for (int x = 0; x < n; ++x) acc += b.at(x, y) * twiddle[kh * n + x];
                rows[y * n + kh] = acc;
            }
        }
        for (int kv = 0; kv < n; ++kv) {
            for (int kh = 0; kh < n; ++kh) {
                std::complex<double> acc = 0.0;
                for (int y = 0; y < n; ++y) acc += rows[y * n + kh] * twiddle[kv * n + y];
                d.at(kv, kh) += std::norm(acc);
            }
        }
    }
    d.block_count = static_cast<int>(blocks.size());
    for (double& x : d.grid) x /= d.block_count;
    d.reduce();
    return d;
}

inline double sinc(double u) noexcept {
    if (u == 0.0) return 1.0;
    const double pu = std::numbers::pi * u;
    return std::sin(pu) / pu;
}

/// Fourier error kernel of tau-shifted linear interpolation (unit sampling):
///   1 + (2 + cos w) / (3 |1 - tau + tau e^{-jw}|^2)
///     - 2 sinc^2(w / 2pi) Re( e^{-jw tau} / (1 - tau + tau e^{-jw}) )
inline double error_kernel(double tau, double omega) {
    validate_tau(tau);
    constexpr double slack = 1e-12;
    if (!(std::abs(omega) <= std::numbers::pi + slack)) throw std::invalid_argument("error_kernel: omega outside [-pi, pi]");
    using namespace std::complex_literals;
    const std::complex<double> denom = (1.0 - tau) + tau * std::exp(-1i * omega);
    const double s = sinc(omega / (2.0 * std::numbers::pi));
    return 1.0 + (2.0 + std::cos(omega)) / (3.0 * std::norm(denom)) -
           2.0 * s * s * (std::exp(-1i * omega * tau) / denom).real();
}

namespace detail {

inline double checked_sqrt(double radicand) {
    constexpr double residue = -1e-12;
    if (radicand < residue) throw std::domain_error("interpolation error: negative energy sum");
    return std::sqrt(std::max(radicand, 0.0));
}

}  // namespace detail

/// Directional error for a centred 1-D density of even length.
inline double interpolation_error_1d(std::span<const double> density, double tau) {
    const int n = static_cast<int>(density.size());
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("interpolation_error_1d: density length must be even");
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (density[k] < 0.0 || !std::isfinite(density[k]))
            throw std::invalid_argument("interpolation_error_1d: density must be finite and non-negative");
        if (density[k] != 0.0) sum += density[k] * error_kernel(tau, bin_frequency(k, n));
    }
    return detail::checked_sqrt(sum / (2.0 * std::numbers::pi));
}

/// Separable 2-D form with E_{tau_h}(w_h) E_{tau_v}(w_v) weighting.
inline double interpolation_error_2d(const EnergyDensity& density, double tau_h, double tau_v) {
    std::array<double, kSpectrumSize> eh{}, ev{};
    for (int k = 0; k < kSpectrumSize; ++k) {
        eh[k] = error_kernel(tau_h, bin_frequency(k));
        ev[k] = error_kernel(tau_v, bin_frequency(k));
    }
    double sum = 0.0;
    for (int v = 0; v < kSpectrumSize; ++v)
        for (int h = 0; h < kSpectrumSize; ++h) sum += density.at(v, h) * eh[h] * ev[v];
    return detail::checked_sqrt(sum / (2.0 * std::numbers::pi));
}

// ---------------------------------------------------------------------------
// Polynomial fit and minimisation

/// Least-squares polynomial in the normalized variable s = (tau - center) / half_width.
struct PolynomialFit {
    std::vector<double> coefficients;  // ascending powers of s
    double center = 0.0;
    double half_width = 1.0;

    double operator()(double tau) const noexcept {
        const double s = (tau - center) / half_width;
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    double derivative(double tau) const noexcept {
        const double s = (tau - center) / half_width;
        double acc = 0.0;
        for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * coefficients[k];
        return acc / half_width;
    }
};

struct FitResult {
    PolynomialFit polynomial;
    double tau_star = 0.0;
    bool boundary_fallback = false;
};

inline PolynomialFit fit_polynomial(std::span<const double> taus, std::span<const double> values, int degree) {
    if (degree < 2) throw std::invalid_argument("polynomial fit: degree must be >= 2");
    if (taus.size() != values.size()) throw std::invalid_argument("polynomial fit: sample length mismatch");
    if (taus.size() < static_cast<std::size_t>(degree) + 1)
        throw std::invalid_argument("polynomial fit: need at least degree + 1 samples");
    const auto [lo, hi] = std::minmax_element(taus.begin(), taus.end());
    PolynomialFit fit;
    fit.center = 0.5 * (*lo + *hi);
    fit.half_width = 0.5 * (*hi - *lo);
    if (!(fit.half_width > 0.0)) throw std::invalid_argument("polynomial fit: rank deficient (all samples share one tau)");

    const auto m = static_cast<Eigen::Index>(taus.size());
    Eigen::MatrixXd a(m, degree + 1);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double s = (taus[i] - fit.center) / fit.half_width;
        double p = 1.0;
        for (int k = 0; k <= degree; ++k, p *= s) a(i, k) = p;
        b(i) = values[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < degree + 1) throw std::invalid_argument("polynomial fit: rank deficient design matrix");
    const Eigen::VectorXd x = qr.solve(b);
    fit.coefficients.assign(x.data(), x.data() + x.size());
    return fit;
}

/// Fits a polynomial and locates its minimum over the sampled span: dense scan
/// at 1e-4, then bisection on the derivative around the best scan point. A
/// minimum on the span boundary falls back to the best raw sample.
inline FitResult fit_and_minimize(std::span<const double> taus, std::span<const double> values, int degree) {
    FitResult r;
    r.polynomial = fit_polynomial(taus, values, degree);
    const double lo = r.polynomial.center - r.polynomial.half_width;
    const double hi = r.polynomial.center + r.polynomial.half_width;
    constexpr double step = 1e-4;

    std::vector<double> scan;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) scan.push_back(lo + i * step);
    if (scan.back() < hi - 1e-12) scan.push_back(hi);
    const int last = static_cast<int>(scan.size()) - 1;
    auto point = [&](int i) { return scan[i]; };
    int best = 0;
    double best_val = r.polynomial(scan[0]);
    for (int i = 1; i <= last; ++i) {
        const double v = r.polynomial(scan[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }

    if (best == 0 || best == last) {
        r.boundary_fallback = true;
        std::size_t arg = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i] < values[arg]) arg = i;
        r.tau_star = taus[arg];
        return r;
    }

    double a = point(best - 1);
    double b = point(best + 1);
    if (r.polynomial.derivative(a) < 0.0 && r.polynomial.derivative(b) > 0.0) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a + b);
            (r.polynomial.derivative(mid) < 0.0 ? a : b) = mid;
        }
        r.tau_star = 0.5 * (a + b);
    } else {
        r.tau_star = point(best);
    }
    return r;
}

/// True when the sequence decreases then increases (either part may be
/// empty). Flat steps are ignored.
inline bool is_unimodal(std::span<const double> values) {
    bool rising = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        if (d > 0.0) rising = true;
        else if (d < 0.0 && rising) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Training

struct TrainingParams {
    double tau_min = 0.0;
    double tau_max = 0.4;
    double tau_step = 0.005;
    int degree = 4;

    void validate() const {
        if (!(tau_min >= 0.0 && tau_max < 0.5 && tau_min < tau_max))
            throw std::invalid_argument("training: sweep range must satisfy 0 <= min < max < 0.5");
        if (!(tau_step > 0.0)) throw std::invalid_argument("training: sweep step must be positive");
        if (degree < 2) throw std::invalid_argument("training: polynomial degree must be >= 2");
    }

    std::vector<double> grid() const {
        validate();
        std::vector<double> g;
        const int n = static_cast<int>(std::floor((tau_max - tau_min) / tau_step + 1e-9));
        for (int i = 0; i <= n; ++i) g.push_back(tau_min + i * tau_step);
        return g;
    }
    friend bool operator==(const TrainingParams&, const TrainingParams&) = default;
};

struct ErrorCurve {
    ContentType content = ContentType::text;
    Direction direction = Direction::horizontal;
    std::vector<double> tau_grid;
    std::vector<double> eta;
    std::vector<double> fitted_eta;
    FitResult fit;
    bool degenerate = false;  // energy only at DC, or minimum on the sweep boundary

    double tau_star() const noexcept { return fit.tau_star; }
};

inline ErrorCurve sweep_error_curve(std::span<const double> density, const TrainingParams& params) {
    ErrorCurve c;
    c.tau_grid = params.grid();
    for (double t : c.tau_grid) c.eta.push_back(interpolation_error_1d(density, t));
    c.fit = fit_and_minimize(c.tau_grid, c.eta, params.degree);
    for (double t : c.tau_grid) c.fitted_eta.push_back(c.fit.polynomial(t));
    // Energy only at DC leaves eta at roundoff level for every tau; there is no
    // meaningful minimum, so report the lower sweep bound.
    double total = 0.0, ac = 0.0;
    for (std::size_t k = 0; k < density.size(); ++k) {
        total += density[k];
        if (bin_frequency(static_cast<int>(k), static_cast<int>(density.size())) != 0.0) ac += density[k];
    }
    if (!(ac > 1e-12 * total)) {
        c.fit.boundary_fallback = true;
        c.fit.tau_star = c.tau_grid.front();
    }
    c.degenerate = c.fit.boundary_fallback;
    return c;
}

struct TrainingResult {
    OffsetTable offsets;
    std::vector<ErrorCurve> curves;  // text h, text v, pictorial h, pictorial v

    bool degenerate() const noexcept {
        return std::any_of(curves.begin(), curves.end(), [](const ErrorCurve& c) { return c.degenerate; });
    }
};

inline TrainingResult train_offsets(std::span<const Plane> text_blocks, std::span<const Plane> pictorial_blocks,
                                    const TrainingParams& params = {}) {
    params.validate();
    if (text_blocks.empty()) throw std::invalid_argument("training: no text blocks");
    if (pictorial_blocks.empty()) throw std::invalid_argument("training: no pictorial blocks");
    TrainingResult result;
    for (ContentType type : {ContentType::text, ContentType::pictorial}) {
        const EnergyDensity d = block_energy_density(type == ContentType::text ? text_blocks : pictorial_blocks);
        for (Direction dir : {Direction::horizontal, Direction::vertical}) {
            ErrorCurve c = sweep_error_curve(d.directional(dir), params);
            c.content = type;
            c.direction = dir;
            result.offsets.set(type, dir, c.tau_star());
            result.curves.push_back(std::move(c));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Corpus manifests

struct CorpusEntry {
    std::string image;
    int x = 0;
    int y = 0;
    ContentType label = ContentType::text;
    friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct CorpusManifest {
    std::vector<CorpusEntry> entries;

    std::size_t count(ContentType t) const noexcept {
        return static_cast<std::size_t>(
            std::count_if(entries.begin(), entries.end(), [t](const CorpusEntry& e) { return e.label == t; }));
    }
};

/// Cuts the 16x16 luma block at (x, y) out of a luma plane.
inline Plane extract_block(const Plane& luma, int x, int y) {
    constexpr int n = kSpectrumSize;
    if (x < 0 || y < 0 || x + n > luma.width() || y + n > luma.height())
        throw std::out_of_range("corpus block lies outside its image");
    Plane b(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) b.at(i, j) = luma.at(x + i, y + j);
    return b;
}

/// Loads every referenced block (images are read once each) and trains.
inline TrainingResult train_offsets(const CorpusManifest& manifest, const TrainingParams& params = {}) {
    params.validate();
    if (manifest.count(ContentType::text) == 0) throw std::invalid_argument("training: manifest has no text blocks");
    if (manifest.count(ContentType::pictorial) == 0)
        throw std::invalid_argument("training: manifest has no pictorial blocks");
    std::vector<Plane> text, pictorial;
    std::string current;
    Plane luma;
    std::vector<const CorpusEntry*> order;
    for (const auto& e : manifest.entries) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->image < b->image; });
    for (const CorpusEntry* e : order) {
        if (e->image != current) {
            luma = to_luma(load_image(e->image));
            current = e->image;
        }
        (e->label == ContentType::text ? text : pictorial).push_back(extract_block(luma, e->x, e->y));
    }
    return train_offsets(text, pictorial, params);
}

}  // namespace screenscale
