/**
 * @file pipeline.hpp
 * @brief Method-by-name dispatch over every scaler in the library.
 */
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include "baselines.hpp"
#include "classifier.hpp"
#include "sli.hpp"

namespace screenscale {

enum class Method { bilinear, bicubic, sli_fixed, adaptive };

inline constexpr std::array<Method, 4> kAllMethods{Method::bilinear, Method::bicubic, Method::sli_fixed,
                                                   Method::adaptive};

inline std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::bilinear: return "bilinear";
        case Method::bicubic: return "bicubic";
        case Method::sli_fixed: return "sli-fixed";
        case Method::adaptive: return "adaptive";
    }
    return "?";
}

inline Method method_from_string(std::string_view s) {
    for (Method m : kAllMethods)
        if (to_string(m) == s) return m;
    throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

struct MethodSettings {
    ClassifierParams classifier{};
    OffsetTable offsets{};
    double fixed_tau = kFixedSliTau;
    int threads = 1;
};

/// Scales with the named method. The adaptive method classifies internally.
inline Raster scale_with(Method m, const Raster& in, double factor, const MethodSettings& s = {},
                         OpTally* tally = nullptr) {
    switch (m) {
        case Method::bilinear: return scale_bilinear(in, factor, s.threads, tally);
        case Method::bicubic: return scale_bicubic(in, factor, s.threads, tally);
        case Method::sli_fixed: return scale_fixed_sli(in, factor, s.fixed_tau, s.threads, tally);
        case Method::adaptive: {
            ScaleJob job;
            job.factor = factor;
            job.offsets = s.offsets;
            job.threads = s.threads;
            job.tally = tally;
            return scale_content_adaptive(in, job, s.classifier);
        }
    }
    throw std::invalid_argument("unknown method");
}

}  // namespace screenscale
