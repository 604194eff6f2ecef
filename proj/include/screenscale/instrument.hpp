/**
 * @file instrument.hpp
 * @brief Pixel-path operation counting and a small deterministic parallel_for.
 *
 * Numeric kernels are templated on an arithmetic policy. PlainArith compiles
 * to bare floating-point operations; CountingArith performs the identical
 * operations and tallies them. Only data-path arithmetic goes through the
 * policy, never index math.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace screenscale {

enum class Phase { classification = 0, prefilter = 1, interpolation = 2 };
inline constexpr int kPhaseCount = 3;

struct PhaseCounts {
    std::uint64_t additions = 0;
    std::uint64_t multiplications = 0;
};

struct OpCounts {
    PhaseCounts classification;
    PhaseCounts prefilter;
    PhaseCounts interpolation;

    std::uint64_t additions() const noexcept {
        return classification.additions + prefilter.additions + interpolation.additions;
    }
    std::uint64_t multiplications() const noexcept {
        return classification.multiplications + prefilter.multiplications + interpolation.multiplications;
    }
};

/// Exact, thread-safe accumulator. Workers count locally and publish once.
class OpTally {
public:
    void publish(Phase phase, std::uint64_t adds, std::uint64_t muls) noexcept {
        const auto i = static_cast<int>(phase);
        adds_[i].fetch_add(adds, std::memory_order_relaxed);
        muls_[i].fetch_add(muls, std::memory_order_relaxed);
    }

    OpCounts snapshot() const noexcept {
        auto get = [this](Phase p) {
            const auto i = static_cast<int>(p);
            return PhaseCounts{adds_[i].load(), muls_[i].load()};
        };
        return {get(Phase::classification), get(Phase::prefilter), get(Phase::interpolation)};
    }

    void reset() noexcept {
        for (int i = 0; i < kPhaseCount; ++i) {
            adds_[i] = 0;
            muls_[i] = 0;
        }
    }

private:
    std::atomic<std::uint64_t> adds_[kPhaseCount] = {};
    std::atomic<std::uint64_t> muls_[kPhaseCount] = {};
};

class InstrumentationDisabled : public std::logic_error {
public:
    InstrumentationDisabled() : std::logic_error("operation counting requested but no tally was attached") {}
};

/// Reads back the counts gathered by an instrumented run.
inline OpCounts count_ops(const OpTally* tally) {
    if (tally == nullptr) throw InstrumentationDisabled();
    return tally->snapshot();
}

struct PlainArith {
    static constexpr bool counting = false;
    double add(double a, double b) noexcept { return a + b; }
    double sub(double a, double b) noexcept { return a - b; }
    double mul(double a, double b) noexcept { return a * b; }
    void tick_add(std::uint64_t = 1) noexcept {}
    void tick_mul(std::uint64_t = 1) noexcept {}
    void flush(OpTally*, Phase) noexcept {}
};

struct CountingArith {
    static constexpr bool counting = true;
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;

    double add(double a, double b) noexcept { ++adds; return a + b; }
    double sub(double a, double b) noexcept { ++adds; return a - b; }
    double mul(double a, double b) noexcept { ++muls; return a * b; }
    void tick_add(std::uint64_t n = 1) noexcept { adds += n; }
    void tick_mul(std::uint64_t n = 1) noexcept { muls += n; }
    void flush(OpTally* tally, Phase phase) noexcept {
        if (tally != nullptr) tally->publish(phase, adds, muls);
        adds = muls = 0;
    }
};

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// processed by exactly one call, so results never depend on the thread count.
template <typename Body>
void parallel_for(int n, int threads, Body&& body) {
    if (n <= 0) return;
    threads = std::clamp(threads, 1, n);
    if (threads == 1) {
        body(0, n);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

}  // namespace screenscale
