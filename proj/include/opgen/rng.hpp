// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

namespace opgen {

/// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent substreams drawn for one sample.
enum class StreamPurpose : std::uint64_t {
    FieldCoefficients = 1,
    CoefficientMatrix = 2,
};

/// Stream key for (master seed, sample index, purpose). A pure function of
/// its arguments, so any worker can reconstruct any sample's stream.
std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t sample_index,
                                StreamPurpose purpose);

/// Counter-based generator: the k-th output is mix64(key + (k + 1) * gamma).
/// Random access via seek(); no hidden state besides the counter.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(key_ + counter_ * kGamma);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1], safe as a log argument.
    double uniform_open_closed() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer on {0, ..., bound - 1}; bound must be positive.
    std::uint64_t uniform_below(std::uint64_t bound);

    /// Standard normal via the Box-Muller transform. Values come in pairs;
    /// the sine branch is cached for the next call.
    double standard_normal();

    std::uint64_t counter() const { return counter_; }
    void seek(std::uint64_t counter) {
        counter_ = counter;
        cached_normal_.reset();
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::optional<double> cached_normal_;
};

}  // namespace opgen
