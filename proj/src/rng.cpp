// SPDX-License-Identifier: Apache-2.0
#include "opgen/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "opgen/eigenbasis.hpp"

namespace opgen {

std::uint64_t derive_stream_key(std::uint64_t master_seed, std::uint64_t sample_index,
                                StreamPurpose purpose) {
    std::uint64_t h = mix64(master_seed ^ 0x6a09e667f3bcc908ULL);
    h = mix64(h ^ mix64(sample_index + 0xbb67ae8584caa73bULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(purpose) * 0x3c6ef372fe94f82bULL));
    return h;
}

std::uint64_t CounterRng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    // Reject the incomplete top block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % bound;
}

double CounterRng::standard_normal() {
    if (cached_normal_) {
        const double z = *cached_normal_;
        cached_normal_.reset();
        return z;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    cached_normal_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

}  // namespace opgen
