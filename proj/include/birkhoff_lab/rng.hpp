#pragma once

// Seeded random streams. Each (seed, stream) pair gives an independent
// generator, so results do not depend on how work is split across threads.

#include <cstdint>
#include <random>

#include "birkhoff_lab/fixed_point.hpp"

namespace birkhoff_lab {

inline constexpr std::uint64_t kSamplesPerChunk = 1024;

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform point of T on the 2^-127 grid.
inline CirclePoint uniform_point(std::mt19937_64& gen) {
    u128 hi = gen(), lo = gen();
    return CirclePoint::from_raw((hi << 64) | lo);
}

inline int rademacher(std::mt19937_64& gen) { return (gen() >> 63) ? 1 : -1; }

} // namespace birkhoff_lab
