#pragma once

#include <cstdint>
#include <random>

namespace paofed {

using Rng = std::mt19937_64;

/// Purposes for independent random streams derived from one run seed.
enum class StreamKind : std::uint32_t {
  kFeatures = 1,
  kClientData = 2,
  kTestData = 3,
  kAvailability = 4,
  kChannel = 5,
  kServer = 6,
};

/// Derives an independent generator for (seed, kind, tag). Equal inputs give
/// equal streams on every run.
inline Rng make_stream(std::uint64_t seed, StreamKind kind, std::uint64_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace paofed
