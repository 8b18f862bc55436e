#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace rssgp {

/// Random source used throughout the library. Every seeded operation takes
/// one of these by reference; callers own seed isolation.
using Rng = std::mt19937_64;

/// Derives an independent seed for stream `stream` of a base seed. Used to
/// split work (samples, particles, trials) so results do not depend on the
/// number of worker threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline Rng make_rng(std::uint64_t base, std::uint64_t stream) {
  return Rng(derive_seed(base, stream));
}

}  // namespace rssgp
