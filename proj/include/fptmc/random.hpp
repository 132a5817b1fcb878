#pragma once

#include <cstdint>
#include <random>

namespace fptmc {

using Rng = std::mt19937_64;

/// Independent stream for a (seed, stream index) pair.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    0x46505443u};
  return Rng(seq);
}

/// Uniform draw on the open interval (0, 1), from the top 53 bits.
inline double uniform_open(Rng& rng)
{
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(rng() >> 11) + 0.5) * scale;
}

}  // namespace fptmc
