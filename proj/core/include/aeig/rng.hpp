#pragma once

#include <cstdint>
#include <random>

namespace aeig {

using Rng = std::mt19937_64;

// Stream ids inside one trial. Robot a draws from stream kRobotStreamBase + a.
inline constexpr std::uint64_t kGroundTruthStream = 0;
inline constexpr std::uint64_t kRobotStreamBase = 1;

std::uint64_t splitmix64(std::uint64_t x);

// Seed of substream `stream` under `seed`: two rounds of SplitMix64 over
// (seed, stream). Stable across platforms and part of the output contract.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Rng make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace aeig
