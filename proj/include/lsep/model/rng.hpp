#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "lsep/types.hpp"

namespace lsep {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent seed for a named sub-stream of `master`. Distinct paths give
/// statistically independent streams; the mapping is stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// CN(0, variance): real and imaginary parts are independent N(0, variance / 2).
Complex complex_normal(Rng& rng, double variance);

/// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kChannel = 0x43484e4cULL;
inline constexpr std::uint64_t kSymbols = 0x53594d42ULL;
inline constexpr std::uint64_t kRestart = 0x52535452ULL;
inline constexpr std::uint64_t kTrial = 0x5452494cULL;
}  // namespace stream

}  // namespace lsep
