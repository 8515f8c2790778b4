#pragma once

#include <cstdint>
#include <random>

namespace clo {

/// Named sub-streams derived from one master seed. Each consumer owns its
/// own generator so that, e.g., switching the predictor mode never shifts
/// the arrival sequence.
enum class Stream : std::uint64_t {
  arrivals = 1,
  channels = 2,
  tasks = 3,
  predictor = 4,
  calibration = 5,
};

using Rng = std::mt19937_64;

std::uint64_t mix64(std::uint64_t x) noexcept;

Rng make_stream(std::uint64_t master_seed, Stream stream);

/// Standard normal variate that is a pure function of its keys.
double keyed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace clo
