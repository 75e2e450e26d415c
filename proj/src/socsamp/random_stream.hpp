#pragma once

#include <cstdint>
#include <limits>

namespace socsamp {

// Identifies one independent random stream inside an experiment.
struct StreamId {
  std::uint64_t trial = 0;
  std::uint64_t agent = 0;
  std::uint64_t step = 0;
};

// Reserved agent slots for streams that do not belong to an agent.
inline constexpr std::uint64_t kNetworkStream = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kInitialStream = std::numeric_limits<std::uint64_t>::max() - 1;

std::uint64_t mix64(std::uint64_t x);

// Stable per-trial seed derived from the experiment's master seed.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial);

/// Counter-based splitmix64 stream. Identical (seed, id) always yields the
/// identical sequence; the key is hashed so neighbouring ids are unrelated.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamId id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, bound), bound > 0; unbiased.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal (Box-Muller, one variate per call).
  double normal();

 private:
  std::uint64_t state_;
};

}  // namespace socsamp
