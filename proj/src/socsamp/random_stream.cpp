#include "socsamp/random_stream.hpp"

#include <cmath>
#include <numbers>

namespace socsamp {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return mix64(mix64(master_seed + kGolden) ^ (trial * 0xd1b54a32d192ed03ULL + 1));
}

RandomStream::RandomStream(std::uint64_t seed, StreamId id) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ (id.trial + kGolden));
  h = mix64(h ^ (id.agent + 2 * kGolden));
  h = mix64(h ^ (id.step + 3 * kGolden));
  state_ = h;
}

std::uint64_t RandomStream::next() {
  state_ += kGolden;
  return mix64(state_);
}

double RandomStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t RandomStream::below(std::uint64_t bound) {
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

double RandomStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace socsamp
