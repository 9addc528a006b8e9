#pragma once

#include <cstdint>

namespace pqw {

// Counter-based random stream keyed by (seed, stream index). The k-th draw
// of a stream is a pure function of (seed, stream, k), so sample i of a
// Monte Carlo run is the same no matter which worker produces it.
// Mixing uses the SplitMix64 finaliser.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

  // Derive a child stream; used to give each trial of a campaign its own
  // stream without consuming draws from the parent.
  CounterRng split(std::uint64_t child) const;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace pqw
