#pragma once

#include <cstdint>
#include <random>

namespace d2dsim {

// Seeded random stream. One stream per stochastic purpose (arrivals, losses)
// per replication, so replications and purposes never share draws.
//
// All sampling is implemented on top of raw mt19937_64 output with fixed
// algorithms, so a given (seed, stream_id, draw index) produces the same
// value on every platform. Never use std::*_distribution here: the standard
// leaves their algorithms unspecified and libstdc++/libc++/MSVC disagree.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  bool bernoulli(double p);

  // Knuth multiplication method; O(mean) per draw, fine for per-slot rates.
  std::uint64_t poisson(double mean);

  // Sum of n independent bernoulli(p) draws.
  std::uint64_t binomial(std::uint64_t n, double p);

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
};

// splitmix64 step; used to decorrelate (seed, stream_id) pairs before they
// reach the generator, and as a cheap standalone mixer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace d2dsim
