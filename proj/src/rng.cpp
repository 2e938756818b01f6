#include "d2dsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace d2dsim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), gen_(mix64(seed ^ mix64(stream_id))) {}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

std::uint64_t RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
  if (mean == 0.0) return 0;
  // Knuth: multiply uniforms until the product drops below exp(-mean).
  // For large means, split into chunks so exp() stays away from underflow.
  std::uint64_t count = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    double chunk = remaining > 500.0 ? 500.0 : remaining;
    remaining -= chunk;
    double limit = std::exp(-chunk);
    double prod = uniform01();
    while (prod > limit) {
      ++count;
      prod *= uniform01();
    }
  }
  return count;
}

std::uint64_t RngStream::binomial(std::uint64_t n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
  return k;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

}  // namespace d2dsim
