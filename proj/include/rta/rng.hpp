#pragma once

#include <cmath>
#include <cstdint>

namespace rta {

// Counter-based generator. Every draw is a pure function of (seed, stream,
// counter), so any trial or subsystem can be replayed in isolation by
// deriving the same stream. No global state, identical output on every
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  // Child generator with an independent stream; drawing from the parent
  // afterwards does not disturb the child.
  Rng derive(std::uint64_t substream) const {
    return Rng(seed_, mix(stream_ ^ mix(substream + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t next_u64() {
    std::uint64_t x = seed_ ^ mix(stream_ + mix(counter_++));
    return mix(x);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    return n == 0 ? 0 : next_u64() % n;
  }

  // Box-Muller; consumes two uniforms per pair, caches the cosine twin.
  double normal(double mean = 0.0, double stddev = 1.0) {
    if (has_cached_) {
      has_cached_ = false;
      return mean + stddev * cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    cached_ = r * std::cos(a);
    has_cached_ = true;
    return mean + stddev * r * std::sin(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace rta
