#pragma once

#include "rss/types.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace rss {

/// Random stream used by every sampler. Wraps a 64-bit Mersenne twister and
/// keeps the normal generator alongside the engine so that a stream is fully
/// reproducible from its seed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform draw on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  Vector normal_vector(Index d) {
    Vector out(d);
    for (Index i = 0; i < d; ++i) out[i] = normal();
    return out;
  }

  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Counter-based seed split: stream `stream` of master seed `master`.
/// Two rounds of splitmix64 finalization.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ mix(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace rss
