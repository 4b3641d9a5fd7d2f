#pragma once

#include <cstdint>
#include <random>

namespace ppsynth {

// Deterministic random stream with cheap substream derivation.
//
// All randomness in the library flows through this wrapper so that a run is a
// pure function of its seed.  split(k) derives an independent stream for
// worker k (chains, sweep cells, replicates) without sharing state, so the
// results do not depend on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : lineage_(seed), engine_(mix(seed)) {}

  // Derived stream `k` of this stream's lineage; stable across runs.
  Rng split(std::uint64_t k) const { return Rng(mix(lineage_ ^ mix(k + 0x9e3779b97f4a7c15ULL))); }

  std::mt19937_64& engine() { return engine_; }

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine_); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  double exponential(double rate = 1.0) { return std::exponential_distribution<double>(rate)(engine_); }

  long long poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<long long>(mean)(engine_);
  }

  // Centered Laplace draw with the given scale parameter.
  double laplace(double scale) {
    const double u = uniform(-0.5, 0.5);
    const double mag = -scale * std::log(1.0 - 2.0 * std::abs(u));
    return u < 0.0 ? -mag : mag;
  }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t lineage_;
  std::mt19937_64 engine_;
};

}  // namespace ppsynth
