#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace d2d {

// Deterministic random stream. Samplers are hand-rolled on top of
// std::mt19937_64 so that output is identical across standard libraries;
// per-drop streams are derived from (seed, drop_index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

  static Rng for_drop(std::uint64_t seed, std::uint64_t drop_index) {
    return Rng(seed + 0x9E3779B97F4A7C15ULL * (drop_index + 1));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  int uniform_int(int n) {  // 0..n-1
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // Box-Muller; consumes two uniforms per call.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

  double exponential(double mean = 1.0) {
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -mean * std::log(u);
  }

  // CN(0,1): real and imaginary parts N(0, 1/2); |h|^2 ~ Exp(1).
  std::complex<double> complex_normal() {
    const double s = std::sqrt(0.5);
    const double re = normal(0.0, s);
    const double im = normal(0.0, s);
    return {re, im};
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace d2d
