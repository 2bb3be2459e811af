#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ssnmf/error.hpp"

namespace ssnmf {

// 64-bit finalizer (splitmix64). Used to derive independent stream seeds
// from (seed, index...) tuples so that parallel trials never share state.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t v) {
  return mix_seed(seed ^ (v + 0x9E3779B97F4A7C15ull + (seed << 6) + (seed >> 2)));
}

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t v, Rest... rest) {
  return mix_seed(mix_seed(seed, v), static_cast<std::uint64_t>(rest)...);
}

// Deterministic random stream. The engine (mt19937_64) and every
// distribution below are pinned here rather than taken from <random>'s
// unspecified distribution algorithms, so identical seeds give identical
// values on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1]
  double uniform_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; two engine draws per value, no cache
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Gamma(alpha, 1) by the Marsaglia-Tsang squeeze; shapes below one go
  // through the Gamma(alpha + 1) * U^(1/alpha) transform.
  double gamma(double alpha) {
    if (!(alpha > 0.0)) throw ParameterError("gamma shape must be positive");
    if (alpha < 1.0) {
      const double boost = std::pow(uniform_open(), 1.0 / alpha);
      return gamma(alpha + 1.0) * boost;
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ssnmf
