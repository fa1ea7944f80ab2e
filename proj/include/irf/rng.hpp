#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace irf {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 plus hand-rolled transforms. The standard library distribution
// objects are implementation-defined, which would break byte-identical
// replay of traces across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform on (0, 1]; never returns 0 so log(u) is always finite.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * kPi * u2);
  }

  double exponential() { return -std::log(uniform01()); }

  // Geometric on {1, 2, ...} with P(k) = (1-rho)^(k-1) rho.
  int geometric(double rho) {
    if (rho >= 1.0) return 1;
    const double u = uniform01();
    const double k = std::floor(std::log(u) / std::log1p(-rho));
    return 1 + static_cast<int>(std::max(0.0, k));
  }

  std::uint64_t raw() { return engine_(); }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace irf
