#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qpspec/frequency.hpp"
#include "qpspec/linalg.hpp"

namespace testing {

inline double golden_alpha() { return (std::sqrt(5.0) - 1.0) / 2.0; }

/// splitmix64; fixed sequence independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t s_;
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

inline double mat_dist(const qps::Mat2& x, const qps::Mat2& y) { return (x - y).max_abs(); }

/// Free Laplacian IDS.
inline double free_ids(double E) {
  double x = std::clamp(E / 2.0, -1.0, 1.0);
  return 1.0 - std::acos(x) / qps::kPi;
}

}  // namespace testing
