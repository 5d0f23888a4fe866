#pragma once

// Shared helpers for the unit suites: a deterministic RNG and tolerance
// helpers. Every suite seeds its own stream so test order never matters.

#include <random>

namespace testsupport {

class Rng {
 public:
  explicit Rng(unsigned long long seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  int uniform_int(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline bool close(double a, double b, double atol, double rtol = 0.0) {
  double diff = a > b ? a - b : b - a;
  double mag = (a < 0 ? -a : a) > (b < 0 ? -b : b) ? (a < 0 ? -a : a) : (b < 0 ? -b : b);
  return diff <= atol + rtol * mag;
}

}  // namespace testsupport
