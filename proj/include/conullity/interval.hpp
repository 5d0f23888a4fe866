#pragma once

#include <cmath>
#include <limits>

namespace conullity {

// Open interval (lo, hi). Infinite endpoints mean the whole line / a half line.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Interval all() { return {}; }

  bool contains(double x) const { return x > lo && x < hi; }
  bool is_all() const { return std::isinf(lo) && lo < 0 && std::isinf(hi) && hi > 0; }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
  double length() const { return hi - lo; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

}  // namespace conullity
