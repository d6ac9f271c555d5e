#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "damctl/errors.hpp"

namespace damctl {

/// Neumaier's variant of Kahan summation.
template <class T = double>
class CompensatedSum {
 public:
  void add(const T& x) {
    using std::abs;
    const T t = sum_ + x;
    if (abs(sum_) >= abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

/// m * 2^e.  Holds magnitudes that overflow a double.  Values within
/// double range keep e == 0, so the common case is a plain double.
struct ScaledReal {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  static constexpr double kRescaleAbove = 1e300;

  static ScaledReal normalized(double m, std::int64_t e) {
    if (std::abs(m) <= kRescaleAbove && e == 0) return {m, 0};
    if (m == 0.0) return {0.0, 0};
    int k = 0;
    const double f = std::frexp(m, &k);
    return {f, e + k};
  }

  /// Value as a double; +-inf or 0 when out of range.
  double to_double() const {
    if (exponent == 0) return mantissa;
    if (exponent > std::numeric_limits<int>::max()) return mantissa > 0 ? HUGE_VAL : -HUGE_VAL;
    if (exponent < std::numeric_limits<int>::min()) return 0.0;
    return std::ldexp(mantissa, static_cast<int>(exponent));
  }

  /// Natural logarithm of the (positive) value.
  double log() const { return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0); }

  bool is_scaled() const { return exponent != 0; }
};

/// 2^k as a double, saturating to 0 / inf.
inline double pow2(std::int64_t k) {
  if (k > 4096) return HUGE_VAL;
  if (k < -4096) return 0.0;
  return std::ldexp(1.0, static_cast<int>(k));
}

/// Minimizer of f on [lo, hi] by golden-section search, stopping when the
/// bracket is narrower than `tol`.  Assumes f unimodal on the bracket.
template <class F>
std::pair<double, double> golden_section_minimize(F&& f, double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    // Bracket can no longer shrink in floating point.
    if (x1 >= x2) break;
  }
  const double fa = f(a), fb = f(b);
  double best = (f1 <= f2) ? x1 : x2;
  double fbest = std::min(f1, f2);
  if (fa < fbest) best = a, fbest = fa;
  if (fb < fbest) best = b, fbest = fb;
  return {best, fbest};
}

struct GridMinimum {
  std::size_t index;
  double x;
  double value;
};

/// Uniform grid lo, lo+h, ..., hi with `points` nodes; returns the first
/// node with the smallest finite value.
template <class F>
GridMinimum grid_minimize(F&& f, double lo, double hi, std::size_t points) {
  detail::require(points >= 2, "grid needs at least two points");
  GridMinimum best{0, lo, HUGE_VAL};
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? hi : lo + h * static_cast<double>(i);
    const double v = f(x);
    if (std::isfinite(v) && v < best.value) best = {i, x, v};
  }
  if (!std::isfinite(best.value)) throw numeric_error("objective is not finite anywhere on the grid");
  return best;
}

/// Coarse grid followed by golden-section refinement inside the cell pair
/// around the best node.
template <class F>
std::pair<double, double> grid_then_golden(F&& f, double lo, double hi, std::size_t points, double tol) {
  const auto g = grid_minimize(f, lo, hi, points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  const double a = std::max(lo, g.x - h);
  const double b = std::min(hi, g.x + h);
  auto refined = golden_section_minimize(f, a, b, tol);
  if (!(refined.second <= g.value)) return {g.x, g.value};
  return refined;
}

}  // namespace damctl
