#pragma once

// Limits of p1(L), p2(L) as the level L grows, in the three fixed-load
// regimes and in the two heavy-traffic windows rho1 = 1 +- delta with
// L delta -> C, plus the limiting cost functionals built from them.

#include <cmath>
#include <optional>
#include <string>

#include "damctl/distributions.hpp"
#include "damctl/errors.hpp"
#include "damctl/model.hpp"

namespace damctl {

enum class RegimeTag { Subcritical, Critical, Supercritical, HeavyUpper, HeavyLower };

inline const char* to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::Subcritical: return "subcritical";
    case RegimeTag::Critical: return "critical";
    case RegimeTag::Supercritical: return "supercritical";
    case RegimeTag::HeavyUpper: return "heavy_upper";
    case RegimeTag::HeavyLower: return "heavy_lower";
  }
  return "?";
}

/// Load regime; heavy-traffic tags carry delta = |rho1 - 1| and C = L delta.
class AsymptoticRegime {
 public:
  static AsymptoticRegime fixed(double rho1) {
    detail::require(rho1 > 0 && std::isfinite(rho1), "rho1 must be positive");
    if (rho1 < 1.0) return AsymptoticRegime(RegimeTag::Subcritical);
    if (rho1 > 1.0) return AsymptoticRegime(RegimeTag::Supercritical);
    return AsymptoticRegime(RegimeTag::Critical);
  }
  static AsymptoticRegime heavy(RegimeTag tag, double delta, double c) {
    detail::require(tag == RegimeTag::HeavyUpper || tag == RegimeTag::HeavyLower,
                    "heavy-traffic regime needs tag heavy_upper or heavy_lower");
    detail::require(delta > 0, "delta must be positive");
    detail::require(c >= 0, "C must be nonnegative");
    AsymptoticRegime r(tag);
    r.delta_ = delta;
    r.c_ = c;
    return r;
  }
  /// Heavy-traffic window at level L with delta = C / L.
  static AsymptoticRegime heavy_at_level(RegimeTag tag, double c, std::size_t level) {
    detail::require(level >= 1, "level must be at least 1");
    return heavy(tag, c / static_cast<double>(level), c);
  }

  RegimeTag tag() const noexcept { return tag_; }
  std::optional<double> delta() const noexcept { return delta_; }
  std::optional<double> c() const noexcept { return c_; }
  double rho1() const {
    switch (tag_) {
      case RegimeTag::HeavyUpper: return 1.0 + *delta_;
      case RegimeTag::HeavyLower: return 1.0 - *delta_;
      default: throw regime_error("rho1 is only determined for heavy-traffic regimes");
    }
  }

 private:
  explicit AsymptoticRegime(RegimeTag t) : tag_(t) {}
  RegimeTag tag_;
  std::optional<double> delta_;
  std::optional<double> c_;
};

struct ProbLimits {
  double p1;
  double p2;
};

/// rho1 < 1: p1 -> 1 - rho1, p2 -> 0.
inline ProbLimits limit_subcritical(double rho1) {
  if (!(rho1 < 1.0)) throw regime_error("limit_subcritical requires rho1 < 1");
  detail::require(rho1 > 0, "rho1 must be positive");
  return {1.0 - rho1, 0.0};
}

/// rho1 = 1: limits of L p1(L) and L p2(L).
inline ProbLimits critical_decay(double rho12, double rho2) {
  detail::require(rho12 > 0, "rho12 must be positive");
  detail::require(rho2 >= 0 && rho2 < 1, "rho2 must lie in [0, 1)");
  const double half = rho12 / 2.0;
  return {half, rho2 / (1.0 - rho2) * half};
}

/// rho_{1,2} of B1 rescaled to rho1 = 1 (mean 1/lambda); the limit of
/// rho_{1,2} along a scale family as delta -> 0.
inline double rho12_tilde(const ServiceDistribution& b1, double lambda) {
  detail::require(lambda > 0, "lambda must be positive");
  return normalized_moment(scale_to_mean(b1, 1.0 / lambda), lambda, 2);
}

namespace detail {

inline constexpr double kRootScanEdge = 1e-9;
inline constexpr int kRootScanSteps = 64;

}  // namespace detail

/// Least root in (0, 1) of z = lst(b1, lambda - lambda z); exists iff rho1 > 1.
///
/// g(z) = lst(lambda - lambda z) - z is convex with g(0) > 0, g(1) = 0 and
/// g'(1) = rho1 - 1 > 0, so it is negative just left of 1 and has exactly one
/// root below 1.  A geometric scan toward 1 brackets it, then Newton steps
/// guarded by bisection refine.
inline double root_phi(double lambda, const ServiceDistribution& b1) {
  detail::require(lambda > 0, "lambda must be positive");
  const double rho1 = lambda * mean(b1);
  if (!(rho1 > 1.0)) throw regime_error("root_phi requires rho1 > 1 (no root in (0,1) otherwise)");

  auto g = [&](double z) { return lst(b1, lambda - lambda * z) - z; };
  auto dg = [&](double z) { return -lambda * lst_derivative(b1, lambda - lambda * z) - 1.0; };

  double lo = 0.0, hi = -1.0;
  double prev = 0.0;
  for (int k = 1; k <= detail::kRootScanSteps; ++k) {
    const double z = 1.0 - std::pow(detail::kRootScanEdge, double(k) / detail::kRootScanSteps);
    if (g(z) < 0) {
      lo = prev;
      hi = z;
      break;
    }
    prev = z;
  }
  if (hi < 0) throw numeric_error("root_phi: no sign change found; rho1 too close to 1");

  double z = lo;
  for (int it = 0; it < 200; ++it) {
    const double gz = g(z);
    if (gz == 0.0) return z;
    if (gz > 0)
      lo = z;
    else
      hi = z;
    const double d = dg(z);
    double next = z - gz / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-16 * std::max(1.0, std::abs(z)) || hi - lo <= 1e-16) return next;
    z = next;
  }
  return z;
}

struct SupercriticalLimits {
  double p1_prefactor;  // p1(L) ~ p1_prefactor * phi^L
  double p2_limit;
  double phi;
};

/// rho1 > 1: geometric decay of p1 and the positive limit of p2.
inline SupercriticalLimits supercritical(double lambda, const ServiceDistribution& b1, double rho2) {
  detail::require(rho2 >= 0 && rho2 < 1, "rho2 must lie in [0, 1)");
  const double phi = root_phi(lambda, b1);
  const double rho1 = lambda * mean(b1);
  const double slope = 1.0 + lambda * lst_derivative(b1, lambda - lambda * phi);
  return {(1.0 - rho2) * slope / (rho1 - rho2), rho2 * (rho1 - 1.0) / (rho1 - rho2), phi};
}

inline SupercriticalLimits supercritical(const DamModel& model) {
  return supercritical(model.lambda(), model.b1(), model.rho2());
}

namespace detail {

inline void check_heavy_inputs(double delta, double c, double rho12, double rho2) {
  require(delta > 0, "delta must be positive");
  if (!(c > 0)) throw regime_error("C must be positive; use critical_decay for C = 0");
  require(rho12 > 0, "rho12 must be positive");
  require(rho2 >= 0 && rho2 < 1, "rho2 must lie in [0, 1)");
}

// e^x / (e^x - 1) without overflow for large x.
inline double exp_over_expm1(double x) { return -1.0 / std::expm1(-x); }

}  // namespace detail

/// rho1 = 1 + delta, L delta -> C > 0.
inline ProbLimits heavy_upper(double delta, double c, double rho12, double rho2) {
  detail::check_heavy_inputs(delta, c, rho12, rho2);
  const double x = 2.0 * c / rho12;
  return {delta / std::expm1(x), delta * rho2 / (1.0 - rho2) * detail::exp_over_expm1(x)};
}

struct HeavyLowerLimits {
  double p1;
  double p2;
  double e_nu1;  // busy-period count approximation the probabilities derive from
};

/// rho1 = 1 - delta, L delta -> C > 0, evaluated literally with exponent
/// rho12 / (2 C).
///
/// Caution: this expression diverges as C -> 0, while the C = 0 limit of the
/// lower window is the critical one (L p1 -> rho12 / 2).  It also disagrees
/// with exact finite-L values at moderate C (for M/M/1 at C = 1 the exact p1
/// is about 0.58 of this value).  Compare against exact_analytics before
/// relying on it; `damctl verify --regime lower` tabulates the gap.
inline HeavyLowerLimits heavy_lower(double delta, double c, double rho12, double rho2) {
  detail::check_heavy_inputs(delta, c, rho12, rho2);
  const double e = std::exp(rho12 / (2.0 * c));
  return {delta * e, delta * rho2 / (1.0 - rho2) * (e - 1.0), 1.0 / (delta * e)};
}

/// Limiting cost in the upper window, C [ j1/(e^x - 1) + j2 rho2 e^x / ((1-rho2)(e^x - 1)) ],
/// x = 2 C / rho12; continuous at C = 0.
inline double j_upper(double c, double rho12, double rho2, const CostModel& costs) {
  detail::require(c >= 0, "C must be nonnegative");
  detail::require(rho12 > 0, "rho12 must be positive");
  detail::require(rho2 >= 0 && rho2 < 1, "rho2 must lie in [0, 1)");
  const double k = costs.j2 * rho2 / (1.0 - rho2);
  if (c == 0.0) return rho12 / 2.0 * (costs.j1 + k);
  const double x = 2.0 * c / rho12;
  // C / (e^x - 1) = (rho12 / 2) * x / (e^x - 1)
  const double lower_part = costs.j1 == 0.0 ? 0.0 : costs.j1 * c / std::expm1(x);
  return lower_part + k * c * detail::exp_over_expm1(x);
}

/// Limiting cost in the lower window, C [ j1 e^y + j2 rho2/(1-rho2) (e^y - 1) ],
/// y = rho12 / (2 C).  At C = 0 returns the critical-regime limit
/// rho12/2 (j1 + j2 rho2/(1-rho2)); the literal expression tends to
/// infinity there, so j_lower is discontinuous at 0.
inline double j_lower(double c, double rho12, double rho2, const CostModel& costs) {
  detail::require(c >= 0, "C must be nonnegative");
  detail::require(rho12 > 0, "rho12 must be positive");
  detail::require(rho2 >= 0 && rho2 < 1, "rho2 must lie in [0, 1)");
  const double k = costs.j2 * rho2 / (1.0 - rho2);
  if (c == 0.0) return rho12 / 2.0 * (costs.j1 + k);
  const double y = rho12 / (2.0 * c);
  double v = 0.0;
  if (costs.j1 != 0.0) v += costs.j1 * std::exp(y);
  if (k != 0.0) v += k * std::expm1(y);
  return c * v;
}

}  // namespace damctl
