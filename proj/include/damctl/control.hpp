#pragma once

// Choosing the normal-regime output rate.
//
// With lambda and B2 fixed, the balance point k = j2 rho2 / (1 - rho2)
// decides the optimal load rho1:
//   j1 == k  ->  rho1 = 1;
//   j1 >  k  ->  rho1 = 1 + C/L with C minimizing j_upper;
//   j1 <  k  ->  rho1 = 1 - C/L with C minimizing j_lower.
// `optimize_exact` solves the same problem at finite L by minimizing the
// exact cost J(L) over rho1 within a scale family.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "damctl/asymptotics.hpp"
#include "damctl/distributions.hpp"
#include "damctl/errors.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/model.hpp"
#include "damctl/numeric.hpp"

namespace damctl {

enum class ControlRegime { Critical, UpperPenalized, LowerPenalized };
enum class ControlMode { Asymptotic, Exact };

inline const char* to_string(ControlRegime r) {
  switch (r) {
    case ControlRegime::Critical: return "Critical";
    case ControlRegime::UpperPenalized: return "UpperPenalized";
    case ControlRegime::LowerPenalized: return "LowerPenalized";
  }
  return "?";
}

inline const char* to_string(ControlMode m) { return m == ControlMode::Asymptotic ? "asymptotic" : "exact"; }

struct ControlSolution {
  ControlRegime regime = ControlRegime::Critical;
  double c_star = 0.0;
  double delta_star = 0.0;  // signed: rho1_star = 1 + delta_star
  double rho1_star = 1.0;
  double b1_star = 0.0;     // recommended mean of B1, rho1_star / lambda
  double predicted_cost = 0.0;
  ControlMode mode = ControlMode::Asymptotic;

  friend bool operator==(const ControlSolution&, const ControlSolution&) = default;
};

inline constexpr double kBalanceTolerance = 1e-9;

inline ControlRegime classify_regime(const CostModel& costs, double rho2) {
  detail::require(rho2 > 0 && rho2 < 1, "rho2 must lie in (0, 1)");
  const double balance = costs.j2 * rho2 / (1.0 - rho2);
  const double scale = std::max(std::abs(costs.j1), std::abs(balance));
  if (std::abs(costs.j1 - balance) <= kBalanceTolerance * scale) return ControlRegime::Critical;
  return costs.j1 > balance ? ControlRegime::UpperPenalized : ControlRegime::LowerPenalized;
}

struct AsymptoticControlOptions {
  std::optional<double> c_max;  // default 10 * rho12
  std::size_t grid_points = 256;
  double tolerance = 1e-8;
};

/// Minimizer of the limiting cost functional of `regime` over C.
///
/// The upper functional is continuous on [0, c_max].  The lower one is
/// searched on (0, c_max]: its value at C = 0 is the separately defined
/// critical limit, not the limit of the expression, so C = 0 is not a point
/// of the lower window.
inline std::pair<double, double> minimize_limiting_cost(ControlRegime regime, const CostModel& costs, double rho2,
                                                        double rho12, const AsymptoticControlOptions& opts = {}) {
  const double c_max = opts.c_max.value_or(10.0 * rho12);
  detail::require(c_max > 0, "c_max must be positive");
  if (regime == ControlRegime::Critical) return {0.0, j_upper(0.0, rho12, rho2, costs)};
  if (regime == ControlRegime::UpperPenalized) {
    auto f = [&](double c) { return j_upper(c, rho12, rho2, costs); };
    return grid_then_golden(f, 0.0, c_max, opts.grid_points, opts.tolerance);
  }
  auto f = [&](double c) { return j_lower(c, rho12, rho2, costs); };
  const double lo = c_max * 1e-12;
  return grid_then_golden(f, lo, c_max, opts.grid_points, opts.tolerance);
}

inline ControlSolution optimize_asymptotic(const CostModel& costs, double rho2, double rho12, std::size_t level,
                                           double lambda, const AsymptoticControlOptions& opts = {}) {
  detail::require(level >= 1, "level must be at least 1");
  detail::require(lambda > 0, "lambda must be positive");
  detail::require(rho12 > 0, "rho12 must be positive");
  ControlSolution sol;
  sol.mode = ControlMode::Asymptotic;
  sol.regime = classify_regime(costs, rho2);
  const auto [c, j] = minimize_limiting_cost(sol.regime, costs, rho2, rho12, opts);
  sol.c_star = c;
  sol.predicted_cost = j;
  const double sign = sol.regime == ControlRegime::LowerPenalized ? -1.0 : 1.0;
  sol.delta_star = sign * c / static_cast<double>(level);
  sol.rho1_star = 1.0 + sol.delta_star;
  sol.b1_star = sol.rho1_star / lambda;
  return sol;
}

struct ExactControlOptions {
  double rho1_min = 0.5;
  double rho1_max = 1.5;
  std::size_t grid_points = 1024;
  double tolerance = 1e-8;
  RecurrenceOptions recurrence{};
};

/// Exact cost J(L) when B1 is `shape` rescaled to load rho1.
inline double exact_cost_at_load(double lambda, const ServiceDistribution& shape, const ServiceDistribution& b2,
                                 std::size_t level, const CostModel& costs, double rho1,
                                 RecurrenceOptions rec = {}) {
  const DamModel m(lambda, scale_to_mean(shape, rho1 / lambda), b2, level);
  return cost(m, costs, rec);
}

/// Minimizes the exact J(L) over rho1 in [rho1_min, rho1_max]; B1 ranges
/// over the scale family of `shape`.  The regime field reports the cost
/// classification; c_star is L |rho1* - 1|.
inline ControlSolution optimize_exact(double lambda, const ServiceDistribution& shape, const ServiceDistribution& b2,
                                      std::size_t level, const CostModel& costs,
                                      const ExactControlOptions& opts = {}) {
  detail::require(lambda > 0, "lambda must be positive");
  detail::require(level >= 1, "level must be at least 1");
  detail::require(opts.rho1_min > 0 && opts.rho1_max > opts.rho1_min, "rho1 range must be a nonempty positive interval");
  const double rho2 = lambda * mean(b2);
  detail::require(rho2 < 1, "rho2 must be below 1");
  auto f = [&](double rho1) { return exact_cost_at_load(lambda, shape, b2, level, costs, rho1, opts.recurrence); };
  const auto [rho1, j] = grid_then_golden(f, opts.rho1_min, opts.rho1_max, opts.grid_points, opts.tolerance);

  ControlSolution sol;
  sol.mode = ControlMode::Exact;
  sol.regime = classify_regime(costs, rho2);
  sol.rho1_star = rho1;
  sol.delta_star = rho1 - 1.0;
  sol.c_star = static_cast<double>(level) * std::abs(rho1 - 1.0);
  sol.b1_star = rho1 / lambda;
  sol.predicted_cost = j;
  return sol;
}

}  // namespace damctl
