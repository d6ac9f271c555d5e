#pragma once

// Exact finite-level analysis.
//
// Q_n, the expected number of services in a busy period of the M/GI/1/n
// queue with service law B1, solves
//
//   Q_n = sum_{j=0}^{n} r_j Q_{n-j+1},   Q_0 = 1,
//
// with r_j the mixed-Poisson weights of B1.  Q_L is the expected number of
// below-level services E nu1 per busy period of the dam.  Wald's identity and
// the renewal-reward theorem then give everything else in closed form:
//
//   E nu2 = 1/(1-rho2) - (1-rho1)/(1-rho2) E nu1
//   p1    = (1-rho2) / (1 + (rho1-rho2) E nu1)
//   p2    = (rho2 + rho2 (rho1-1) E nu1) / (1 + (rho1-rho2) E nu1).
//
// E nu2 and p2 are both proportional to the overflow D = 1 - (1-rho1) E nu1,
// the expected number of arrivals a busy period of M/GI/1/L would turn away.
// Below critical load D is tiny and the difference cancels in double
// precision, so D is carried alongside the counts at the working precision.

#include <boost/multiprecision/mpfr.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "damctl/distributions.hpp"
#include "damctl/errors.hpp"
#include "damctl/model.hpp"
#include "damctl/numeric.hpp"

namespace damctl {

struct RecurrenceOptions {
  // Decimal digits of the MPFR evaluation; 0 selects double precision.
  unsigned extended_digits = 0;
};

/// Q_0 .. Q_L.  Entries beyond double range are kept in scaled form.
class BusyPeriodCounts {
 public:
  BusyPeriodCounts() = default;
  BusyPeriodCounts(std::vector<ScaledReal> q, ScaledReal overflow) : q_(std::move(q)), overflow_(overflow) {}

  std::size_t size() const noexcept { return q_.size(); }
  const ScaledReal& scaled(std::size_t n) const { return q_.at(n); }
  double operator[](std::size_t n) const { return q_.at(n).to_double(); }
  const ScaledReal& back() const { return q_.back(); }
  /// 1 - (1 - rho1) Q_L, evaluated at the precision of the recurrence.
  const ScaledReal& overflow() const noexcept { return overflow_; }

  std::vector<double> to_doubles() const {
    std::vector<double> v;
    v.reserve(q_.size());
    for (const auto& x : q_) v.push_back(x.to_double());
    return v;
  }

 private:
  std::vector<ScaledReal> q_;
  ScaledReal overflow_{};
};

struct BusyPeriodMetrics {
  double e_nu1;   // services started at or below the level
  double e_nu2;   // services started above the level
  double e_t1;    // time spent in below-level services
  double e_t2;    // time spent in above-level services
  double e_t;     // busy period length
  double e_idle;  // idle period length, 1/lambda

  double e_nu() const { return e_nu1 + e_nu2; }
};

struct StationaryProbs {
  double p1;  // empty dam
  double p2;  // above the level
};

struct StationaryMetrics {
  double p1;
  double p2;
  double cost;
};

namespace detail {

inline constexpr double kMinPivot = 1e-300;

inline void check_pivot(double r0) {
  if (!(r0 >= kMinPivot))
    throw numeric_error("r_0 = P{no arrival during a service} is below 1e-300; "
                        "the service law puts too little mass near zero for this lambda");
}

// Double-precision recurrence with per-entry binary exponents.  Terms are
// brought to the exponent of Q_n before accumulation; the scale factors are
// exact powers of two.
inline std::vector<ScaledReal> counts_recurrence(const std::vector<double>& r, std::size_t level) {
  check_pivot(r[0]);
  const double r0 = r[0];
  std::vector<double> m(level + 1, 0.0);
  std::vector<std::int64_t> e(level + 1, 0);
  m[0] = 1.0;
  bool scaled = false;
  for (std::size_t n = 0; n < level; ++n) {
    const std::int64_t top = e[n];
    CompensatedSum<double> acc;
    if (!scaled) {
      for (std::size_t j = 1; j <= n; ++j) acc.add(r[j] * m[n - j + 1]);
    } else {
      for (std::size_t j = 1; j <= n; ++j) {
        const std::int64_t shift = e[n - j + 1] - top;
        if (shift < -1100) continue;
        acc.add(r[j] * m[n - j + 1] * pow2(shift));
      }
    }
    const double next = (m[n] - acc.value()) / r0;
    if (!(next > 0) || !std::isfinite(next))
      throw numeric_error("busy-period recurrence lost positivity at n = " + std::to_string(n + 1));
    const auto s = ScaledReal::normalized(next, top);
    m[n + 1] = s.mantissa;
    e[n + 1] = s.exponent;
    scaled = scaled || s.is_scaled();
  }
  std::vector<ScaledReal> out(level + 1);
  for (std::size_t n = 0; n <= level; ++n) out[n] = {m[n], e[n]};
  return out;
}

// 1 - (1 - rho1) q in double arithmetic, sharing the exponent of q.
inline ScaledReal overflow_from_count(double rho1, const ScaledReal& q) {
  return ScaledReal::normalized(pow2(-q.exponent) - (1.0 - rho1) * q.mantissa, q.exponent);
}

template <class Real>
ScaledReal to_scaled(const Real& x) {
  if (x == 0) return {0.0, 0};
  long ex = 0;
  const Real f = boost::multiprecision::frexp(x, &ex);
  const auto s = ScaledReal::normalized(static_cast<double>(f), ex);
  if (std::abs(s.to_double()) <= ScaledReal::kRescaleAbove) return {s.to_double(), 0};
  return s;
}

inline BusyPeriodCounts counts_recurrence_mpfr(const ServiceDistribution& b1, double lambda, std::size_t level,
                                               unsigned digits) {
  using boost::multiprecision::mpfr_float;
  // Thread-local default precision; restored on exit.
  const unsigned saved = mpfr_float::default_precision();
  mpfr_float::default_precision(digits);
  struct Restore {
    unsigned p;
    ~Restore() { mpfr_float::default_precision(p); }
  } restore{saved};

  const auto r = mixed_poisson_weights<mpfr_float>(b1, lambda, level);
  if (!(r[0] > 0)) throw numeric_error("r_0 vanished even in extended precision");
  std::vector<mpfr_float> q(level + 1);
  q[0] = 1;
  for (std::size_t n = 0; n < level; ++n) {
    mpfr_float acc = 0;
    for (std::size_t j = 1; j <= n; ++j) acc += r[j] * q[n - j + 1];
    q[n + 1] = (q[n] - acc) / r[0];
    if (!(q[n + 1] > 0))
      throw numeric_error("busy-period recurrence lost positivity at n = " + std::to_string(n + 1));
  }
  std::vector<ScaledReal> out(level + 1);
  for (std::size_t n = 0; n <= level; ++n) out[n] = to_scaled(q[n]);
  const mpfr_float rho1 = mpfr_float(lambda) * mean_in<mpfr_float>(b1);
  return BusyPeriodCounts(std::move(out), to_scaled(mpfr_float(1) - (1 - rho1) * q[level]));
}

}  // namespace detail

/// Q_0 .. Q_level for service law `b1` at arrival rate `lambda`.
inline BusyPeriodCounts busy_period_counts(const ServiceDistribution& b1, double lambda, std::size_t level,
                                           RecurrenceOptions opts = {}) {
  if (opts.extended_digits > 0) return detail::counts_recurrence_mpfr(b1, lambda, level, opts.extended_digits);
  auto q = detail::counts_recurrence(mixed_poisson_weights(b1, lambda, level), level);
  const auto overflow = detail::overflow_from_count(lambda * mean(b1), q.back());
  return BusyPeriodCounts(std::move(q), overflow);
}

inline BusyPeriodCounts busy_period_counts(const DamModel& model, RecurrenceOptions opts = {}) {
  return busy_period_counts(model.b1(), model.lambda(), model.level(), opts);
}

/// First n+1 power-series coefficients of r(z) / (r(z) - z), r(z) the
/// weight generating function of B1.  Formal division, independent of the
/// busy-period recurrence; the two must agree coefficient by coefficient.
inline std::vector<double> gf_coefficients(const ServiceDistribution& b1, double lambda, std::size_t n) {
  const auto r = mixed_poisson_weights(b1, lambda, n);
  detail::check_pivot(r[0]);
  auto den = r;
  if (den.size() > 1) den[1] -= 1.0;
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    CompensatedSum<double> acc;
    acc.add(r[k]);
    for (std::size_t i = 1; i <= k; ++i) acc.add(-den[i] * c[k - i]);
    c[k] = acc.value() / den[0];
  }
  return c;
}

inline std::vector<double> gf_coefficients(const DamModel& model, std::size_t n) {
  return gf_coefficients(model.b1(), model.lambda(), n);
}

/// p1, p2 from E nu1 = q and the overflow d = 1 - (1-rho1) q.  Exact for
/// any q >= 1, including values beyond double range.
inline StationaryProbs stationary_probs_from_count(double rho1, double rho2, const ScaledReal& q,
                                                   const ScaledReal& overflow) {
  // Everything is brought to the exponent of q.
  const double unit = pow2(-q.exponent);
  const double den = unit + (rho1 - rho2) * q.mantissa;
  const double p1 = (1.0 - rho2) / den * unit;
  // A rounding-level negative overflow means p2 is below resolution.
  const double d = std::max(0.0, overflow.mantissa * pow2(overflow.exponent - q.exponent));
  const double p2 = rho2 * d / den;
  return {p1, p2};
}

inline StationaryProbs stationary_probs_from_count(double rho1, double rho2, const ScaledReal& q) {
  return stationary_probs_from_count(rho1, rho2, q, detail::overflow_from_count(rho1, q));
}

inline StationaryProbs stationary_probs_from_count(double rho1, double rho2, double q) {
  return stationary_probs_from_count(rho1, rho2, ScaledReal::normalized(q, 0));
}

inline BusyPeriodMetrics busy_period_metrics_from_count(const DamModel& model, double e_nu1, double overflow) {
  const double rho2 = model.rho2();
  BusyPeriodMetrics m{};
  m.e_nu1 = e_nu1;
  m.e_nu2 = std::max(0.0, overflow) / (1.0 - rho2);
  m.e_t1 = mean(model.b1()) * m.e_nu1;
  m.e_t2 = mean(model.b2()) * m.e_nu2;
  m.e_t = m.e_t1 + m.e_t2;
  m.e_idle = 1.0 / model.lambda();
  return m;
}

inline BusyPeriodMetrics busy_period_metrics_from_count(const DamModel& model, double e_nu1) {
  return busy_period_metrics_from_count(model, e_nu1, 1.0 - (1.0 - model.rho1()) * e_nu1);
}

inline BusyPeriodMetrics busy_period_metrics(const DamModel& model, RecurrenceOptions opts = {}) {
  const auto q = busy_period_counts(model, opts);
  return busy_period_metrics_from_count(model, q.back().to_double(), q.overflow().to_double());
}

inline StationaryProbs stationary_probs(const DamModel& model, RecurrenceOptions opts = {}) {
  const auto q = busy_period_counts(model, opts);
  return stationary_probs_from_count(model.rho1(), model.rho2(), q.back(), q.overflow());
}

/// J(L) = L (j1 p1 + j2 p2).
inline double cost_from_probs(std::size_t level, const StationaryProbs& p, const CostModel& costs) {
  const double L = static_cast<double>(level);
  double j = 0.0;
  // Skip zero-cost terms so 0 * (tiny or huge) never contributes.
  if (costs.j1 != 0.0) j += costs.j1 * p.p1;
  if (costs.j2 != 0.0) j += costs.j2 * p.p2;
  return L * j;
}

inline double cost(const DamModel& model, const CostModel& costs, RecurrenceOptions opts = {}) {
  return cost_from_probs(model.level(), stationary_probs(model, opts), costs);
}

inline StationaryMetrics stationary_metrics(const DamModel& model, const CostModel& costs,
                                            RecurrenceOptions opts = {}) {
  const auto p = stationary_probs(model, opts);
  return {p.p1, p.p2, cost_from_probs(model.level(), p, costs)};
}

}  // namespace damctl
