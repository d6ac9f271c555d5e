#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "damctl/distributions.hpp"
#include "damctl/errors.hpp"

namespace damctl {

/// Poisson(lambda) inflow, service law `b1` while at most `level` units are
/// in the system at service start, `b2` above that.
class DamModel {
 public:
  DamModel(double lambda, ServiceDistribution b1, ServiceDistribution b2, std::size_t level)
      : lambda_(lambda), b1_(std::move(b1)), b2_(std::move(b2)), level_(level) {
    detail::require(lambda_ > 0 && std::isfinite(lambda_), "lambda must be positive and finite");
    detail::require(level_ >= 1, "level must be at least 1");
    detail::require(rho2() < 1.0, "rho2 = lambda * mean(b2) must be below 1 for stationarity");
  }

  double lambda() const noexcept { return lambda_; }
  const ServiceDistribution& b1() const noexcept { return b1_; }
  const ServiceDistribution& b2() const noexcept { return b2_; }
  std::size_t level() const noexcept { return level_; }

  double rho1() const { return lambda_ * mean(b1_); }
  double rho2() const { return lambda_ * mean(b2_); }
  double rho12() const { return normalized_moment(b1_, lambda_, 2); }
  double rho13() const { return normalized_moment(b1_, lambda_, 3); }

  DamModel with_level(std::size_t level) const { return DamModel(lambda_, b1_, b2_, level); }
  DamModel with_b1(ServiceDistribution b1) const { return DamModel(lambda_, std::move(b1), b2_, level_); }

  friend bool operator==(const DamModel&, const DamModel&) = default;

 private:
  double lambda_;
  ServiceDistribution b1_;
  ServiceDistribution b2_;
  std::size_t level_;
};

/// Damage costs J1(L) = j1 L for reaching the lower level and
/// J2(L) = j2 L for exceeding the upper one.
struct CostModel {
  double j1 = 1.0;
  double j2 = 1.0;

  CostModel() = default;
  CostModel(double lower, double upper) : j1(lower), j2(upper) {
    detail::require(j1 >= 0 && std::isfinite(j1), "j1 must be nonnegative and finite");
    detail::require(j2 >= 0 && std::isfinite(j2), "j2 must be nonnegative and finite");
  }

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

}  // namespace damctl
