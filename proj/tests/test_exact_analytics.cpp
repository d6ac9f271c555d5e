#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "damctl/exact_analytics.hpp"

using namespace damctl;

namespace {

// M/M/1 closed form: the count generating function factorizes for
// exponential service, giving (1 - rho^{L+1}) / (1 - rho), or L + 1 at rho = 1.
double mm1_count(double rho, std::size_t level) {
  if (rho == 1.0) return static_cast<double>(level + 1);
  return (1.0 - std::pow(rho, double(level + 1))) / (1.0 - rho);
}

DamModel mm1(double rho1, double rho2, std::size_t level, double lambda = 1.0) {
  return DamModel(lambda, ServiceDistribution::exponential(lambda / rho1),
                  ServiceDistribution::exponential(lambda / rho2), level);
}

std::vector<ServiceDistribution> unit_families() {
  return {ServiceDistribution::exponential(1.0), ServiceDistribution::erlang(2, 2.0),
          ServiceDistribution::gamma(0.6, 0.6), ServiceDistribution::deterministic(1.0),
          ServiceDistribution::hyperexponential({0.25, 0.75}, {0.5, 1.5})};
}

}  // namespace

TEST(BusyPeriodCounts, MM1Examples) {
  const auto q = busy_period_counts(mm1(0.8, 0.5, 5));
  ASSERT_EQ(q.size(), 6u);
  EXPECT_EQ(q[0], 1.0);
  EXPECT_NEAR(q[5], 3.68928, 1e-12);
  EXPECT_NEAR(busy_period_counts(mm1(1.0, 0.5, 9))[9], 10.0, 1e-12);
}

TEST(BusyPeriodCounts, MatchesMM1ClosedForm) {
  for (double rho : {0.5, 0.8, 1.0, 1.25, 2.0}) {
    const auto q = busy_period_counts(mm1(rho, 0.5, 200));
    for (std::size_t n = 0; n <= 200; ++n) {
      const double expect = mm1_count(rho, n);
      EXPECT_NEAR(q[n], expect, 1e-10 * expect) << "rho=" << rho << " n=" << n;
    }
  }
}

TEST(BusyPeriodCounts, NondecreasingForAllFamilies) {
  for (const auto& shape : unit_families()) {
    for (double rho : {0.5, 1.0, 1.5}) {
      const auto b1 = scale_to_mean(shape, rho);
      const auto q = busy_period_counts(b1, 1.0, 300);
      for (std::size_t n = 1; n < q.size(); ++n) ASSERT_GE(q[n], q[n - 1]) << "rho=" << rho << " n=" << n;
    }
  }
}

TEST(BusyPeriodCounts, DegeneratePivotIsReported) {
  // r_0 = e^{-800} < 1e-300
  EXPECT_THROW(busy_period_counts(ServiceDistribution::deterministic(800), 1.0, 5), numeric_error);
}

TEST(BusyPeriodCounts, SupercriticalOverflowIsScaled) {
  // rho1 = 2: Q_L ~ 2^{L+1}, far beyond double range at L = 3000.
  const auto q = busy_period_counts(ServiceDistribution::exponential(0.5), 1.0, 3000);
  const auto& last = q.back();
  EXPECT_TRUE(last.is_scaled());
  // log Q_L = log(2^{L+1} - 1) ~ (L + 1) log 2
  EXPECT_NEAR(last.log(), 3001 * std::log(2.0), 1e-9 * 3001);
  // spot check against the closed form inside double range
  EXPECT_NEAR(q[900], mm1_count(2.0, 900), 1e-10 * mm1_count(2.0, 900));
}

TEST(BusyPeriodCounts, ExtendedPrecisionAgrees) {
  for (const auto& shape : unit_families()) {
    const auto b1 = scale_to_mean(shape, 0.9);
    const auto d = busy_period_counts(b1, 1.0, 150);
    const auto x = busy_period_counts(b1, 1.0, 150, RecurrenceOptions{40});
    for (std::size_t n = 0; n <= 150; ++n) EXPECT_NEAR(d[n], x[n], 1e-11 * x[n]);
  }
  // extended precision needs no rescaling
  const auto big = busy_period_counts(ServiceDistribution::exponential(0.5), 1.0, 1500, RecurrenceOptions{30});
  EXPECT_NEAR(big.back().log(), 1501 * std::log(2.0), 1e-9 * 1501);
}

TEST(BusyPeriodCounts, OverflowMatchesMM1) {
  // 1 - (1-rho) Q_L = rho^{L+1} for M/M/1
  for (double rho : {0.3, 0.8, 1.25}) {
    const auto ext = busy_period_counts(mm1(rho, 0.5, 60), RecurrenceOptions{50});
    const double expect = std::pow(rho, 61.0);
    EXPECT_NEAR(ext.overflow().to_double(), expect, 1e-12 * expect) << "rho=" << rho;
    const auto dbl = busy_period_counts(mm1(rho, 0.5, 60));
    EXPECT_NEAR(dbl.overflow().to_double(), expect, 1e-12 * std::max(1.0, expect)) << "rho=" << rho;
  }
  // relative accuracy of tiny p2 needs the extended path
  const auto p = stationary_probs(mm1(0.3, 0.5, 60), RecurrenceOptions{50});
  const double q = mm1_count(0.3, 60);
  EXPECT_NEAR(p.p2, 0.5 * std::pow(0.3, 61.0) / (1 + (0.3 - 0.5) * q), 1e-12 * p.p2);
}

TEST(GfCoefficients, Examples) {
  const auto c = gf_coefficients(mm1(0.8, 0.5, 5), 5);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_NEAR(c[5], 3.68928, 1e-12);
  const auto s = gf_coefficients(mm1(1.25, 0.5, 5), 1);
  EXPECT_NEAR(s[1], 2.25, 1e-14);
}

TEST(GfCoefficients, AgreesWithRecurrence) {
  for (const auto& shape : unit_families()) {
    for (double rho : {0.8, 1.0, 1.25}) {
      const auto b1 = scale_to_mean(shape, rho);
      const auto q = busy_period_counts(b1, 1.0, 100);
      const auto c = gf_coefficients(b1, 1.0, 100);
      for (std::size_t n = 0; n <= 100; ++n) EXPECT_NEAR(c[n], q[n], 1e-9 * q[n]);
    }
  }
}

TEST(BusyPeriodMetrics, Examples) {
  const auto m = busy_period_metrics(mm1(0.8, 0.5, 5));
  EXPECT_NEAR(m.e_nu1, 3.68928, 1e-12);
  EXPECT_NEAR(m.e_nu2, 0.524288, 1e-12);
  EXPECT_DOUBLE_EQ(m.e_idle, 1.0);

  for (double rho2 : {0.1, 0.5, 0.9}) {
    for (std::size_t level : {1u, 7u, 40u}) {
      const auto c = busy_period_metrics(mm1(1.0, rho2, level));
      EXPECT_NEAR(c.e_nu2, 1.0 / (1.0 - rho2), 1e-12);
      EXPECT_NEAR(c.e_t2, rho2 / (1.0 - rho2), 1e-12);  // lambda = 1
    }
  }
}

TEST(BusyPeriodMetrics, WaldAndIdentityChain) {
  for (const auto& shape : unit_families()) {
    for (double rho1 : {0.5, 1.0, 1.3}) {
      const double lambda = 1.7;
      const DamModel m(lambda, scale_to_mean(shape, rho1 / lambda), ServiceDistribution::gamma(2.0, 5.0), 25);
      const auto b = busy_period_metrics(m);
      EXPECT_GE(b.e_nu1, 1.0);
      EXPECT_GE(b.e_nu2, 0.0);
      EXPECT_DOUBLE_EQ(b.e_t, b.e_t1 + b.e_t2);
      EXPECT_NEAR(b.e_t1, mean(m.b1()) * b.e_nu1, 1e-15 * b.e_t1);
      // time form of the above-level relation, E nu1 = lambda E T1 / rho1
      const double r1 = m.rho1(), r2 = m.rho2();
      const double e_t2 = r2 / (lambda * (1 - r2)) - r2 * (1 - r1) / (r1 * (1 - r2)) * b.e_t1;
      EXPECT_NEAR(b.e_t2, e_t2, 1e-10 * std::max(1.0, b.e_t2));
      // cycle count: arrivals per cycle equal services per busy period
      EXPECT_NEAR(lambda * b.e_t + 1.0, b.e_nu(), 1e-9 * b.e_nu());
    }
  }
}

TEST(StationaryProbs, Examples) {
  const auto p = stationary_probs(mm1(0.8, 0.5, 5));
  EXPECT_NEAR(p.p1, 0.5 / (1 + 0.3 * 3.68928), 1e-12);
  EXPECT_NEAR(p.p1, 0.237329, 5e-7);
  // (0.5 - 0.1 Q_5) / (1 + 0.3 Q_5) with Q_5 = 3.68928
  EXPECT_NEAR(p.p2, 0.0622142564, 1e-10);
  const auto m = busy_period_metrics(mm1(0.8, 0.5, 5));
  EXPECT_NEAR(p.p2, 0.5 * m.e_nu2 / (m.e_nu1 + m.e_nu2), 1e-14);

  const auto deg = stationary_probs_from_count(0.8, 0.5, 1.0);
  EXPECT_NEAR(deg.p1, 0.5 / 1.3, 1e-15);
}

TEST(StationaryProbs, RenewalRewardConsistency) {
  for (const auto& shape : unit_families()) {
    for (double rho1 : {0.6, 1.0, 1.2}) {
      const DamModel m(1.0, scale_to_mean(shape, rho1), ServiceDistribution::erlang(3, 6.0), 30);
      const auto b = busy_period_metrics(m);
      const auto p = stationary_probs(m);
      EXPECT_NEAR(p.p1, b.e_idle / (b.e_t + b.e_idle), 1e-12);
      EXPECT_NEAR(p.p2, b.e_t2 / (b.e_t + b.e_idle), 1e-12);
      EXPECT_GE(p.p1, 0.0);
      EXPECT_GE(p.p2, 0.0);
      EXPECT_LE(p.p1 + p.p2, 1.0);
    }
  }
}

TEST(StationaryProbs, HugeCountsStayFinite) {
  const DamModel m(1.0, ServiceDistribution::exponential(0.5), ServiceDistribution::exponential(2.0), 3000);
  const auto p = stationary_probs(m);
  // rho1 = 2: p2 -> rho2 (rho1 - 1) / (rho1 - rho2) = 1/3, p1 underflows
  EXPECT_NEAR(p.p2, 0.5 / 1.5, 1e-12);
  EXPECT_GE(p.p1, 0.0);
  EXPECT_LT(p.p1, 1e-300);
}

TEST(Cost, Examples) {
  const auto m = mm1(0.8, 0.5, 5);
  EXPECT_NEAR(cost(m, CostModel(1, 1)), 1.4977140514, 1e-9);
  const auto p = stationary_probs(m);
  EXPECT_NEAR(cost(m, CostModel(1, 1)), 5 * (p.p1 + p.p2), 1e-14);
  EXPECT_EQ(cost(m, CostModel(0, 0)), 0.0);
  EXPECT_NEAR(cost(mm1(1.0, 0.5, 9), CostModel(1, 1)), 1.5, 1e-12);

  const auto s = stationary_metrics(m, CostModel(2, 3));
  EXPECT_NEAR(s.cost, 5 * (2 * s.p1 + 3 * s.p2), 1e-13);
}

TEST(DamModel, Validation) {
  const auto e = ServiceDistribution::exponential(1.0);
  EXPECT_THROW(DamModel(0.0, e, e, 5), invalid_argument);
  EXPECT_THROW(DamModel(1.0, e, e, 0), invalid_argument);
  EXPECT_THROW(DamModel(1.0, e, ServiceDistribution::exponential(1.0), 5), invalid_argument);  // rho2 = 1
  EXPECT_NO_THROW(DamModel(1.0, ServiceDistribution::exponential(0.1), ServiceDistribution::exponential(1.5), 5));
  EXPECT_THROW(CostModel(-1, 1), invalid_argument);
}
