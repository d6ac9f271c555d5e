#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "damctl/io.hpp"
#include "damctl/report.hpp"
#include "damctl/verification.hpp"

using namespace damctl;

namespace {

template <class T>
T round_trip(const T& x) {
  return json::parse(json(x).dump()).get<T>();
}

}  // namespace

TEST(DistributionGrammar, ParsesEveryFamily) {
  EXPECT_EQ(parse_distribution("exp:1.25"), ServiceDistribution::exponential(1.25));
  EXPECT_EQ(parse_distribution("erlang:2:4"), ServiceDistribution::erlang(2, 4.0));
  EXPECT_EQ(parse_distribution("gamma:0.5:0.25"), ServiceDistribution::gamma(0.5, 0.25));
  EXPECT_EQ(parse_distribution("det:0.8"), ServiceDistribution::deterministic(0.8));
  EXPECT_EQ(parse_distribution("hyper:0.25:0.5:0.75:1.5"),
            ServiceDistribution::hyperexponential({0.25, 0.75}, {0.5, 1.5}));
}

TEST(DistributionGrammar, FormatRoundTripsExactly) {
  for (const auto& d :
       {ServiceDistribution::exponential(1.0 / 3.0), ServiceDistribution::erlang(7, 0.1),
        ServiceDistribution::gamma(0.6, 1e-7), ServiceDistribution::deterministic(2.5e10),
        ServiceDistribution::hyperexponential({0.1, 0.2, 0.7}, {1.0 / 7.0, 2.0, 3.0})}) {
    EXPECT_EQ(parse_distribution(format_distribution(d)), d) << format_distribution(d);
  }
  EXPECT_EQ(format_distribution(ServiceDistribution::erlang(2, 2.0)), "erlang:2:2");
}

TEST(DistributionGrammar, RejectsMalformedInput) {
  for (const char* bad : {"", "exp", "exp:", "exp:1:2", "exp:abc", "exp:1x", "exp:-1", "erlang:2.5:1", "erlang:0:1",
                          "gamma:1", "det:0", "hyper:1", "hyper:0.5:1:0.4:2", "weibull:1:2"})
    EXPECT_THROW(parse_distribution(bad), invalid_argument) << bad;
}

TEST(Json, DistributionTaggedRecords) {
  const json j = ServiceDistribution::erlang(2, 2.0);
  EXPECT_EQ(j, json::parse(R"({"type":"erlang","shape":2,"rate":2.0})"));
  EXPECT_EQ(json::parse(R"("det:0.5")").get<ServiceDistribution>(), ServiceDistribution::deterministic(0.5));
  EXPECT_THROW(json::parse(R"({"type":"cauchy"})").get<ServiceDistribution>(), invalid_argument);
  EXPECT_THROW(json::parse(R"({"rate":1})").get<ServiceDistribution>(), invalid_argument);
}

TEST(Json, RecordsRoundTrip) {
  const DamModel m(0.9, ServiceDistribution::hyperexponential({0.3, 0.7}, {1.1, 2.3}),
                   ServiceDistribution::gamma(2.5, 7.0), 17);
  EXPECT_EQ(round_trip(m), m);
  EXPECT_EQ(round_trip(CostModel(0.1, 3.0)), CostModel(0.1, 3.0));

  const auto a = analyze(m, CostModel(2, 0.5));
  EXPECT_EQ(round_trip(a), a);

  ControlSolution s{ControlRegime::LowerPenalized, 1.25, -0.0125, 0.9875, 0.9875 / 0.9, 3.14159, ControlMode::Exact};
  EXPECT_EQ(round_trip(s), s);

  SimulationReport r;
  r.p1 = {0.25, 0.01};
  r.p2 = {1.0 / 3.0, 1e-17};
  r.e_nu2 = {7.0, 0.5};
  r.cycles = 123;
  r.seed = std::numeric_limits<std::uint64_t>::max();
  r.batch_count = 32;
  EXPECT_EQ(round_trip(r), r);

  const SimulationComparison cmp{m, r, exact_targets(m)};
  EXPECT_EQ(round_trip(cmp), cmp);

  const CostCurvePoint pt{0.5, 2.0, 6.9};
  EXPECT_EQ(round_trip(pt), pt);

  BusyPeriodMetrics b = busy_period_metrics(m);
  const auto b2 = round_trip(b);
  EXPECT_EQ(b2.e_nu1, b.e_nu1);
  EXPECT_EQ(b2.e_t, b.e_t);
}

TEST(Json, NonFiniteNumbersSurvive) {
  VerifyRow row{10, 0.0, 0.0, 0.5, 0.0, std::numeric_limits<double>::quiet_NaN(),
                1e-300, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const auto back = round_trip(row);
  EXPECT_TRUE(std::isnan(back.p1_rel_err));
  EXPECT_EQ(back.p2_asym, row.p2_asym);
  EXPECT_EQ(back.p2_rel_err, row.p2_rel_err);
  EXPECT_EQ(back.p2_exact, 1e-300);
}

TEST(Text, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.2373285538526968), "0.237328553853");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(1.0 / 3.0 * 1e-20), "3.33333333333e-21");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_exact(0.1), "0.1");
}
