#pragma once

// Records assembled by the command-line tool: the exact analysis of one
// model, the limiting cost curves over a C grid, and a simulation set next
// to its exact counterparts.

#include <cstdint>
#include <vector>

#include "damctl/asymptotics.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/io.hpp"
#include "damctl/model.hpp"
#include "damctl/simulator.hpp"

namespace damctl {

struct AnalysisReport {
  DamModel model;
  CostModel costs;
  unsigned precision_digits = 0;  // 0: double
  double rho1 = 0.0;
  double rho2 = 0.0;
  double q_level = 0.0;  // Q_L = E nu1
  double e_nu2 = 0.0;
  double e_t1 = 0.0;
  double e_t2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double cost = 0.0;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

inline AnalysisReport analyze(const DamModel& model, const CostModel& costs, RecurrenceOptions opts = {}) {
  const auto q = busy_period_counts(model, opts);
  const auto m = busy_period_metrics_from_count(model, q.back().to_double(), q.overflow().to_double());
  const auto p = stationary_probs_from_count(model.rho1(), model.rho2(), q.back(), q.overflow());
  return {model,  costs,  opts.extended_digits, model.rho1(), model.rho2(), m.e_nu1, m.e_nu2,
          m.e_t1, m.e_t2, p.p1,                 p.p2,         cost_from_probs(model.level(), p, costs)};
}

struct CostCurvePoint {
  double c;
  double j_upper;
  double j_lower;

  friend bool operator==(const CostCurvePoint&, const CostCurvePoint&) = default;
};

inline std::vector<CostCurvePoint> cost_curves(const std::vector<double>& c_grid, double rho12, double rho2,
                                               const CostModel& costs) {
  detail::require(!c_grid.empty(), "C grid is empty");
  std::vector<CostCurvePoint> out;
  out.reserve(c_grid.size());
  for (double c : c_grid) out.push_back({c, j_upper(c, rho12, rho2, costs), j_lower(c, rho12, rho2, costs)});
  return out;
}

/// Exact values the simulator estimates.
struct ExactTargets {
  double p1, p2, e_nu1, e_nu2, e_t1, e_t2;

  friend bool operator==(const ExactTargets&, const ExactTargets&) = default;
};

inline ExactTargets exact_targets(const DamModel& model, RecurrenceOptions opts = {}) {
  const auto r = analyze(model, CostModel(0, 0), opts);
  return {r.p1, r.p2, r.q_level, r.e_nu2, r.e_t1, r.e_t2};
}

struct SimulationComparison {
  DamModel model;
  SimulationReport report;
  ExactTargets exact;

  friend bool operator==(const SimulationComparison&, const SimulationComparison&) = default;
};

// JSON -------------------------------------------------------------------------

inline void to_json(json& j, const CostCurvePoint& p) {
  j = {{"c", number_to_json(p.c)}, {"j_upper", number_to_json(p.j_upper)}, {"j_lower", number_to_json(p.j_lower)}};
}
inline void from_json(const json& j, CostCurvePoint& p) {
  p = {detail::number_field(j, "c"), detail::number_field(j, "j_upper"), detail::number_field(j, "j_lower")};
}

inline void to_json(json& j, const ExactTargets& t) {
  j = {{"p1", number_to_json(t.p1)},       {"p2", number_to_json(t.p2)},     {"e_nu1", number_to_json(t.e_nu1)},
       {"e_nu2", number_to_json(t.e_nu2)}, {"e_t1", number_to_json(t.e_t1)}, {"e_t2", number_to_json(t.e_t2)}};
}
inline void from_json(const json& j, ExactTargets& t) {
  using detail::number_field;
  t = {number_field(j, "p1"),    number_field(j, "p2"),   number_field(j, "e_nu1"),
       number_field(j, "e_nu2"), number_field(j, "e_t1"), number_field(j, "e_t2")};
}

}  // namespace damctl

namespace nlohmann {

template <>
struct adl_serializer<damctl::AnalysisReport> {
  static void to_json(json& j, const damctl::AnalysisReport& r) {
    using damctl::number_to_json;
    j = {{"model", r.model},
         {"costs", r.costs},
         {"precision_digits", r.precision_digits},
         {"rho1", number_to_json(r.rho1)},
         {"rho2", number_to_json(r.rho2)},
         {"q_level", number_to_json(r.q_level)},
         {"e_nu2", number_to_json(r.e_nu2)},
         {"e_t1", number_to_json(r.e_t1)},
         {"e_t2", number_to_json(r.e_t2)},
         {"p1", number_to_json(r.p1)},
         {"p2", number_to_json(r.p2)},
         {"cost", number_to_json(r.cost)}};
  }
  static damctl::AnalysisReport from_json(const json& j) {
    using damctl::detail::field;
    using damctl::detail::number_field;
    return {field(j, "model").get<damctl::DamModel>(),
            field(j, "costs").get<damctl::CostModel>(),
            field(j, "precision_digits").get<unsigned>(),
            number_field(j, "rho1"),
            number_field(j, "rho2"),
            number_field(j, "q_level"),
            number_field(j, "e_nu2"),
            number_field(j, "e_t1"),
            number_field(j, "e_t2"),
            number_field(j, "p1"),
            number_field(j, "p2"),
            number_field(j, "cost")};
  }
};

template <>
struct adl_serializer<damctl::SimulationComparison> {
  static void to_json(json& j, const damctl::SimulationComparison& s) {
    j = {{"model", s.model}, {"report", s.report}, {"exact", s.exact}};
  }
  static damctl::SimulationComparison from_json(const json& j) {
    using damctl::detail::field;
    return {field(j, "model").get<damctl::DamModel>(), field(j, "report").get<damctl::SimulationReport>(),
            field(j, "exact").get<damctl::ExactTargets>()};
  }
};

}  // namespace nlohmann
