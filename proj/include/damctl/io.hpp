#pragma once

// Text and JSON forms of the library's value types.
//
// Distribution flag grammar:
//   exp:<rate>  erlang:<shape>:<rate>  gamma:<shape>:<rate>  det:<duration>
//   hyper:<w1>:<r1>:<w2>:<r2>[...]
//
// JSON doubles are written at full round-trip precision; non-finite values
// are written as the strings "inf", "-inf" and "nan".  Human-readable text
// uses 12 significant digits.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "damctl/control.hpp"
#include "damctl/distributions.hpp"
#include "damctl/errors.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/model.hpp"
#include "damctl/simulator.hpp"

namespace damctl {

using json = nlohmann::json;

inline constexpr int kTextDigits = 12;

/// %.12g
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kTextDigits, x);
  return buf;
}

/// Shortest string that parses back to exactly `x`.
inline std::string format_exact(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_double(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw invalid_argument(std::string(what) + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw invalid_argument(std::string(what) + ": '" + s + "' is not a number");
  return v;
}

inline int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw invalid_argument(std::string(what) + ": '" + std::string(text) + "' is not an integer");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline ServiceDistribution parse_distribution(std::string_view spec) {
  const auto parts = detail::split(spec, ':');
  const auto family = parts[0];
  const std::size_t args = parts.size() - 1;
  auto need = [&](std::size_t n) {
    if (args != n)
      throw invalid_argument("distribution '" + std::string(spec) + "': " + std::string(family) + " takes " +
                             std::to_string(n) + " parameter(s)");
  };
  if (family == "exp") {
    need(1);
    return ServiceDistribution::exponential(detail::parse_double(parts[1], "exp rate"));
  }
  if (family == "erlang") {
    need(2);
    return ServiceDistribution::erlang(detail::parse_int(parts[1], "erlang shape"),
                                       detail::parse_double(parts[2], "erlang rate"));
  }
  if (family == "gamma") {
    need(2);
    return ServiceDistribution::gamma(detail::parse_double(parts[1], "gamma shape"),
                                      detail::parse_double(parts[2], "gamma rate"));
  }
  if (family == "det") {
    need(1);
    return ServiceDistribution::deterministic(detail::parse_double(parts[1], "det duration"));
  }
  if (family == "hyper") {
    if (args == 0 || args % 2 != 0)
      throw invalid_argument("distribution '" + std::string(spec) + "': hyper takes weight:rate pairs");
    std::vector<double> w, r;
    for (std::size_t i = 1; i < parts.size(); i += 2) {
      w.push_back(detail::parse_double(parts[i], "hyper weight"));
      r.push_back(detail::parse_double(parts[i + 1], "hyper rate"));
    }
    return ServiceDistribution::hyperexponential(std::move(w), std::move(r));
  }
  throw invalid_argument("unknown distribution family '" + std::string(family) +
                         "' (expected exp, erlang, gamma, det or hyper)");
}

/// Inverse of parse_distribution; parameters are written exactly.
inline std::string format_distribution(const ServiceDistribution& d) {
  return std::visit(
      detail::overloaded{
          [](const Exponential& e) { return "exp:" + format_exact(e.rate); },
          [](const Erlang& e) { return "erlang:" + std::to_string(e.shape) + ":" + format_exact(e.rate); },
          [](const Gamma& g) { return "gamma:" + format_exact(g.shape) + ":" + format_exact(g.rate); },
          [](const Deterministic& c) { return "det:" + format_exact(c.duration); },
          [](const HyperExponential& h) {
            std::string s = "hyper";
            for (std::size_t i = 0; i < h.weights.size(); ++i)
              s += ":" + format_exact(h.weights[i]) + ":" + format_exact(h.rates[i]);
            return s;
          }},
      d.law());
}

// JSON numbers ---------------------------------------------------------------

inline json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw invalid_argument("expected a number, got " + j.dump());
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw invalid_argument(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw invalid_argument(std::string("missing field '") + key + "'");
  return *it;
}

inline double number_field(const json& j, const char* key) { return number_from_json(field(j, key)); }

}  // namespace detail

// Plain records --------------------------------------------------------------

inline void to_json(json& j, const CostModel& c) { j = {{"j1", c.j1}, {"j2", c.j2}}; }
inline void from_json(const json& j, CostModel& c) {
  c = CostModel(detail::number_field(j, "j1"), detail::number_field(j, "j2"));
}

inline void to_json(json& j, const BusyPeriodMetrics& m) {
  j = {{"e_nu1", number_to_json(m.e_nu1)}, {"e_nu2", number_to_json(m.e_nu2)},
       {"e_t1", number_to_json(m.e_t1)},   {"e_t2", number_to_json(m.e_t2)},
       {"e_t", number_to_json(m.e_t)},     {"e_idle", number_to_json(m.e_idle)}};
}
inline void from_json(const json& j, BusyPeriodMetrics& m) {
  using detail::number_field;
  m = {number_field(j, "e_nu1"), number_field(j, "e_nu2"), number_field(j, "e_t1"),
       number_field(j, "e_t2"),  number_field(j, "e_t"),   number_field(j, "e_idle")};
}

inline void to_json(json& j, const StationaryMetrics& m) {
  j = {{"p1", number_to_json(m.p1)}, {"p2", number_to_json(m.p2)}, {"cost", number_to_json(m.cost)}};
}
inline void from_json(const json& j, StationaryMetrics& m) {
  using detail::number_field;
  m = {number_field(j, "p1"), number_field(j, "p2"), number_field(j, "cost")};
}

inline ControlRegime control_regime_from_string(std::string_view s) {
  for (auto r : {ControlRegime::Critical, ControlRegime::UpperPenalized, ControlRegime::LowerPenalized})
    if (s == to_string(r)) return r;
  throw invalid_argument("unknown control regime '" + std::string(s) + "'");
}

inline ControlMode control_mode_from_string(std::string_view s) {
  if (s == "asymptotic") return ControlMode::Asymptotic;
  if (s == "exact") return ControlMode::Exact;
  throw invalid_argument("mode must be 'exact' or 'asymptotic', got '" + std::string(s) + "'");
}

inline void to_json(json& j, const ControlSolution& s) {
  j = {{"regime", to_string(s.regime)},
       {"mode", to_string(s.mode)},
       {"c_star", number_to_json(s.c_star)},
       {"delta_star", number_to_json(s.delta_star)},
       {"rho1_star", number_to_json(s.rho1_star)},
       {"b1_star", number_to_json(s.b1_star)},
       {"predicted_cost", number_to_json(s.predicted_cost)}};
}
inline void from_json(const json& j, ControlSolution& s) {
  using detail::number_field;
  s.regime = control_regime_from_string(detail::field(j, "regime").get<std::string>());
  s.mode = control_mode_from_string(detail::field(j, "mode").get<std::string>());
  s.c_star = number_field(j, "c_star");
  s.delta_star = number_field(j, "delta_star");
  s.rho1_star = number_field(j, "rho1_star");
  s.b1_star = number_field(j, "b1_star");
  s.predicted_cost = number_field(j, "predicted_cost");
}

inline void to_json(json& j, const Estimate& e) {
  j = {{"value", number_to_json(e.value)}, {"half_width", number_to_json(e.half_width)}};
}
inline void from_json(const json& j, Estimate& e) {
  e = {detail::number_field(j, "value"), detail::number_field(j, "half_width")};
}

inline void to_json(json& j, const SimulationReport& r) {
  j = {{"p1", r.p1},       {"p2", r.p2},       {"occupancy_above", r.occupancy_above},
       {"e_nu1", r.e_nu1}, {"e_nu2", r.e_nu2}, {"e_t1", r.e_t1},
       {"e_t2", r.e_t2},   {"cycles", r.cycles}, {"seed", r.seed},
       {"batch_count", r.batch_count}};
}
inline void from_json(const json& j, SimulationReport& r) {
  using detail::field;
  r.p1 = field(j, "p1").get<Estimate>();
  r.p2 = field(j, "p2").get<Estimate>();
  r.occupancy_above = field(j, "occupancy_above").get<Estimate>();
  r.e_nu1 = field(j, "e_nu1").get<Estimate>();
  r.e_nu2 = field(j, "e_nu2").get<Estimate>();
  r.e_t1 = field(j, "e_t1").get<Estimate>();
  r.e_t2 = field(j, "e_t2").get<Estimate>();
  r.cycles = field(j, "cycles").get<std::uint64_t>();
  r.seed = field(j, "seed").get<std::uint64_t>();
  r.batch_count = field(j, "batch_count").get<std::uint64_t>();
}

}  // namespace damctl

// Types without a default constructor.
namespace nlohmann {

template <>
struct adl_serializer<damctl::ServiceDistribution> {
  static void to_json(json& j, const damctl::ServiceDistribution& d) {
    using namespace damctl;
    std::visit(damctl::detail::overloaded{[&](const Exponential& e) { j = {{"type", "exponential"}, {"rate", e.rate}}; },
                                  [&](const Erlang& e) {
                                    j = {{"type", "erlang"}, {"shape", e.shape}, {"rate", e.rate}};
                                  },
                                  [&](const Gamma& g) {
                                    j = {{"type", "gamma"}, {"shape", g.shape}, {"rate", g.rate}};
                                  },
                                  [&](const Deterministic& c) {
                                    j = {{"type", "deterministic"}, {"duration", c.duration}};
                                  },
                                  [&](const HyperExponential& h) {
                                    j = {{"type", "hyperexponential"}, {"weights", h.weights}, {"rates", h.rates}};
                                  }},
               d.law());
  }

  // Accepts the tagged object or a flag-grammar string.
  static damctl::ServiceDistribution from_json(const json& j) {
    using namespace damctl;
    using damctl::detail::field;
    using damctl::detail::number_field;
    if (j.is_string()) return parse_distribution(j.get<std::string>());
    const auto type = field(j, "type").get<std::string>();
    if (type == "exponential") return ServiceDistribution::exponential(number_field(j, "rate"));
    if (type == "erlang") return ServiceDistribution::erlang(field(j, "shape").get<int>(), number_field(j, "rate"));
    if (type == "gamma") return ServiceDistribution::gamma(number_field(j, "shape"), number_field(j, "rate"));
    if (type == "deterministic") return ServiceDistribution::deterministic(number_field(j, "duration"));
    if (type == "hyperexponential")
      return ServiceDistribution::hyperexponential(field(j, "weights").get<std::vector<double>>(),
                                                   field(j, "rates").get<std::vector<double>>());
    throw damctl::invalid_argument("unknown distribution type '" + type + "'");
  }
};

template <>
struct adl_serializer<damctl::DamModel> {
  static void to_json(json& j, const damctl::DamModel& m) {
    j = {{"lambda", m.lambda()}, {"b1", m.b1()}, {"b2", m.b2()}, {"level", m.level()}};
  }
  static damctl::DamModel from_json(const json& j) {
    using damctl::detail::field;
    return damctl::DamModel(damctl::detail::number_field(j, "lambda"),
                            field(j, "b1").get<damctl::ServiceDistribution>(),
                            field(j, "b2").get<damctl::ServiceDistribution>(), field(j, "level").get<std::size_t>());
  }
};

}  // namespace nlohmann
