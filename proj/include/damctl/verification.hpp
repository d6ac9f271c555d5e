#pragma once

// Side-by-side tables of exact finite-L probabilities and their limiting
// forms, one row per (C, L).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "damctl/asymptotics.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/io.hpp"

namespace damctl {

struct VerifySpec {
  RegimeTag regime = RegimeTag::Critical;
  double lambda = 1.0;
  // B1 for the fixed regimes; only its shape matters in the critical and
  // heavy-traffic ones, where it is rescaled to the required load.
  ServiceDistribution b1 = ServiceDistribution::exponential(1.0);
  ServiceDistribution b2 = ServiceDistribution::exponential(2.0);
  std::vector<std::size_t> levels{500, 1000, 2000};
  std::vector<double> c_values{1.0};  // heavy-traffic regimes only
  RecurrenceOptions recurrence{};
};

struct VerifyRow {
  std::size_t level;
  double delta;  // rho1 - 1
  double c;      // L |delta|
  double p1_exact;
  double p1_asym;
  double p1_rel_err;  // nan where the limit is 0
  double p2_exact;
  double p2_asym;
  double p2_rel_err;

  friend bool operator==(const VerifyRow&, const VerifyRow&) = default;
};

/// Worst-case view of one C group, at its largest level.
struct VerifySummary {
  double c;
  std::size_t level;
  double p1_rel_err;
  double p2_rel_err;
  double p1_ratio;  // exact / asymptotic
  double p2_ratio;
  bool p1_err_decreasing;  // over increasing L
  bool p2_err_decreasing;
};

inline RegimeTag regime_from_string(const std::string& s) {
  for (auto t : {RegimeTag::Subcritical, RegimeTag::Critical, RegimeTag::Supercritical, RegimeTag::HeavyUpper,
                 RegimeTag::HeavyLower})
    if (s == to_string(t)) return t;
  if (s == "upper") return RegimeTag::HeavyUpper;
  if (s == "lower") return RegimeTag::HeavyLower;
  throw invalid_argument("unknown regime '" + s + "' (expected subcritical, critical, supercritical, upper or lower)");
}

namespace detail {

inline double rel_err(double exact, double asym) {
  if (asym == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(exact - asym) / std::abs(asym);
}

inline VerifyRow make_row(std::size_t level, double delta, double c, const StationaryProbs& exact,
                          const ProbLimits& asym) {
  return {level,          delta,      c, exact.p1, asym.p1, rel_err(exact.p1, asym.p1),
          exact.p2,       asym.p2,    rel_err(exact.p2, asym.p2)};
}

}  // namespace detail

inline std::vector<VerifyRow> verify_table(const VerifySpec& spec) {
  detail::require(!spec.levels.empty(), "level list is empty");
  for (auto l : spec.levels) detail::require(l >= 1, "levels must be at least 1");
  const double lambda = spec.lambda;
  const double rho2 = lambda * mean(spec.b2);
  std::vector<VerifyRow> rows;

  auto exact_at = [&](const ServiceDistribution& b1, std::size_t level) {
    return stationary_probs(DamModel(lambda, b1, spec.b2, level), spec.recurrence);
  };

  switch (spec.regime) {
    case RegimeTag::Critical: {
      const auto b1 = scale_to_mean(spec.b1, 1.0 / lambda);
      const auto decay = critical_decay(normalized_moment(b1, lambda, 2), rho2);
      for (auto l : spec.levels) {
        const double L = static_cast<double>(l);
        rows.push_back(detail::make_row(l, 0.0, 0.0, exact_at(b1, l), {decay.p1 / L, decay.p2 / L}));
      }
      break;
    }
    case RegimeTag::Subcritical: {
      const double rho1 = lambda * mean(spec.b1);
      const auto lim = limit_subcritical(rho1);
      for (auto l : spec.levels)
        rows.push_back(detail::make_row(l, rho1 - 1.0, static_cast<double>(l) * (1.0 - rho1), exact_at(spec.b1, l),
                                        lim));
      break;
    }
    case RegimeTag::Supercritical: {
      const double rho1 = lambda * mean(spec.b1);
      if (!(rho1 > 1.0)) throw regime_error("supercritical verification needs rho1 > 1");
      const auto lim = supercritical(lambda, spec.b1, rho2);
      for (auto l : spec.levels) {
        const double p1 = lim.p1_prefactor * std::pow(lim.phi, static_cast<double>(l));
        rows.push_back(detail::make_row(l, rho1 - 1.0, static_cast<double>(l) * (rho1 - 1.0), exact_at(spec.b1, l),
                                        {p1, lim.p2_limit}));
      }
      break;
    }
    case RegimeTag::HeavyUpper:
    case RegimeTag::HeavyLower: {
      detail::require(!spec.c_values.empty(), "C list is empty");
      const double rho12 = rho12_tilde(spec.b1, lambda);
      const bool upper = spec.regime == RegimeTag::HeavyUpper;
      for (double c : spec.c_values) {
        for (auto l : spec.levels) {
          const double delta = c / static_cast<double>(l);
          if (!upper && !(delta < 1.0)) throw regime_error("lower window needs C < L so that rho1 stays positive");
          const double rho1 = upper ? 1.0 + delta : 1.0 - delta;
          const auto b1 = scale_to_mean(spec.b1, rho1 / lambda);
          ProbLimits asym{};
          if (upper) {
            asym = heavy_upper(delta, c, rho12, rho2);
          } else {
            const auto h = heavy_lower(delta, c, rho12, rho2);
            asym = {h.p1, h.p2};
          }
          rows.push_back(detail::make_row(l, rho1 - 1.0, c, exact_at(b1, l), asym));
        }
      }
      break;
    }
  }
  return rows;
}

/// Heavy-traffic tables get one summary per C, in order of first
/// appearance; the fixed regimes form a single group.
inline std::vector<VerifySummary> summarize(const std::vector<VerifyRow>& rows, RegimeTag regime) {
  const bool by_c = regime == RegimeTag::HeavyUpper || regime == RegimeTag::HeavyLower;
  std::vector<std::vector<VerifyRow>> groups;
  std::vector<double> keys;
  for (const auto& r : rows) {
    const double key = by_c ? r.c : 0.0;
    const auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      groups.push_back({r});
    } else {
      groups[static_cast<std::size_t>(it - keys.begin())].push_back(r);
    }
  }

  // NaN errors (zero limits) never count as an increase.
  auto decreasing = [](const std::vector<VerifyRow>& g, double VerifyRow::*err) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (g[i].*err > g[i - 1].*err) return false;
    return true;
  };

  std::vector<VerifySummary> out;
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [](const VerifyRow& a, const VerifyRow& b) { return a.level < b.level; });
    const auto& last = g.back();
    out.push_back({by_c ? last.c : std::numeric_limits<double>::quiet_NaN(), last.level, last.p1_rel_err,
                   last.p2_rel_err, last.p1_exact / last.p1_asym, last.p2_exact / last.p2_asym,
                   decreasing(g, &VerifyRow::p1_rel_err), decreasing(g, &VerifyRow::p2_rel_err)});
  }
  return out;
}

/// One line per group, e.g.
///   C=1 L=2000: p1 rel_err 0.0021 (exact/asym 0.998, decreasing in L), ...
inline std::vector<std::string> summary_lines(const std::vector<VerifySummary>& summary) {
  std::vector<std::string> out;
  for (const auto& s : summary) {
    std::string line = std::isnan(s.c) ? "" : "C=" + format_number(s.c) + " ";
    line += "L=" + std::to_string(s.level) + ": p1 rel_err " + format_number(s.p1_rel_err) + " (exact/asym " +
            format_number(s.p1_ratio) + (s.p1_err_decreasing ? ", decreasing in L" : ", not decreasing in L") +
            "); p2 rel_err " + format_number(s.p2_rel_err) + " (exact/asym " + format_number(s.p2_ratio) +
            (s.p2_err_decreasing ? ", decreasing in L" : ", not decreasing in L") + ")";
    out.push_back(std::move(line));
  }
  return out;
}

inline void to_json(json& j, const VerifyRow& r) {
  j = {{"level", r.level},
       {"delta", number_to_json(r.delta)},
       {"c", number_to_json(r.c)},
       {"p1_exact", number_to_json(r.p1_exact)},
       {"p1_asym", number_to_json(r.p1_asym)},
       {"p1_rel_err", number_to_json(r.p1_rel_err)},
       {"p2_exact", number_to_json(r.p2_exact)},
       {"p2_asym", number_to_json(r.p2_asym)},
       {"p2_rel_err", number_to_json(r.p2_rel_err)}};
}
inline void from_json(const json& j, VerifyRow& r) {
  using detail::number_field;
  r = {detail::field(j, "level").get<std::size_t>(),
       number_field(j, "delta"),
       number_field(j, "c"),
       number_field(j, "p1_exact"),
       number_field(j, "p1_asym"),
       number_field(j, "p1_rel_err"),
       number_field(j, "p2_exact"),
       number_field(j, "p2_asym"),
       number_field(j, "p2_rel_err")};
}

}  // namespace damctl
