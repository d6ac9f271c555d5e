// Acceptance suite: one PASS/FAIL line per criterion, with timing.  Exit
// status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "damctl/asymptotics.hpp"
#include "damctl/control.hpp"
#include "damctl/distributions.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/io.hpp"
#include "damctl/simulator.hpp"
#include "damctl/verification.hpp"

using namespace damctl;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.note(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= budget_s) {
    out.ok = false;
    out.note("runtime " + format_number(secs) + " s over budget " + format_number(budget_s) + " s");
  }
  if (!out.ok) ++failures;
  std::printf("%s criterion %2d: %s [%.3f s / %.0f s]\n", out.ok ? "PASS" : "FAIL", id, title, secs, budget_s);
  if (!out.detail.empty()) std::printf("    %s\n", out.detail.c_str());
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

DamModel mm1(double rho1, double rho2, std::size_t level) {
  return DamModel(1.0, ServiceDistribution::exponential(1.0 / rho1), ServiceDistribution::exponential(1.0 / rho2),
                  level);
}

std::vector<ServiceDistribution> unit_mean_families() {
  return {ServiceDistribution::exponential(1.0), ServiceDistribution::erlang(3, 3.0),
          ServiceDistribution::gamma(0.6, 0.6), ServiceDistribution::deterministic(1.0),
          ServiceDistribution::hyperexponential({0.25, 0.75}, {0.5, 1.5})};
}

// 10^6-node scan, then 10^4 nodes across the two cells around the best node.
double grid_scan_argmin(const std::function<double(double)>& f, double lo, double hi) {
  auto scan = [&](double a, double b, int n) {
    double best = a, fbest = HUGE_VAL;
    for (int i = 0; i <= n; ++i) {
      const double x = a + (b - a) * i / n;
      const double v = f(x);
      if (v < fbest) fbest = v, best = x;
    }
    return best;
  };
  const int n = 1000000;
  const double h = (hi - lo) / n;
  const double x = scan(lo, hi, n);
  return scan(std::max(lo, x - h), std::min(hi, x + h), 10000);
}

}  // namespace

int main() {
  criterion(1, "M/M/1 closed form for busy-period counts", 1.0, [](Outcome& o) {
    double worst = 0;
    for (double rho : {0.5, 0.8, 1.0, 1.25}) {
      const auto q = busy_period_counts(mm1(rho, 0.5, 200));
      for (std::size_t n = 0; n <= 200; ++n) {
        const double closed = rho == 1.0 ? double(n + 1) : (1 - std::pow(rho, double(n + 1))) / (1 - rho);
        worst = std::max(worst, rel(q[n], closed));
      }
    }
    o.check(worst <= 1e-10, "relative error " + format_number(worst));
    o.note("max relative error " + format_number(worst));
  });

  criterion(2, "generating-function coefficients equal the recurrence", 1.0, [](Outcome& o) {
    double worst = 0;
    for (const auto& shape : unit_mean_families())
      for (double rho : {0.8, 1.0, 1.25}) {
        const auto b1 = scale_to_mean(shape, rho);
        const auto q = busy_period_counts(b1, 1.0, 100);
        const auto c = gf_coefficients(b1, 1.0, 100);
        for (std::size_t n = 0; n <= 100; ++n) worst = std::max(worst, rel(c[n], q[n]));
      }
    o.check(worst <= 1e-9, "relative error " + format_number(worst));
    o.note("max relative error " + format_number(worst));
  });

  criterion(3, "critical load: L p1 and L p2 at L = 2000", 1.0, [](Outcome& o) {
    const auto m = mm1(1.0, 0.5, 2000);
    const auto p = stationary_probs(m);
    const auto lim = critical_decay(m.rho12(), m.rho2());
    const double lp1 = 2000 * p.p1, lp2 = 2000 * p.p2;
    o.check(std::abs(lim.p1 - 1.0) < 1e-15 && std::abs(lim.p2 - 1.0) < 1e-15, "limits differ from 1");
    o.check(rel(lp1, 1.0) <= 0.01, "L p1 = " + format_number(lp1));
    o.check(rel(lp2, 1.0) <= 0.01, "L p2 = " + format_number(lp2));
    o.note("L p1 = " + format_number(lp1) + ", L p2 = " + format_number(lp2));
  });

  criterion(4, "supercritical load: p2 and p1 / 0.8^L at L = 200", 1.0, [](Outcome& o) {
    const auto m = mm1(1.25, 0.5, 200);
    const auto p = stationary_probs(m);
    const auto lim = supercritical(m);
    const double scaled = p.p1 / std::pow(0.8, 200.0);
    o.check(rel(p.p2, 1.0 / 6.0) <= 1e-3, "p2 = " + format_number(p.p2));
    o.check(rel(scaled, 0.133333) <= 1e-3, "p1/0.8^L = " + format_number(scaled));
    o.check(rel(lim.phi, 0.8) <= 1e-9, "root = " + format_number(lim.phi));
    o.check(rel(lim.p1_prefactor, 2.0 / 15.0) <= 1e-9, "prefactor = " + format_number(lim.p1_prefactor));
    o.check(rel(lim.p2_limit, 1.0 / 6.0) <= 1e-12, "p2 limit = " + format_number(lim.p2_limit));
    o.note("p2 = " + format_number(p.p2) + ", p1/0.8^L = " + format_number(scaled));
  });

  criterion(5, "upper heavy-traffic window against exact values", 5.0, [](Outcome& o) {
    VerifySpec spec;
    spec.regime = RegimeTag::HeavyUpper;
    spec.c_values = {0.5, 1.0, 2.0};
    const auto rows = verify_table(spec);
    for (const auto& s : summarize(rows, spec.regime)) {
      const std::string tag = "C=" + format_number(s.c);
      o.check(s.p1_rel_err <= 0.05 && s.p2_rel_err <= 0.05, tag + " error above 5%");
      o.check(s.p1_err_decreasing && s.p2_err_decreasing, tag + " error not decreasing in L");
      o.note(tag + " rel_err(p1, p2) at L=2000: " + format_number(s.p1_rel_err) + ", " +
             format_number(s.p2_rel_err));
    }
  });

  criterion(6, "lower heavy-traffic window: comparison table and discrepancy summary", 5.0, [](Outcome& o) {
    VerifySpec spec;
    spec.regime = RegimeTag::HeavyLower;
    spec.c_values = {0.5, 1.0, 2.0};
    const auto rows = verify_table(spec);
    o.check(rows.size() == 9, "expected 9 rows");
    std::printf("    L,delta,C,p1_exact,p1_asym,p1_rel_err,p2_exact,p2_asym,p2_rel_err\n");
    for (const auto& r : rows) {
      o.check(std::isfinite(r.p1_exact) && std::isfinite(r.p1_asym) && std::isfinite(r.p2_exact) &&
                  std::isfinite(r.p2_asym),
              "non-finite entry");
      std::printf("    %zu,%s,%s,%s,%s,%s,%s,%s,%s\n", r.level, format_number(r.delta).c_str(),
                  format_number(r.c).c_str(), format_number(r.p1_exact).c_str(), format_number(r.p1_asym).c_str(),
                  format_number(r.p1_rel_err).c_str(), format_number(r.p2_exact).c_str(),
                  format_number(r.p2_asym).c_str(), format_number(r.p2_rel_err).c_str());
    }
    for (const auto& line : summary_lines(summarize(rows, spec.regime))) std::printf("    summary: %s\n", line.c_str());
    o.note("the literal lower-window limit does not converge to the exact values; ratios above are reported, not gated");
  });

  criterion(7, "balanced costs: critical load is optimal", 30.0, [](Outcome& o) {
    for (double rho2 : {0.25, 0.5, 0.8}) {
      const double rho12 = 2.0;
      const CostModel costs(rho2 / (1 - rho2), 1.0);
      const auto s = optimize_asymptotic(costs, rho2, rho12, 2000, 1.0);
      o.check(s.regime == ControlRegime::Critical, "regime not critical at rho2=" + format_number(rho2));
      o.check(s.c_star == 0.0, "c_star = " + format_number(s.c_star));
      o.check(s.predicted_cost == costs.j1 * rho12, "predicted cost " + format_number(s.predicted_cost));
    }
    const auto shape = ServiceDistribution::exponential(1.0);
    const auto e = optimize_exact(1.0, shape, ServiceDistribution::exponential(2.0), 2000, CostModel(1, 1));
    o.check(std::abs(e.rho1_star - 1.0) <= 20.0 / 2000, "exact rho1* = " + format_number(e.rho1_star));
    o.note("exact rho1* at L=2000: " + format_number(e.rho1_star) + ", J = " + format_number(e.predicted_cost));
  });

  criterion(8, "limiting-cost minimizer agrees with a 10^6-point scan", 10.0, [](Outcome& o) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> cost(0.1, 5.0), load(0.1, 0.9), moment(0.5, 3.0);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const CostModel costs(cost(gen), cost(gen));
      const double rho2 = load(gen), rho12 = moment(gen);
      const auto s = optimize_asymptotic(costs, rho2, rho12, 1000, 1.0);
      std::function<double(double)> f;
      if (s.regime == ControlRegime::UpperPenalized)
        f = [&](double c) { return j_upper(c, rho12, rho2, costs); };
      else if (s.regime == ControlRegime::LowerPenalized)
        f = [&](double c) { return c > 0 ? j_lower(c, rho12, rho2, costs) : HUGE_VAL; };
      else
        continue;
      worst = std::max(worst, std::abs(s.c_star - grid_scan_argmin(f, 0.0, 10 * rho12)));
    }
    o.check(worst <= 1e-5, "max |C - C_scan| = " + format_number(worst));
    o.note("max |C - C_scan| = " + format_number(worst));
  });

  criterion(9, "simulation agrees with exact values and is reproducible", 60.0, [](Outcome& o) {
    const auto m = mm1(0.8, 0.5, 5);
    // closed form: Q_5 = (1 - 0.8^6) / 0.2
    const double q = (1 - std::pow(0.8, 6.0)) / 0.2;
    const double p1 = 0.5 / (1 + 0.3 * q), p2 = (0.5 - 0.1 * q) / (1 + 0.3 * q);
    SimulationConfig c{m};
    c.n_cycles = 1000000;
    c.seed = 20240917;
    const auto r = simulate(c);
    o.check(r.p1.covers(p1, 3), "p1_hat " + format_number(r.p1.value) + " +- " + format_number(r.p1.half_width));
    o.check(r.p2.covers(p2, 3), "p2_hat " + format_number(r.p2.value) + " +- " + format_number(r.p2.half_width));
    o.check(r.p1.covers(0.237329, 3) && r.p2.covers(0.062215, 3), "rounded reference values not covered");
    const auto again = simulate(c);
    o.check(json(r).dump() == json(again).dump(), "reports differ between identical runs");
    o.note("p1_hat = " + format_number(r.p1.value) + " +- " + format_number(r.p1.half_width) +
           " (exact " + format_number(p1) + "), p2_hat = " + format_number(r.p2.value) + " +- " +
           format_number(r.p2.half_width) + " (exact " + format_number(p2) + ")");
  });

  criterion(10, "invariants: weights, identity chain, renewal reward, monotone J_upper", 10.0, [](Outcome& o) {
    for (const auto& shape : unit_mean_families())
      for (double rho : {0.5, 1.0, 1.5}) {
        const auto b1 = scale_to_mean(shape, rho);
        const auto r = mixed_poisson_weights_to_tail(b1, 1.0, 1e-13);
        double total = 0, first = 0, second = 0;
        for (std::size_t j = 0; j < r.size(); ++j) {
          total += r[j];
          first += double(j) * r[j];
          second += double(j) * double(j - 1) * r[j];
        }
        o.check(std::abs(total - 1) <= 1e-10, "weights do not sum to 1");
        o.check(rel(first, rho) <= 1e-9, "first factorial moment differs from rho1");
        o.check(rel(second, normalized_moment(b1, 1.0, 2)) <= 1e-8, "second factorial moment differs from rho12");

        const DamModel m(1.0, b1, ServiceDistribution::erlang(2, 5.0), 40);
        const auto b = busy_period_metrics(m);
        o.check(rel(b.e_t + 1.0, b.e_nu()) <= 1e-9, "identity chain");
        const auto p = stationary_probs(m);
        const double cycle = b.e_t + b.e_idle;
        o.check(std::abs(p.p1 - b.e_idle / cycle) <= 1e-12 && std::abs(p.p2 - b.e_t2 / cycle) <= 1e-12,
                "renewal-reward ratios");
      }
    for (double rho2 : {0.2, 0.5, 0.8})
      for (double rho12 : {0.5, 2.0, 3.0}) {
        const CostModel costs(rho2 / (1 - rho2), 1.0);
        double prev = -HUGE_VAL;
        for (int i = 0; i <= 2000; ++i) {
          const double v = j_upper(i * 0.01, rho12, rho2, costs);
          o.check(v >= prev - 1e-12 * std::abs(v), "J_upper decreases");
          prev = v;
        }
      }
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
