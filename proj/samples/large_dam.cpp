// A tall dam (L = 2000) with Erlang-2 release below the level and faster
// exponential release above it.  Prints the exact probabilities across the
// heavy-traffic window, the limiting forms next to them, and the optimal
// load under two cost settings.

#include <cstdio>

#include "damctl/asymptotics.hpp"
#include "damctl/control.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/io.hpp"

using namespace damctl;

int main() {
  const double lambda = 1.0;
  const std::size_t level = 2000;
  const auto shape = ServiceDistribution::erlang(2, 2.0);
  const auto b2 = ServiceDistribution::exponential(2.5);
  const double rho2 = lambda * mean(b2);
  const double rho12 = rho12_tilde(shape, lambda);

  std::printf("rho2 = %s, rho12 at critical load = %s\n\n", format_number(rho2).c_str(),
              format_number(rho12).c_str());
  std::printf("%8s %16s %16s %16s %16s\n", "C", "L p1 exact", "L p1 limit", "L p2 exact", "L p2 limit");
  for (double c : {0.0, 0.25, 1.0, 4.0}) {
    const double delta = c / double(level);
    const DamModel m(lambda, scale_to_mean(shape, (1.0 + delta) / lambda), b2, level);
    const auto p = stationary_probs(m);
    const auto lim = c == 0.0 ? critical_decay(rho12, rho2) : [&] {
      const auto h = heavy_upper(delta, c, rho12, rho2);
      return ProbLimits{h.p1 * double(level), h.p2 * double(level)};
    }();
    std::printf("%8s %16s %16s %16s %16s\n", format_number(c).c_str(), format_number(level * p.p1).c_str(),
                format_number(lim.p1).c_str(), format_number(level * p.p2).c_str(), format_number(lim.p2).c_str());
  }

  for (const CostModel costs : {CostModel(rho2 / (1 - rho2), 1.0), CostModel(2.0, 1.0)}) {
    const auto a = optimize_asymptotic(costs, rho2, rho12, level, lambda);
    ExactControlOptions opts;
    opts.rho1_min = 0.98;
    opts.rho1_max = 1.02;
    opts.grid_points = 64;
    const auto e = optimize_exact(lambda, shape, b2, level, costs, opts);
    std::printf("\nj1 = %s, j2 = %s: %s\n", format_number(costs.j1).c_str(), format_number(costs.j2).c_str(),
                to_string(a.regime));
    std::printf("  limiting: C* = %s, rho1* = %s, J = %s\n", format_number(a.c_star).c_str(),
                format_number(a.rho1_star).c_str(), format_number(a.predicted_cost).c_str());
    std::printf("  exact:    C  = %s, rho1* = %s, J = %s\n", format_number(e.c_star).c_str(),
                format_number(e.rho1_star).c_str(), format_number(e.predicted_cost).c_str());
  }
}
