#pragma once

// Regenerative discrete-event simulation of the state-dependent M/GI/1
// queue.  A cycle is an idle period followed by a busy period; cycles are
// i.i.d., and cycle c draws all its randomness from counter stream
// (seed, c), so a run is reproducible bit for bit and any subset of cycles
// can be recomputed independently.

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdint>
#include <future>
#include <vector>

#include "damctl/distributions.hpp"
#include "damctl/errors.hpp"
#include "damctl/model.hpp"
#include "damctl/random.hpp"

namespace damctl {

struct SimulationConfig {
  DamModel model;
  std::uint64_t n_cycles = 100000;
  std::uint64_t seed = 1;
  std::uint64_t batch_count = 32;

  void validate() const {
    detail::require(batch_count >= 2, "batch_count must be at least 2");
    detail::require(n_cycles >= batch_count, "n_cycles must be at least batch_count");
  }
};

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;  // 95% confidence half-width

  bool covers(double x, double widths = 1.0) const { return std::abs(x - value) <= widths * half_width; }

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct SimulationReport {
  Estimate p1;               // fraction of time empty
  Estimate p2;               // fraction of time serving above-level (B2) customers
  Estimate occupancy_above;  // fraction of time with more than L in system
  Estimate e_nu1;
  Estimate e_nu2;
  Estimate e_t1;
  Estimate e_t2;
  std::uint64_t cycles = 0;
  std::uint64_t seed = 0;
  std::uint64_t batch_count = 0;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

/// Per-cycle observables.  Service counts are integers; `busy_time` is the
/// clock advance over the busy period, accumulated independently of the
/// per-law service totals.
struct CycleRecord {
  double idle_time = 0.0;
  double busy_time = 0.0;
  double time_below = 0.0;  // total duration of B1 services
  double time_above = 0.0;  // total duration of B2 services
  double occupancy_above = 0.0;
  std::uint64_t services = 0;
  std::uint64_t services_below = 0;
  std::uint64_t services_above = 0;

  double cycle_time() const { return idle_time + busy_time; }
};

namespace detail {

inline double draw_service(CounterStream& rng, const ServiceDistribution& d) {
  return std::visit(overloaded{[&](const Exponential& e) { return rng.exponential(e.rate); },
                               [&](const Erlang& e) {
                                 double s = 0.0;
                                 for (int i = 0; i < e.shape; ++i) s += rng.exponential(e.rate);
                                 return s;
                               },
                               [&](const Gamma& g) { return rng.standard_gamma(g.shape) / g.rate; },
                               [&](const Deterministic& c) { return c.duration; },
                               [&](const HyperExponential& h) {
                                 const double u = rng.uniform();
                                 double acc = 0.0;
                                 std::size_t i = 0;
                                 for (; i + 1 < h.weights.size(); ++i) {
                                   acc += h.weights[i];
                                   if (u < acc) break;
                                 }
                                 return rng.exponential(h.rates[i]);
                               }},
                    d.law());
}

}  // namespace detail

/// One regeneration cycle, starting from an empty system.
inline CycleRecord simulate_cycle(const DamModel& model, std::uint64_t seed, std::uint64_t cycle) {
  CounterStream rng(seed, cycle);
  const double lambda = model.lambda();
  const std::size_t level = model.level();
  CycleRecord rec;
  rec.idle_time = rng.exponential(lambda);

  std::size_t in_system = 1;
  double clock = 0.0;
  double to_arrival = rng.exponential(lambda);
  while (in_system > 0) {
    const bool below = in_system <= level;
    const double s = detail::draw_service(rng, below ? model.b1() : model.b2());
    ++rec.services;
    if (below) {
      ++rec.services_below;
      rec.time_below += s;
    } else {
      ++rec.services_above;
      rec.time_above += s;
    }
    // Arrivals during the service; on an exact tie the departure goes first.
    double elapsed = 0.0;
    while (to_arrival < s - elapsed) {
      if (in_system > level) rec.occupancy_above += to_arrival;
      elapsed += to_arrival;
      ++in_system;
      to_arrival = rng.exponential(lambda);
    }
    const double rest = s - elapsed;
    if (in_system > level) rec.occupancy_above += rest;
    to_arrival -= rest;
    clock += s;
    --in_system;
  }
  rec.busy_time = clock;
  return rec;
}

namespace detail {

struct BatchTotals {
  double cycle_time = 0, idle = 0, above_service = 0, occupancy = 0, t1 = 0, t2 = 0;
  double nu1 = 0, nu2 = 0;
  std::uint64_t cycles = 0;

  void add(const CycleRecord& r) {
    cycle_time += r.cycle_time();
    idle += r.idle_time;
    above_service += r.time_above;
    occupancy += r.occupancy_above;
    t1 += r.time_below;
    t2 += r.time_above;
    nu1 += static_cast<double>(r.services_below);
    nu2 += static_cast<double>(r.services_above);
    ++cycles;
  }
};

inline Estimate batch_estimate(const std::vector<double>& batch_values, double pooled) {
  const auto b = static_cast<double>(batch_values.size());
  double ss = 0.0;
  double m = 0.0;
  for (double v : batch_values) m += v;
  m /= b;
  for (double v : batch_values) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / (b - 1.0));
  const boost::math::students_t t(b - 1.0);
  const double q = boost::math::quantile(t, 0.975);
  return {pooled, q * sd / std::sqrt(b)};
}

}  // namespace detail

/// Runs `n_cycles` cycles split into `batch_count` contiguous batches.
/// Ratio estimators pool all cycles; half-widths come from the spread of the
/// per-batch estimates (Student t, batch_count - 1 degrees of freedom).
inline SimulationReport simulate(const SimulationConfig& config) {
  config.validate();
  const std::uint64_t nb = config.batch_count;
  std::vector<detail::BatchTotals> batches(nb);
  const std::uint64_t base = config.n_cycles / nb, extra = config.n_cycles % nb;
  std::uint64_t cycle = 0;
  for (std::uint64_t b = 0; b < nb; ++b) {
    const std::uint64_t size = base + (b < extra ? 1 : 0);
    for (std::uint64_t i = 0; i < size; ++i, ++cycle)
      batches[b].add(simulate_cycle(config.model, config.seed, cycle));
  }

  detail::BatchTotals all;
  for (const auto& b : batches) {
    all.cycle_time += b.cycle_time;
    all.idle += b.idle;
    all.above_service += b.above_service;
    all.occupancy += b.occupancy;
    all.t1 += b.t1;
    all.t2 += b.t2;
    all.nu1 += b.nu1;
    all.nu2 += b.nu2;
    all.cycles += b.cycles;
  }

  auto make = [&](auto per_batch, double pooled) {
    std::vector<double> v;
    v.reserve(nb);
    for (const auto& b : batches) v.push_back(per_batch(b));
    return detail::batch_estimate(v, pooled);
  };
  const double n = static_cast<double>(all.cycles);
  using B = detail::BatchTotals;
  SimulationReport rep;
  rep.p1 = make([](const B& b) { return b.idle / b.cycle_time; }, all.idle / all.cycle_time);
  rep.p2 = make([](const B& b) { return b.above_service / b.cycle_time; }, all.above_service / all.cycle_time);
  rep.occupancy_above =
      make([](const B& b) { return b.occupancy / b.cycle_time; }, all.occupancy / all.cycle_time);
  rep.e_nu1 = make([](const B& b) { return b.nu1 / double(b.cycles); }, all.nu1 / n);
  rep.e_nu2 = make([](const B& b) { return b.nu2 / double(b.cycles); }, all.nu2 / n);
  rep.e_t1 = make([](const B& b) { return b.t1 / double(b.cycles); }, all.t1 / n);
  rep.e_t2 = make([](const B& b) { return b.t2 / double(b.cycles); }, all.t2 / n);
  rep.cycles = all.cycles;
  rep.seed = config.seed;
  rep.batch_count = nb;
  return rep;
}

/// Element-wise simulate.  Each element keeps its own seed (its cycles use
/// streams (seed, cycle index)), so results do not depend on list order or
/// on how elements are scheduled.
inline std::vector<SimulationReport> sweep_simulate(const std::vector<SimulationConfig>& configs) {
  detail::require(!configs.empty(), "sweep needs at least one configuration");
  for (const auto& c : configs) c.validate();
  std::vector<std::future<SimulationReport>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, [&c] { return simulate(c); }));
  std::vector<SimulationReport> out;
  out.reserve(configs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace damctl
