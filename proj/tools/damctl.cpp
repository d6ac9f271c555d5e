// damctl: exact metrics, limiting forms, optimal control and simulation of
// the two-law M/GI/1 dam.
//
// Every setting can come from a JSON config file (--config) or a flag; flags
// win.  Exit status: 0 success, 2 configuration error, 3 numeric failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "damctl/asymptotics.hpp"
#include "damctl/control.hpp"
#include "damctl/exact_analytics.hpp"
#include "damctl/io.hpp"
#include "damctl/report.hpp"
#include "damctl/simulator.hpp"
#include "damctl/verification.hpp"

using namespace damctl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// Flag values are kept as text and merged over the config file, keyed by the
// config-file name of the setting.
struct Settings {
  std::string config_path;
  std::list<std::pair<std::string, std::string>> flag_text;
  std::list<std::pair<std::string, CLI::Option*>> flags;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = flag_text.emplace_back(key, std::string{});
    flags.emplace_back(key, app->add_option(flag, slot.second, help));
  }

  json resolve() const {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw damctl::invalid_argument("cannot read config file '" + config_path + "'");
      try {
        cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        throw damctl::invalid_argument("config file '" + config_path + "' is not valid JSON: " + e.what());
      }
      if (!cfg.is_object()) throw damctl::invalid_argument("config file must hold a JSON object");
    }
    auto text = flag_text.begin();
    for (auto it = flags.begin(); it != flags.end(); ++it, ++text)
      if (it->second->count() > 0) cfg[text->first] = text->second;
    return cfg;
  }
};

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  for (auto& ch : f)
    if (ch == '_') ch = '-';
  return f;
}

[[noreturn]] void missing(const std::string& key) {
  throw damctl::invalid_argument("missing required field '" + key + "' (set " + flag_name(key) + " or \"" + key +
                                 "\" in the config file)");
}

bool has(const json& cfg, const std::string& key) { return cfg.contains(key) && !cfg.at(key).is_null(); }

double number(const json& cfg, const std::string& key) {
  if (!has(cfg, key)) missing(key);
  const auto& v = cfg.at(key);
  if (v.is_string()) return detail::parse_double(v.get<std::string>(), key);
  try {
    return number_from_json(v);
  } catch (const damctl::invalid_argument&) {
    throw damctl::invalid_argument("field '" + key + "' must be a number");
  }
}

double number_or(const json& cfg, const std::string& key, double fallback) {
  return has(cfg, key) ? number(cfg, key) : fallback;
}

std::uint64_t count_value(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::uint64_t out = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return out;
  }
  throw damctl::invalid_argument("field '" + key + "' must be a nonnegative integer");
}

std::uint64_t count(const json& cfg, const std::string& key) {
  if (!has(cfg, key)) missing(key);
  return count_value(cfg.at(key), key);
}

std::uint64_t count_or(const json& cfg, const std::string& key, std::uint64_t fallback) {
  return has(cfg, key) ? count(cfg, key) : fallback;
}

std::string text_or(const json& cfg, const std::string& key, const std::string& fallback) {
  if (!has(cfg, key)) return fallback;
  if (!cfg.at(key).is_string()) throw damctl::invalid_argument("field '" + key + "' must be a string");
  return cfg.at(key).get<std::string>();
}

ServiceDistribution distribution(const json& cfg, const std::string& key) {
  if (!has(cfg, key)) missing(key);
  try {
    return cfg.at(key).get<ServiceDistribution>();
  } catch (const std::invalid_argument& e) {
    throw damctl::invalid_argument("field '" + key + "': " + e.what());
  } catch (const json::exception& e) {
    throw damctl::invalid_argument("field '" + key + "': " + e.what());
  }
}

// A JSON array, or comma-separated text from a flag.
std::vector<json> list(const json& cfg, const std::string& key) {
  if (!has(cfg, key)) missing(key);
  const auto& v = cfg.at(key);
  if (v.is_array()) return v.get<std::vector<json>>();
  if (v.is_string()) {
    std::vector<json> out;
    const auto s = v.get<std::string>();
    if (s.empty()) return out;
    for (auto part : detail::split(s, ',')) out.emplace_back(std::string(part));
    return out;
  }
  return {v};
}

std::vector<double> number_list(const json& cfg, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : list(cfg, key))
    out.push_back(v.is_string() ? detail::parse_double(v.get<std::string>(), key) : number_from_json(v));
  return out;
}

std::vector<std::size_t> level_list(const json& cfg, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& v : list(cfg, key)) out.push_back(count_value(v, key));
  return out;
}

CostModel costs(const json& cfg) { return CostModel(number_or(cfg, "j1", 1.0), number_or(cfg, "j2", 1.0)); }

std::size_t level(const json& cfg) {
  const auto l = count(cfg, "level");
  detail::require(l >= 1, "level must be at least 1");
  return l;
}

DamModel model(const json& cfg) {
  const double lambda = number(cfg, "lambda");
  const auto b1 = distribution(cfg, "b1");
  const auto b2 = distribution(cfg, "b2");
  return DamModel(lambda, b1, b2, level(cfg));
}

// Config value < DAMCTL_PRECISION < --precision.
RecurrenceOptions recurrence(const json& cfg, const CLI::Option* flag) {
  RecurrenceOptions opts;
  auto parse = [](const std::string& s, const std::string& what) {
    unsigned v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw damctl::invalid_argument(what + " must be a nonnegative integer, got '" + s + "'");
    return v;
  };
  const bool from_flag = flag != nullptr && flag->count() > 0;
  if (!from_flag) {
    if (const char* env = std::getenv("DAMCTL_PRECISION"); env != nullptr && *env != '\0') {
      opts.extended_digits = parse(env, "DAMCTL_PRECISION");
      return opts;
    }
  }
  if (has(cfg, "precision")) opts.extended_digits = static_cast<unsigned>(count(cfg, "precision"));
  return opts;
}

std::string format_of(const json& cfg, std::initializer_list<const char*> allowed) {
  const auto f = text_or(cfg, "format", *allowed.begin());
  for (const char* a : allowed)
    if (f == a) return f;
  std::string names;
  for (const char* a : allowed) names += std::string(names.empty() ? "" : "|") + a;
  throw damctl::invalid_argument("format must be one of " + names + ", got '" + f + "'");
}

void emit(const json& cfg, const std::string& content) {
  const auto path = text_or(cfg, "out", "");
  if (path.empty()) {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw damctl::invalid_argument("cannot write output file '" + path + "'");
  out << content;
}

// Aligned "name value" lines.
class TextRecord {
 public:
  TextRecord& add(const std::string& name, const std::string& value) {
    rows_.emplace_back(name, value);
    return *this;
  }
  TextRecord& add(const std::string& name, double value) { return add(name, format_number(value)); }

  std::string str() const {
    std::size_t width = 0;
    for (const auto& r : rows_) width = std::max(width, r.first.size());
    std::ostringstream os;
    for (const auto& r : rows_) os << r.first << std::string(width + 2 - r.first.size(), ' ') << r.second << '\n';
    return os.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string csv_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + '\n';
}

// Commands --------------------------------------------------------------------

void run_analyze(const json& cfg, const CLI::Option* precision) {
  const auto fmt = format_of(cfg, {"json", "text"});
  const auto r = analyze(model(cfg), costs(cfg), recurrence(cfg, precision));
  if (fmt == "json") {
    emit(cfg, json(r).dump(2) + '\n');
    return;
  }
  TextRecord t;
  t.add("lambda", r.model.lambda())
      .add("b1", format_distribution(r.model.b1()))
      .add("b2", format_distribution(r.model.b2()))
      .add("level", std::to_string(r.model.level()))
      .add("j1", r.costs.j1)
      .add("j2", r.costs.j2)
      .add("precision_digits", std::to_string(r.precision_digits))
      .add("rho1", r.rho1)
      .add("rho2", r.rho2)
      .add("q_level", r.q_level)
      .add("e_nu2", r.e_nu2)
      .add("e_t1", r.e_t1)
      .add("e_t2", r.e_t2)
      .add("p1", r.p1)
      .add("p2", r.p2)
      .add("cost", r.cost);
  emit(cfg, t.str());
}

void run_optimize(const json& cfg, const CLI::Option* precision) {
  const auto fmt = format_of(cfg, {"json", "text"});
  const auto mode = control_mode_from_string(text_or(cfg, "mode", "asymptotic"));
  const double lambda = number(cfg, "lambda");
  detail::require(lambda > 0, "lambda must be positive");
  const auto shape = distribution(cfg, "b1");
  const auto b2 = distribution(cfg, "b2");
  const auto l = level(cfg);
  const auto c = costs(cfg);
  const double rho2 = lambda * mean(b2);
  detail::require(rho2 < 1, "rho2 = lambda * mean(b2) must be below 1");

  ControlSolution sol;
  if (mode == ControlMode::Asymptotic) {
    AsymptoticControlOptions opts;
    if (has(cfg, "c_max")) opts.c_max = number(cfg, "c_max");
    opts.grid_points = count_or(cfg, "grid_points", opts.grid_points);
    sol = optimize_asymptotic(c, rho2, rho12_tilde(shape, lambda), l, lambda, opts);
  } else {
    ExactControlOptions opts;
    opts.rho1_min = number_or(cfg, "rho1_min", opts.rho1_min);
    opts.rho1_max = number_or(cfg, "rho1_max", opts.rho1_max);
    opts.grid_points = count_or(cfg, "grid_points", opts.grid_points);
    opts.recurrence = recurrence(cfg, precision);
    sol = optimize_exact(lambda, shape, b2, l, c, opts);
  }
  if (fmt == "json") {
    emit(cfg, json(sol).dump(2) + '\n');
    return;
  }
  TextRecord t;
  t.add("mode", to_string(sol.mode))
      .add("regime", to_string(sol.regime))
      .add("c_star", sol.c_star)
      .add("delta_star", sol.delta_star)
      .add("rho1_star", sol.rho1_star)
      .add("b1_star", sol.b1_star)
      .add("predicted_cost", sol.predicted_cost);
  emit(cfg, t.str());
}

void run_verify(const json& cfg, const CLI::Option* precision) {
  const auto fmt = format_of(cfg, {"csv", "json"});
  VerifySpec spec;
  spec.regime = regime_from_string(text_or(cfg, "regime", "critical"));
  spec.lambda = number(cfg, "lambda");
  detail::require(spec.lambda > 0, "lambda must be positive");
  spec.b1 = distribution(cfg, "b1");
  spec.b2 = distribution(cfg, "b2");
  if (has(cfg, "levels")) spec.levels = level_list(cfg, "levels");
  if (has(cfg, "c_values")) spec.c_values = number_list(cfg, "c_values");
  spec.recurrence = recurrence(cfg, precision);
  detail::require(spec.lambda * mean(spec.b2) < 1, "rho2 = lambda * mean(b2) must be below 1");

  const auto rows = verify_table(spec);
  const auto lines = summary_lines(summarize(rows, spec.regime));
  if (fmt == "json") {
    emit(cfg, json{{"regime", to_string(spec.regime)}, {"rows", rows}, {"summary", lines}}.dump(2) + '\n');
    return;
  }
  std::string out = csv_row({"L", "delta", "C", "p1_exact", "p1_asym", "p1_rel_err", "p2_exact", "p2_asym",
                             "p2_rel_err"});
  for (const auto& r : rows)
    out += csv_row({std::to_string(r.level), format_number(r.delta), format_number(r.c), format_number(r.p1_exact),
                    format_number(r.p1_asym), format_number(r.p1_rel_err), format_number(r.p2_exact),
                    format_number(r.p2_asym), format_number(r.p2_rel_err)});
  emit(cfg, out);
  for (const auto& line : lines) std::cerr << "# " << line << '\n';
}

void run_simulate(const json& cfg, const CLI::Option* precision) {
  const auto fmt = format_of(cfg, {"json", "text"});
  SimulationConfig sc{model(cfg)};
  sc.n_cycles = count_or(cfg, "cycles", sc.n_cycles);
  sc.seed = count_or(cfg, "seed", sc.seed);
  sc.batch_count = count_or(cfg, "batches", sc.batch_count);
  sc.validate();
  const SimulationComparison cmp{sc.model, simulate(sc), exact_targets(sc.model, recurrence(cfg, precision))};
  if (fmt == "json") {
    emit(cfg, json(cmp).dump(2) + '\n');
    return;
  }
  const auto& r = cmp.report;
  std::string out = TextRecord()
                        .add("seed", std::to_string(r.seed))
                        .add("cycles", std::to_string(r.cycles))
                        .add("batches", std::to_string(r.batch_count))
                        .str();
  std::vector<std::vector<std::string>> table{{"quantity", "estimate", "half_width", "exact"}};
  auto row = [&](const char* name, const Estimate& e, std::optional<double> exact) {
    table.push_back({name, format_number(e.value), format_number(e.half_width),
                     exact ? format_number(*exact) : std::string("-")});
  };
  row("p1", r.p1, cmp.exact.p1);
  row("p2", r.p2, cmp.exact.p2);
  row("occupancy_above", r.occupancy_above, std::nullopt);
  row("e_nu1", r.e_nu1, cmp.exact.e_nu1);
  row("e_nu2", r.e_nu2, cmp.exact.e_nu2);
  row("e_t1", r.e_t1, cmp.exact.e_t1);
  row("e_t2", r.e_t2, cmp.exact.e_t2);
  std::vector<std::size_t> width(4, 0);
  for (const auto& t : table)
    for (std::size_t i = 0; i < 4; ++i) width[i] = std::max(width[i], t[i].size());
  for (const auto& t : table) {
    std::string line;
    for (std::size_t i = 0; i < 4; ++i) line += t[i] + (i < 3 ? std::string(width[i] + 2 - t[i].size(), ' ') : "");
    out += line + '\n';
  }
  emit(cfg, out);
}

void run_sweep(const json& cfg) {
  const auto fmt = format_of(cfg, {"csv", "json"});
  const double lambda = number(cfg, "lambda");
  detail::require(lambda > 0, "lambda must be positive");
  const auto shape = distribution(cfg, "b1");
  const double rho2 = lambda * mean(distribution(cfg, "b2"));
  detail::require(rho2 < 1, "rho2 = lambda * mean(b2) must be below 1");
  const double rho12 = rho12_tilde(shape, lambda);

  std::vector<double> grid;
  if (has(cfg, "c_grid")) {
    grid = number_list(cfg, "c_grid");
  } else {
    const double c_max = number_or(cfg, "c_max", 10.0 * rho12);
    const auto points = count_or(cfg, "c_points", 101);
    detail::require(c_max > 0, "c_max must be positive");
    for (std::uint64_t i = 0; i < points; ++i)
      grid.push_back(points == 1 ? 0.0 : c_max * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  detail::require(!grid.empty(), "C grid is empty");
  const auto curve = cost_curves(grid, rho12, rho2, costs(cfg));
  if (fmt == "json") {
    emit(cfg, json(curve).dump(2) + '\n');
    return;
  }
  std::string out = csv_row({"C", "J_upper", "J_lower"});
  for (const auto& p : curve) out += csv_row({format_number(p.c), format_number(p.j_upper), format_number(p.j_lower)});
  emit(cfg, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold control of a two-law M/GI/1 dam"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    Settings settings;
    CLI::Option* precision = nullptr;
  };
  std::list<Command> commands;

  auto make = [&](const char* name, const char* help) -> Command& {
    auto& c = commands.emplace_back(Command{app.add_subcommand(name, help), {}, nullptr});
    auto& s = c.settings;
    c.app->add_option("--config", s.config_path, "JSON config file; flags override its values");
    s.add(c.app, "--lambda", "lambda", "arrival rate");
    s.add(c.app, "--b1", "b1", "service law at or below the level, e.g. exp:1.25, erlang:2:2, det:0.8");
    s.add(c.app, "--b2", "b2", "service law above the level");
    s.add(c.app, "--j1", "j1", "cost per unit level of reaching the lower level (default 1)");
    s.add(c.app, "--j2", "j2", "cost per unit level of exceeding the level (default 1)");
    s.add(c.app, "--format", "format", "output format");
    s.add(c.app, "--out", "out", "write output to this file instead of standard output");
    return c;
  };
  auto with_precision = [](Command& c) {
    c.settings.add(c.app, "--precision", "precision",
                   "decimal digits of the extended-precision recurrence; 0 for double (env DAMCTL_PRECISION)");
    c.precision = c.settings.flags.back().second;
  };

  auto& analyze_cmd = make("analyze", "exact busy-period metrics, stationary probabilities and cost");
  analyze_cmd.settings.add(analyze_cmd.app, "--level", "level", "level L");
  with_precision(analyze_cmd);

  auto& optimize_cmd = make("optimize", "optimal load of the below-level service law");
  auto& os = optimize_cmd.settings;
  os.add(optimize_cmd.app, "--level", "level", "level L");
  os.add(optimize_cmd.app, "--mode", "mode", "asymptotic (default) or exact");
  os.add(optimize_cmd.app, "--c-max", "c_max", "asymptotic mode: upper end of the C search");
  os.add(optimize_cmd.app, "--rho1-min", "rho1_min", "exact mode: lower end of the rho1 search (default 0.5)");
  os.add(optimize_cmd.app, "--rho1-max", "rho1_max", "exact mode: upper end of the rho1 search (default 1.5)");
  os.add(optimize_cmd.app, "--grid-points", "grid_points", "coarse grid size before golden-section refinement");
  with_precision(optimize_cmd);

  auto& verify_cmd = make("verify", "exact probabilities next to their limiting forms (CSV)");
  auto& vs = verify_cmd.settings;
  vs.add(verify_cmd.app, "--regime", "regime", "critical, subcritical, supercritical, upper or lower");
  vs.add(verify_cmd.app, "--levels", "levels", "comma-separated levels (default 500,1000,2000)");
  vs.add(verify_cmd.app, "--c", "c_values", "comma-separated C values for upper/lower (default 1)");
  with_precision(verify_cmd);

  auto& simulate_cmd = make("simulate", "regenerative simulation next to the exact values");
  auto& ss = simulate_cmd.settings;
  ss.add(simulate_cmd.app, "--level", "level", "level L");
  ss.add(simulate_cmd.app, "--cycles", "cycles", "regeneration cycles (default 100000)");
  ss.add(simulate_cmd.app, "--seed", "seed", "64-bit seed (default 1)");
  ss.add(simulate_cmd.app, "--batches", "batches", "batches for confidence intervals (default 32)");
  with_precision(simulate_cmd);

  auto& sweep_cmd = make("sweep", "limiting cost curves J_upper, J_lower over a C grid (CSV)");
  auto& ws = sweep_cmd.settings;
  ws.add(sweep_cmd.app, "--c-grid", "c_grid", "comma-separated C values");
  ws.add(sweep_cmd.app, "--c-max", "c_max", "uniform grid on [0, c-max] when --c-grid is absent");
  ws.add(sweep_cmd.app, "--c-points", "c_points", "points of the uniform grid (default 101)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto& c : commands) {
      if (!c.app->parsed()) continue;
      const json cfg = c.settings.resolve();
      const std::string name = c.app->get_name();
      if (name == "analyze") run_analyze(cfg, c.precision);
      if (name == "optimize") run_optimize(cfg, c.precision);
      if (name == "verify") run_verify(cfg, c.precision);
      if (name == "simulate") run_simulate(cfg, c.precision);
      if (name == "sweep") run_sweep(cfg);
    }
  } catch (const numeric_error& e) {
    std::cerr << "damctl: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "damctl: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "damctl: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "damctl: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "damctl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
