#include <cstdio>
#include <iostream>
#include <numeric>
#include <optional>

#include "CLI11.hpp"
#include "adaptloop/config.hpp"
#include "adaptloop/landscape.hpp"
#include "adaptloop/report.hpp"
#include "adaptloop/scenarios.hpp"

namespace al = adaptloop;
using nlohmann::ordered_json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

void print_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << '\n';
}

al::RunConfig load_with_overrides(const std::string& path, const std::optional<std::string>& out) {
  al::RunConfig c = al::load_config(path);
  if (out) c.output_dir = *out;
  return c;
}

int cmd_landscape(int n, int k, std::uint64_t seed, bool stats, int walk_length) {
  if (n < 1 || n > al::kMaxLoci) throw al::ConfigError("'n' violates bound: 1 <= n <= 24", "n");
  if (k < 0 || k > n - 1) throw al::ConfigError("'k' violates bound: 0 <= k <= n-1", "k");
  const auto land = al::Landscape::generate_nk(n, k, seed);
  ordered_json j = ordered_json::parse(land.to_json());
  if (stats) {
    const auto maxima = al::local_extrema(land, al::ExtremumKind::kMaxima);
    const auto minima = al::local_extrema(land, al::ExtremumKind::kMinima);
    const auto rug = al::ruggedness_autocorrelation(land, walk_length, seed);
    double best = maxima.front().fitness;
    for (const auto& m : maxima) best = std::max(best, m.fitness);
    ordered_json s;
    s["local_maxima"] = maxima.size();
    s["local_minima"] = minima.size();
    s["global_max_fitness"] = best;
    s["ruggedness_walk_length"] = walk_length;
    s["ruggedness_rho"] = rug.zero_variance ? ordered_json(nullptr) : ordered_json(rug.rho);
    s["zero_variance"] = rug.zero_variance;
    j["stats"] = s;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& controller,
                 const std::optional<std::uint64_t>& seed, const std::optional<long>& steps,
                 const std::optional<std::string>& out) {
  al::RunConfig c = load_with_overrides(config_path, out);
  if (controller) c.controller = *controller;
  if (seed) c.seed = *seed;
  if (steps) c.steps = *steps;
  al::validate(c);
  const std::string echo = al::serialize_config(c);
  const double level = c.setup.engine.optimal_performance;

  std::vector<std::filesystem::path> paths;
  if (c.scenario.kind == "practice" || c.scenario.kind == "practice_nonstationary") {
    const bool ns = c.scenario.kind == "practice_nonstationary";
    auto result = al::run_practice(c.practice, c.setup, c.seed, ns);
    result.trace.header.config_json = echo;
    ordered_json extra;
    extra["trial_times"] = result.trial_times;
    extra["power_law"] = {{"a", result.fit.a}, {"b", result.fit.b},
                          {"r_squared", result.fit.r_squared}};
    paths = al::write_outputs(result.trace, c.output_dir, level, extra);
    std::cout << "power law: a=" << al::format_number(result.fit.a)
              << " b=" << al::format_number(result.fit.b)
              << " r2=" << al::format_number(result.fit.r_squared) << '\n';
  } else {
    const auto script = al::selected_scenario(c);
    auto trace = al::run_closed_loop(script, al::controller_by_name(c, c.controller), c.setup,
                                     c.seed, c.steps, c.dt);
    trace.header.config_json = echo;
    paths = al::write_outputs(trace, c.output_dir, level);
    const auto m = al::run_metrics(trace, level, c.setup.engine.regime);
    std::cout << "time in optimal band: " << al::format_number(m.time_in_optimal) << '\n';
  }
  print_paths(paths);
  return 0;
}

int cmd_four_step(const std::string& config_path, const std::string& out) {
  al::RunConfig c = load_with_overrides(config_path, out);
  const auto result = al::run_four_step(c.four_step, c.setup, c.seed);
  const auto expected = al::four_step(c.four_step).expected_gauges;
  auto trace = result.trace;
  trace.header.config_json = al::serialize_config(c);
  ordered_json extra;
  extra["segments"] = ordered_json::array();
  const char* labels[3] = {"A", "B", "C"};
  for (std::size_t i = 0; i < 3; ++i) {
    extra["segments"].push_back({{"segment", labels[i]},
                                 {"readout_performance", result.readout_performance[i]},
                                 {"gauge", result.gauges[i]},
                                 {"expected_gauge", expected[i]}});
  }
  extra["matches_expected"] = result.gauges == expected;
  const auto paths = al::write_outputs(trace, c.output_dir, c.setup.engine.optimal_performance,
                                       extra);
  std::cout << "gauges " << result.gauges[0] << ' ' << result.gauges[1] << ' ' << result.gauges[2]
            << " (expected " << expected[0] << ' ' << expected[1] << ' ' << expected[2] << ")\n";
  print_paths(paths);
  return 0;
}

int cmd_compare(const std::string& config_path, std::optional<int> ensemble,
                const std::string& out) {
  al::RunConfig c = load_with_overrides(config_path, out);
  if (ensemble) c.compare.ensemble = *ensemble;
  al::validate(c);
  const auto scripts = al::comparison_ensemble(c, c.compare.ensemble);
  al::CompareOptions opts;
  opts.bootstrap_resamples = c.compare.bootstrap_resamples;
  opts.workers = static_cast<unsigned>(c.compare.workers);
  opts.keep_traces = c.compare.write_traces;
  const auto result = al::compare_controllers(scripts, c.threshold, c.landscape_controller,
                                              c.setup, c.seed, c.dt, opts);
  const auto paths = al::write_outputs(result, c.output_dir, c.setup.engine.optimal_performance);
  al::write_text(std::filesystem::path(c.output_dir) / "config.json", al::serialize_config(c));
  const auto& r = result.report;
  std::cout << r.first.controller << " " << al::format_number(r.first.mean_time_in_optimal)
            << ", " << r.second.controller << " "
            << al::format_number(r.second.mean_time_in_optimal) << ", difference "
            << al::format_number(r.mean_difference) << " [" << al::format_number(r.ci_low)
            << ", " << al::format_number(r.ci_high) << "]\n";
  print_paths(paths);
  std::cout << (std::filesystem::path(c.output_dir) / "config.json").string() << '\n';
  return 0;
}

int cmd_powerlaw(const std::string& trace_path, double level, std::optional<double> dt) {
  const auto rows = al::read_trace_csv(trace_path);
  if (!dt) {
    if (rows.size() < 2) throw al::InsufficientDataError("cannot infer dt from fewer than 2 rows");
    dt = rows[1].t - rows[0].t;
  }
  const auto times = al::extract_trial_times(rows, *dt, level);
  std::vector<double> index(times.size());
  std::iota(index.begin(), index.end(), 1.0);
  const auto fit = al::fit_power_law(index, times);
  ordered_json j;
  j["trials"] = times.size();
  j["a"] = fit.a;
  j["b"] = fit.b;
  j["r_squared"] = fit.r_squared;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop arousal and performance landscape simulator"};
  app.require_subcommand(1);

  int n = 12;
  int k = 3;
  std::uint64_t seed = 0;
  bool stats = false;
  int walk_length = 1000;
  auto* land = app.add_subcommand("landscape", "Generate an NK landscape and print it as JSON");
  land->add_option("--n", n, "Number of loci")->required();
  land->add_option("--k", k, "Epistatic neighbours per locus")->required();
  land->add_option("--seed", seed, "Landscape seed")->required();
  land->add_flag("--stats", stats, "Add extrema counts and ruggedness");
  land->add_option("--walk-length", walk_length, "Random walk length for ruggedness");

  std::string config_path;
  std::optional<std::string> controller;
  std::optional<std::uint64_t> sim_seed;
  std::optional<long> steps;
  std::optional<std::string> out;
  auto* sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
  sim->add_option("--config", config_path, "Config file")->required();
  sim->add_option("--controller", controller, "Controller override")
      ->check(CLI::IsMember({"threshold", "landscape", "passive"}));
  sim->add_option("--seed", sim_seed, "Seed override");
  sim->add_option("--steps", steps, "Step count override");
  sim->add_option("--out", out, "Output directory override");

  std::string out_dir;
  auto* four = app.add_subcommand("four-step", "Run the scripted four-step learning scenario");
  four->add_option("--config", config_path, "Config file")->required();
  four->add_option("--out", out_dir, "Output directory")->required();

  std::optional<int> ensemble;
  auto* cmp = app.add_subcommand("compare", "Compare threshold and landscape-guided controllers");
  cmp->add_option("--config", config_path, "Config file")->required();
  cmp->add_option("--ensemble", ensemble, "Number of scenarios");
  cmp->add_option("--out", out_dir, "Output directory")->required();

  std::string trace_path;
  double level = 0.6;
  std::optional<double> trace_dt;
  auto* pl = app.add_subcommand("powerlaw", "Fit the power law of practice to a trace");
  pl->add_option("--trace", trace_path, "trace.csv path")->required();
  pl->add_option("--level", level, "Optimal performance level ending a trial");
  pl->add_option("--dt", trace_dt, "Step length (default: inferred from t)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*land) return cmd_landscape(n, k, seed, stats, walk_length);
    if (*sim) return cmd_simulate(config_path, controller, sim_seed, steps, out);
    if (*four) return cmd_four_step(config_path, out_dir);
    if (*cmp) return cmd_compare(config_path, ensemble, out_dir);
    if (*pl) return cmd_powerlaw(trace_path, level, trace_dt);
  } catch (const al::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
