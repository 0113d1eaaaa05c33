#include "adaptloop/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "adaptloop/error.hpp"

namespace adaptloop {

namespace {

const char* const kSegmentLabels[3] = {"baseline", "degraded", "learned"};

// Linear-interpolated percentile of sorted data.
double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      if (failed) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ArmSummary summarize(const std::string& name, const std::vector<RunMetrics>& runs) {
  ArmSummary arm;
  arm.controller = name;
  double eq_sum = 0.0;
  int eq_count = 0;
  for (const auto& r : runs) {
    arm.mean_time_in_optimal += r.time_in_optimal;
    arm.mean_hysteresis_drift += r.hysteresis_drift;
    if (std::isfinite(r.first_equilibrium_time)) {
      eq_sum += r.first_equilibrium_time;
      ++eq_count;
    } else {
      ++arm.runs_without_equilibrium;
    }
    for (const auto& [phase, frac] : r.phase_occupancy) arm.phase_occupancy[phase] += frac;
  }
  const auto n = static_cast<double>(runs.size());
  arm.mean_time_in_optimal /= n;
  arm.mean_hysteresis_drift /= n;
  if (eq_count > 0) arm.mean_first_equilibrium_time = eq_sum / eq_count;
  for (auto& [phase, frac] : arm.phase_occupancy) frac /= n;
  return arm;
}

}  // namespace

FourStepScenario four_step(const FourStepCalibration& c) {
  FourStepScenario out;
  out.script.name = "four_step";
  for (int i = 0; i < 3; ++i) {
    ScenarioSegment seg;
    seg.duration = c.durations[static_cast<std::size_t>(i)];
    seg.label = kSegmentLabels[i];
    seg.environment.degradation = c.degradation[static_cast<std::size_t>(i)];
    seg.environment.stimulus_clarity = 1.0;
    seg.environment.drift_bias = c.drift_bias;
    seg.environment.noise_scale = c.noise_scale;
    out.script.segments.push_back(seg);
  }
  // Degraded conditions: fear is acquired in a single presentation.
  out.script.segments[1].presentations = c.degraded_fearful_presentations;
  out.script.segments[1].fearful = true;
  // Learned: repeated presentations consolidate declarative memory.
  out.script.segments[2].presentations = c.learned_presentations;
  out.script.segments[2].presentation_interval = c.presentation_interval;
  out.script.calibration = {
      {"base_amplitude", c.base_amplitude},
      {"noise_scale", c.noise_scale},
      {"drift_bias", c.drift_bias},
      {"learned_presentations", c.learned_presentations},
      {"readout_window", c.readout_window},
  };
  out.script.validate();
  return out;
}

FourStepResult run_four_step(const FourStepCalibration& c, const SimulationSetup& setup,
                             std::uint64_t seed) {
  const FourStepScenario scenario = four_step(c);
  if (c.readout_window < 1) throw ParameterError("readout_window must be >= 1");
  for (int d : c.durations) {
    if (d < c.readout_window) throw ParameterError("segments must be at least readout_window long");
  }
  SimulationSetup s = setup;
  s.physiology.amplitude = c.base_amplitude;
  FourStepResult result;
  result.trace = run_closed_loop(scenario.script, PassiveConfig{}, s, seed,
                                 scenario.script.total_steps(), c.dt);
  for (std::size_t seg = 0; seg < 3; ++seg) {
    const long end = scenario.script.segment_start(seg) + scenario.script.segments[seg].duration;
    double sum = 0.0;
    for (long r = end - c.readout_window; r < end; ++r) {
      sum += result.trace.rows[static_cast<std::size_t>(r)].performance;
    }
    result.readout_performance[seg] = sum / c.readout_window;
    result.gauges[seg] = gauge_of(result.readout_performance[seg]);
  }
  return result;
}

double expected_segment_count(double volatility, const NonstationaryParams& p) {
  const double rate = std::min(1.0, volatility * p.switch_rate);
  return 1.0 + static_cast<double>(p.length - 1) * rate;
}

std::vector<ScenarioScript> nonstationary_ensemble(int count, std::uint64_t seed,
                                                   double volatility,
                                                   const NonstationaryParams& p) {
  if (count < 1) throw ParameterError("ensemble count must be >= 1");
  if (!(volatility >= 0.0)) throw ParameterError("volatility must be >= 0");
  if (p.length < 1) throw ParameterError("script length must be >= 1");
  const double rate = std::min(1.0, volatility * p.switch_rate);
  std::vector<ScenarioScript> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    Rng rng = make_rng(seed, Stream::kScenario, static_cast<std::uint64_t>(j));
    auto draw_env = [&] {
      Environment env;
      const double u_d = 2.0 * uniform01(rng) - 1.0;
      const double u_b = 2.0 * uniform01(rng) - 1.0;
      env.degradation =
          std::clamp(p.degradation_center + volatility * p.degradation_spread * u_d, 0.0, 1.0);
      env.drift_bias = p.bias_center + volatility * p.bias_spread * u_b;
      env.noise_scale = p.noise_scale;
      env.stimulus_clarity = p.stimulus_clarity;
      return env;
    };
    ScenarioScript script;
    script.name = "nonstationary_" + std::to_string(j);
    script.calibration = {{"volatility", volatility}, {"switch_rate", p.switch_rate}};
    ScenarioSegment current;
    current.environment = draw_env();
    current.duration = 1;
    for (long s = 1; s < p.length; ++s) {
      if (uniform01(rng) < rate) {
        current.label = "seg" + std::to_string(script.segments.size());
        script.segments.push_back(current);
        current = ScenarioSegment{};
        current.environment = draw_env();
        current.duration = 1;
      } else {
        ++current.duration;
      }
    }
    current.label = "seg" + std::to_string(script.segments.size());
    script.segments.push_back(current);
    out.push_back(std::move(script));
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& n, const std::vector<double>& t) {
  if (n.size() != t.size()) throw ParameterError("trial index and time series differ in length");
  if (n.size() < 3) throw InsufficientDataError("power-law fit needs at least 3 points");
  std::vector<double> x(n.size());
  std::vector<double> y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !(t[i] > 0.0)) throw DomainError("power-law fit needs positive values");
    x[i] = std::log(n[i]);
    y[i] = std::log(t[i]);
  }
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("trial indices must not all be equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  PowerLawFit fit;
  fit.a = std::exp(intercept);
  fit.b = slope == 0.0 ? 0.0 : -slope;
  // A flat series is fitted exactly by b = 0.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::vector<double> extract_trial_times(const std::vector<TraceRow>& rows, double dt,
                                        double optimal_performance) {
  std::vector<double> out;
  long run = 0;
  for (const auto& row : rows) {
    if (row.performance < optimal_performance) {
      ++run;
    } else if (run > 0) {
      out.push_back(static_cast<double>(run + 1) * dt);
      run = 0;
    }
  }
  return out;
}

PracticeResult run_practice(const PracticeParams& p, const SimulationSetup& setup,
                            std::uint64_t seed, bool nonstationary) {
  if (p.trials < 3) throw ParameterError("practice needs at least 3 trials");
  if (p.max_trial_steps < 1 || p.rest_steps < 0) throw ParameterError("invalid practice step limits");
  ScenarioScript script;
  if (nonstationary) {
    script = nonstationary_ensemble(1, seed, p.volatility, p.nonstationary).front();
    script.name = "practice_nonstationary";
  } else {
    Environment env;
    env.degradation = p.degradation;
    env.noise_scale = p.noise_scale;
    script = constant_scenario(env, 1, "practice_constant");
  }
  SimulationSetup s = setup;
  s.physiology.amplitude = p.base_amplitude;
  ClosedLoop loop(script, PassiveConfig{}, s, seed, p.dt);

  PracticeResult result;
  result.trace.header.seed = seed;
  result.trace.header.controller = "passive";
  result.trace.header.scenario = script.name;
  result.trace.header.dt = p.dt;
  auto record = [&] {
    result.trace.rows.push_back(loop.advance());
    if (loop.last_fc_flat()) ++result.trace.flat_fc_steps;
    return result.trace.rows.back().performance;
  };
  const double level = s.engine.optimal_performance;
  for (int trial = 0; trial < p.trials; ++trial) {
    loop.displace(p.start_arousal);
    long steps = 0;
    while (steps < p.max_trial_steps) {
      ++steps;
      if (record() >= level) break;
    }
    result.trial_times.push_back(static_cast<double>(steps) * p.dt);
    loop.present(Presentation{false});
    for (int r = 0; r < p.rest_steps; ++r) record();
  }
  result.trace.header.steps = static_cast<long>(result.trace.rows.size());
  std::vector<double> index(result.trial_times.size());
  std::iota(index.begin(), index.end(), 1.0);
  result.fit = fit_power_law(index, result.trial_times);
  return result;
}

RunMetrics run_metrics(const Trace& trace, double optimal_performance,
                       const RegimeParams& regime_params) {
  RunMetrics m;
  if (trace.rows.empty()) throw InsufficientDataError("empty trace");
  std::size_t in_band = 0;
  std::map<std::string, double> occupancy{{"Evolvable", 0.0}, {"Robust", 0.0}, {"Brittle", 0.0}};
  std::vector<double> f;
  std::vector<double> s;
  f.reserve(trace.rows.size());
  s.reserve(trace.rows.size());
  for (const auto& row : trace.rows) {
    if (row.performance >= optimal_performance) ++in_band;
    occupancy[std::string(to_string(row.phase))] += 1.0;
    f.push_back(row.f_c);
    s.push_back(row.s_c);
  }
  const auto n = static_cast<double>(trace.rows.size());
  m.time_in_optimal = static_cast<double>(in_band) / n;
  for (auto& [phase, count] : occupancy) count /= n;
  m.phase_occupancy = occupancy;
  m.hysteresis_drift = trace.rows.back().hysteresis_offset;
  if (trace.rows.size() >= 3) {
    const auto eq = equilibrium_times(f, s, trace.header.dt, regime_params);
    if (!eq.empty()) m.first_equilibrium_time = eq.front();
  }
  return m;
}

std::uint64_t ensemble_run_seed(std::uint64_t master_seed, std::size_t index) {
  return substream_seed(master_seed, Stream::kEnsembleMember, index);
}

ComparisonResult compare_controllers(const std::vector<ScenarioScript>& ensemble,
                                     const ControllerConfig& first,
                                     const ControllerConfig& second,
                                     const SimulationSetup& setup, std::uint64_t master_seed,
                                     double dt, const CompareOptions& options) {
  if (ensemble.empty()) throw ParameterError("comparison needs a non-empty ensemble");
  if (options.bootstrap_resamples < 1) throw ParameterError("bootstrap_resamples must be >= 1");
  validate(first);
  validate(second);
  const std::size_t n = ensemble.size();
  std::vector<RunMetrics> first_runs(n);
  std::vector<RunMetrics> second_runs(n);
  ComparisonResult result;
  if (options.keep_traces) {
    result.first_traces.resize(n);
    result.second_traces.resize(n);
  }
  const double level = setup.engine.optimal_performance;
  parallel_for(n, options.workers, [&](std::size_t i) {
    const std::uint64_t seed = ensemble_run_seed(master_seed, i);
    const long steps = ensemble[i].total_steps();
    Trace a = run_closed_loop(ensemble[i], first, setup, seed, steps, dt);
    Trace b = run_closed_loop(ensemble[i], second, setup, seed, steps, dt);
    first_runs[i] = run_metrics(a, level, setup.engine.regime);
    second_runs[i] = run_metrics(b, level, setup.engine.regime);
    if (options.keep_traces) {
      result.first_traces[i] = std::move(a);
      result.second_traces[i] = std::move(b);
    }
  });

  ComparisonReport& rep = result.report;
  rep.first = summarize(controller_name(first), first_runs);
  rep.second = summarize(controller_name(second), second_runs);
  rep.ensemble_size = static_cast<int>(n);
  rep.bootstrap_resamples = options.bootstrap_resamples;
  rep.master_seed = master_seed;
  rep.differences.resize(n);
  rep.run_seeds.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.differences[i] = second_runs[i].time_in_optimal - first_runs[i].time_in_optimal;
    rep.run_seeds[i] = ensemble_run_seed(master_seed, i);
    total += rep.differences[i];
  }
  rep.mean_difference = total / static_cast<double>(n);

  Rng rng = make_rng(master_seed, Stream::kBootstrap);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(static_cast<std::size_t>(options.bootstrap_resamples));
  for (double& m : means) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += rep.differences[pick(rng)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  rep.ci_low = percentile(means, 0.025);
  rep.ci_high = percentile(means, 0.975);
  return result;
}

}  // namespace adaptloop
