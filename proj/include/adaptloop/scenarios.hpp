#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adaptloop/mitigation.hpp"
#include "adaptloop/scenario_script.hpp"

namespace adaptloop {

// ---------------------------------------------------------------------------
// Four-step learning scenario: baseline, degraded conditions, learned.

struct FourStepCalibration {
  double base_amplitude = 0.66;
  std::array<int, 3> durations{150, 150, 200};
  std::array<double, 3> degradation{0.1, 0.63, 0.63};
  double drift_bias = 0.5;
  double noise_scale = 0.01;
  int degraded_fearful_presentations = 1;
  int learned_presentations = 13;
  int presentation_interval = 5;
  int readout_window = 30;
  double dt = 0.1;
};

struct FourStepScenario {
  ScenarioScript script;
  std::array<int, 3> expected_gauges{6, 3, 8};
};

struct FourStepResult {
  Trace trace;
  std::array<double, 3> readout_performance{};
  std::array<int, 3> gauges{};
};

FourStepScenario four_step(const FourStepCalibration& calibration = {});

// Runs the scripted scenario without a controller. The gauge of each segment is
// read from the mean performance over its last `readout_window` steps.
FourStepResult run_four_step(const FourStepCalibration& calibration, const SimulationSetup& setup,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Nonstationary scenario ensembles.

struct NonstationaryParams {
  long length = 1000;           // steps per script
  double switch_rate = 0.01;    // per-step switch probability at volatility 1
  double degradation_center = 0.6;
  double degradation_spread = 0.6;
  double bias_center = 0.5;
  double bias_spread = 0.3;
  double noise_scale = 0.05;
  double stimulus_clarity = 1.0;
};

std::vector<ScenarioScript> nonstationary_ensemble(int count, std::uint64_t seed,
                                                   double volatility,
                                                   const NonstationaryParams& params = {});

// 1 + (length - 1) * min(1, volatility * switch_rate)
double expected_segment_count(double volatility, const NonstationaryParams& params);

// ---------------------------------------------------------------------------
// Power law of practice.

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
};

// Least squares on log T = log a - b log N.
PowerLawFit fit_power_law(const std::vector<double>& trial_index, const std::vector<double>& time);

// Durations of completed excursions below `optimal_performance`: each run of
// rows with performance below the level that is followed by a row at or above
// it counts as one trial. Duration = (rows in the run + 1) * dt, counting the
// row that reaches the level.
std::vector<double> extract_trial_times(const std::vector<TraceRow>& rows, double dt,
                                        double optimal_performance);

struct PracticeParams {
  int trials = 30;
  double dt = 0.01;
  double start_arousal = 0.15;
  int rest_steps = 10;
  long max_trial_steps = 5000;
  double base_amplitude = 0.8;
  double degradation = 0.2;
  double noise_scale = 0.005;
  double volatility = 0.5;
  NonstationaryParams nonstationary{4000, 0.02, 0.45, 0.9, 0.5, 0.1, 0.005, 1.0};
};

struct PracticeResult {
  Trace trace;
  std::vector<double> trial_times;
  PowerLawFit fit;
};

// Repeated trials: each starts with arousal displaced to `start_arousal`, ends
// once performance reaches the optimal level, and is consolidated as one
// presentation. Constant stimulus holds the environment fixed; otherwise the
// environment follows a nonstationary schedule.
PracticeResult run_practice(const PracticeParams& params, const SimulationSetup& setup,
                            std::uint64_t seed, bool nonstationary);

// ---------------------------------------------------------------------------
// Controller comparison.

struct RunMetrics {
  double time_in_optimal = 0.0;
  double hysteresis_drift = 0.0;
  double first_equilibrium_time = kNoEquilibrium;
  std::map<std::string, double> phase_occupancy;
};

RunMetrics run_metrics(const Trace& trace, double optimal_performance,
                       const RegimeParams& regime_params = {});

struct ArmSummary {
  std::string controller;
  double mean_time_in_optimal = 0.0;
  double mean_hysteresis_drift = 0.0;
  double mean_first_equilibrium_time = kNoEquilibrium;  // over runs that reach one
  int runs_without_equilibrium = 0;
  std::map<std::string, double> phase_occupancy;
};

struct ComparisonReport {
  ArmSummary first;
  ArmSummary second;
  // second.time_in_optimal - first.time_in_optimal, paired per scenario.
  double mean_difference = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int ensemble_size = 0;
  int bootstrap_resamples = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> differences;
  std::vector<std::uint64_t> run_seeds;
};

struct CompareOptions {
  int bootstrap_resamples = 1000;
  unsigned workers = 0;  // 0 = hardware concurrency
  bool keep_traces = false;
};

struct ComparisonResult {
  ComparisonReport report;
  std::vector<Trace> first_traces;   // filled when keep_traces
  std::vector<Trace> second_traces;
};

// Runs both controllers on identical (scenario, seed) pairs. Scenario i runs
// with seed substream_seed(master_seed, kEnsembleMember, i).
ComparisonResult compare_controllers(const std::vector<ScenarioScript>& ensemble,
                                     const ControllerConfig& first,
                                     const ControllerConfig& second,
                                     const SimulationSetup& setup, std::uint64_t master_seed,
                                     double dt, const CompareOptions& options = {});

std::uint64_t ensemble_run_seed(std::uint64_t master_seed, std::size_t index);

}  // namespace adaptloop
