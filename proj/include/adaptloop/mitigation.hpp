#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adaptloop/adaptation.hpp"
#include "adaptloop/landscape.hpp"
#include "adaptloop/physiology.hpp"
#include "adaptloop/scenario_script.hpp"

namespace adaptloop {

enum class ActionKind { kNone, kBoostUp, kBoostDown, kAllowSampling, kAssistAscent, kPerturb };

std::string_view to_string(ActionKind kind);
ActionKind parse_action(std::string_view s);

class Action {
 public:
  Action() = default;
  static Action none() { return {}; }
  static Action boost_up(double magnitude) { return {ActionKind::kBoostUp, magnitude}; }
  static Action boost_down(double magnitude) { return {ActionKind::kBoostDown, magnitude}; }
  static Action allow_sampling() { return {ActionKind::kAllowSampling, 0.0}; }
  static Action assist_ascent(double gain) { return {ActionKind::kAssistAscent, gain}; }
  // Throws ParameterError unless magnitude > 0.
  static Action perturb(double magnitude);

  ActionKind kind() const { return kind_; }
  double magnitude() const { return magnitude_; }
  bool triggers_hysteresis() const;

  friend bool operator==(const Action&, const Action&) = default;

 private:
  Action(ActionKind kind, double magnitude);
  ActionKind kind_ = ActionKind::kNone;
  double magnitude_ = 0.0;
};

// Classical band controller: push arousal back whenever it leaves [lower, upper].
struct ThresholdConfig {
  double lower = 0.35;
  double upper = 0.65;
  double boost = 0.1;
};

// Works with the adaptive dynamics instead of against them:
//  - tolerates sampling (temporary performance loss) up to a step budget,
//  - assists the ascent once consolidation sets in or the budget runs out,
//  - perturbs a brittle system to open up hidden capacity (ratchet).
struct LandscapeGuidedConfig {
  double perturb_magnitude = 0.3;
  double assist_gain = 0.2;
  int sampling_budget = 50;
};

// No intervention at all; used for the scripted learning scenarios.
struct PassiveConfig {};

using ControllerConfig = std::variant<ThresholdConfig, LandscapeGuidedConfig, PassiveConfig>;

std::string controller_name(const ControllerConfig& config);
void validate(const ControllerConfig& config);

Action threshold_decide(double mean_arousal, const ThresholdConfig& config);
Action landscape_decide(const AdaptiveAssessment& assessment, Regime regime,
                        int steps_in_sampling, const LandscapeGuidedConfig& config);

struct ActionParams {
  HysteresisParams hysteresis;
  RatchetParams ratchet;
  double optimal_performance = 0.6;
};

struct ActionOutcome {
  PhysiologicalState state;
  Environment environment;
};

ActionOutcome apply_action(const PhysiologicalState& state, const Environment& env,
                           const Action& action, const ActionParams& params = {});

enum class FcBaseline { kWindow, kFixedRange };

struct EngineParams {
  double optimal_performance = 0.6;
  // F_c baseline: min/max of the agent's own recent performance, or a fixed range.
  FcBaseline fc_baseline = FcBaseline::kWindow;
  int fc_window = 200;
  Interval fc_range{0.0, 1.0};
  int regime_window = 5;
  int steps_per_walk_move = 1;
  // Degradation pushes the arousal drift target up by load * D * (1 - declarative).
  double degradation_load = 0.3;
  // amplitude = base amplitude + learning_gain * declarative (capped at 1).
  double learning_gain = 0.3;
  // reversion rate = base rate * (1 + skill_gain * consolidated presentations).
  double skill_gain = 0.2;
  PhaseParams phase;
  RegimeParams regime;
  HysteresisParams hysteresis;
  RatchetParams ratchet;
};

struct LandscapeParams {
  int n = 12;
  int k = 3;
};

struct SimulationSetup {
  LandscapeParams landscape;
  PhysiologicalState physiology;
  MemoryState memory;
  EngineParams engine;
};

struct TraceRow {
  long step = 0;
  double t = 0.0;
  std::array<double, kIndicatorCount> indicators{};
  double arousal = 0.0;
  double performance = 0.0;
  int gauge = 0;
  double f_c = 0.0;
  double s_c = 0.0;
  Phase phase = Phase::kRobust;
  Regime regime = Regime::kEquilibrium;
  ActionKind action = ActionKind::kNone;
  double hysteresis_offset = 0.0;
  Genotype genotype;
  double landscape_fitness = 0.0;
};

struct TraceHeader {
  std::uint64_t seed = 0;
  std::string controller;
  std::string scenario;
  long steps = 0;
  double dt = 0.0;
  int format_version = 1;
  std::string config_json;  // full run configuration, filled by the caller
};

struct Trace {
  TraceHeader header;
  std::vector<TraceRow> rows;
  long flat_fc_steps = 0;  // rows whose F_c window had zero range
};

// One agent coupled to its environment, landscape position and controller.
// Strictly sequential; independent instances may run on different threads.
class ClosedLoop {
 public:
  ClosedLoop(ScenarioScript scenario, ControllerConfig controller, const SimulationSetup& setup,
             std::uint64_t seed, double dt);

  TraceRow advance();

  // External interventions used by scripted protocols (not controller actions).
  void displace(double arousal);
  void present(Presentation p);

  long step_index() const { return step_; }
  double dt() const { return dt_; }
  const PhysiologicalState& state() const { return state_; }
  const MemoryState& memory() const { return memory_; }
  const Genotype& genotype() const { return genotype_; }
  const Landscape& landscape() const { return landscape_; }
  bool last_fc_flat() const { return last_fc_flat_; }

  // The environment handed to physiology::step at `step`, after memory-
  // dependent degradation load; exposed so callers can replay a step.
  Environment effective_environment(long step) const;
  Rng physiology_stream(long step) const;

 private:
  void refresh_learning();
  double fitness_coefficient_now(double performance);

  ScenarioScript scenario_;
  ControllerConfig controller_;
  EngineParams params_;
  Landscape landscape_;
  PhysiologicalState state_;
  MemoryState memory_;
  double base_amplitude_;
  double base_reversion_;
  long presentations_ = 0;
  Genotype genotype_;
  std::uint64_t seed_;
  double dt_;
  long step_ = 0;
  int steps_in_sampling_ = 0;
  bool last_fc_flat_ = false;
  std::deque<double> perf_window_;
  std::deque<double> f_history_;
  std::deque<double> s_history_;
};

Trace run_closed_loop(const ScenarioScript& scenario, const ControllerConfig& controller,
                      const SimulationSetup& setup, std::uint64_t seed, long steps, double dt);

}  // namespace adaptloop
