#include "adaptloop/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptloop/error.hpp"

namespace adaptloop {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

PhysiologicalState shift_indicators(const PhysiologicalState& state, double delta) {
  PhysiologicalState next = state;
  for (double& x : next.indicators) x = next.capacity.clamp(x + delta);
  return next;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kNone: return "None";
    case ActionKind::kBoostUp: return "BoostUp";
    case ActionKind::kBoostDown: return "BoostDown";
    case ActionKind::kAllowSampling: return "AllowSampling";
    case ActionKind::kAssistAscent: return "AssistAscent";
    case ActionKind::kPerturb: return "Perturb";
  }
  return "?";
}

ActionKind parse_action(std::string_view s) {
  for (ActionKind k : {ActionKind::kNone, ActionKind::kBoostUp, ActionKind::kBoostDown,
                       ActionKind::kAllowSampling, ActionKind::kAssistAscent,
                       ActionKind::kPerturb}) {
    if (to_string(k) == s) return k;
  }
  throw ParameterError("unknown action '" + std::string(s) + "'");
}

Action::Action(ActionKind kind, double magnitude) : kind_(kind), magnitude_(magnitude) {
  if (!(magnitude >= 0.0)) throw ParameterError("action magnitude must be >= 0");
}

Action Action::perturb(double magnitude) {
  if (!(magnitude > 0.0)) throw ParameterError("perturb magnitude must be > 0");
  return {ActionKind::kPerturb, magnitude};
}

bool Action::triggers_hysteresis() const {
  return kind_ == ActionKind::kBoostUp || kind_ == ActionKind::kBoostDown ||
         kind_ == ActionKind::kPerturb;
}

std::string controller_name(const ControllerConfig& config) {
  return std::visit(Overloaded{[](const ThresholdConfig&) { return std::string("threshold"); },
                               [](const LandscapeGuidedConfig&) { return std::string("landscape"); },
                               [](const PassiveConfig&) { return std::string("passive"); }},
                    config);
}

void validate(const ControllerConfig& config) {
  std::visit(Overloaded{
                 [](const ThresholdConfig& c) {
                   if (!(c.lower < c.upper)) throw DomainError("threshold: lower must be < upper");
                   if (!(c.boost >= 0.0)) throw DomainError("threshold: boost must be >= 0");
                 },
                 [](const LandscapeGuidedConfig& c) {
                   if (!(c.perturb_magnitude > 0.0)) {
                     throw DomainError("landscape: perturb_magnitude must be > 0");
                   }
                   if (!(c.assist_gain >= 0.0 && c.assist_gain <= 1.0)) {
                     throw DomainError("landscape: assist_gain must lie in [0, 1]");
                   }
                   if (c.sampling_budget < 0) {
                     throw DomainError("landscape: sampling_budget must be >= 0");
                   }
                 },
                 [](const PassiveConfig&) {}},
             config);
}

Action threshold_decide(double mean_arousal, const ThresholdConfig& config) {
  if (mean_arousal < config.lower) return Action::boost_up(config.boost);
  if (mean_arousal > config.upper) return Action::boost_down(config.boost);
  return Action::none();
}

Action landscape_decide(const AdaptiveAssessment& assessment, Regime regime,
                        int steps_in_sampling, const LandscapeGuidedConfig& config) {
  if (assessment.phase == Phase::kBrittle) return Action::perturb(config.perturb_magnitude);
  if (regime == Regime::kSampling) {
    if (steps_in_sampling <= config.sampling_budget) return Action::allow_sampling();
    return Action::assist_ascent(config.assist_gain);
  }
  if (regime == Regime::kConsolidation) return Action::assist_ascent(config.assist_gain);
  return Action::none();
}

ActionOutcome apply_action(const PhysiologicalState& state, const Environment& env,
                           const Action& action, const ActionParams& params) {
  ActionOutcome out{state, env};
  switch (action.kind()) {
    case ActionKind::kNone:
    case ActionKind::kAllowSampling:
      break;
    case ActionKind::kBoostUp:
    case ActionKind::kBoostDown: {
      const double sign = action.kind() == ActionKind::kBoostUp ? 1.0 : -1.0;
      out.state = shift_indicators(state, sign * action.magnitude());
      out.state = apply_hysteresis(out.state,
                                   optimal_band_width(out.state, params.optimal_performance),
                                   params.hysteresis);
      break;
    }
    case ActionKind::kAssistAscent:
      out.state = shift_indicators(state, action.magnitude() * (state.mu - mean_arousal(state)));
      break;
    case ActionKind::kPerturb:
      out.state = ratchet_perturb(state, action.magnitude(), params.ratchet);
      out.state = apply_hysteresis(out.state,
                                   optimal_band_width(out.state, params.optimal_performance),
                                   params.hysteresis);
      break;
  }
  return out;
}

ClosedLoop::ClosedLoop(ScenarioScript scenario, ControllerConfig controller,
                       const SimulationSetup& setup, std::uint64_t seed, double dt)
    : scenario_(std::move(scenario)),
      controller_(std::move(controller)),
      params_(setup.engine),
      landscape_(Landscape::generate_nk(setup.landscape.n, setup.landscape.k, seed)),
      state_(setup.physiology),
      memory_(setup.memory),
      base_amplitude_(setup.physiology.amplitude),
      base_reversion_(setup.physiology.reversion_rate),
      seed_(seed),
      dt_(dt) {
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  scenario_.validate();
  validate(controller_);
  validate(state_);
  validate(memory_);
  if (params_.fc_window < 1) throw ParameterError("fc_window must be >= 1");
  if (params_.regime_window < 3) throw ParameterError("regime_window must be >= 3");
  if (params_.steps_per_walk_move < 1) throw ParameterError("steps_per_walk_move must be >= 1");
  Rng start = make_rng(seed, Stream::kWalkStart);
  genotype_ = random_genotype(landscape_.n(), start);
  refresh_learning();
}

void ClosedLoop::refresh_learning() {
  state_.amplitude =
      std::min(1.0, base_amplitude_ + params_.learning_gain * memory_.declarative);
  state_.reversion_rate =
      base_reversion_ * (1.0 + params_.skill_gain * static_cast<double>(presentations_));
}

void ClosedLoop::displace(double arousal) {
  for (double& x : state_.indicators) x = state_.capacity.clamp(arousal);
}

void ClosedLoop::present(Presentation p) {
  memory_ = consolidate_memories(memory_, p, 1);
  ++presentations_;
  refresh_learning();
}

Environment ClosedLoop::effective_environment(long step) const {
  Environment env = scenario_.environment_at(step);
  env.drift_bias +=
      params_.degradation_load * env.degradation * (1.0 - memory_.declarative);
  return env;
}

Rng ClosedLoop::physiology_stream(long step) const {
  return make_rng(seed_, Stream::kPhysiology, static_cast<std::uint64_t>(step));
}

double ClosedLoop::fitness_coefficient_now(double performance) {
  last_fc_flat_ = false;
  if (params_.fc_baseline == FcBaseline::kFixedRange) {
    const double x = params_.fc_range.clamp(performance);
    return fitness_coefficient(x, params_.fc_range.lo, params_.fc_range.hi);
  }
  perf_window_.push_back(performance);
  if (perf_window_.size() > static_cast<std::size_t>(params_.fc_window)) perf_window_.pop_front();
  const auto [lo, hi] = std::minmax_element(perf_window_.begin(), perf_window_.end());
  if (!(*hi > *lo)) {
    last_fc_flat_ = true;
    return 0.5;
  }
  return fitness_coefficient(performance, *lo, *hi);
}

TraceRow ClosedLoop::advance() {
  const long i = step_;
  Presentation scheduled;
  if (scenario_.presentation_at(i, &scheduled)) present(scheduled);

  const Environment raw_env = scenario_.environment_at(i);
  const Environment env = effective_environment(i);
  Rng rng = physiology_stream(i);
  state_ = step(state_, env, dt_, rng);

  TraceRow row;
  row.step = i;
  row.t = static_cast<double>(i) * dt_;
  row.indicators = state_.indicators;
  row.arousal = mean_arousal(state_);
  row.performance = performance_of(state_);
  row.gauge = gauge_of(row.performance);
  row.f_c = fitness_coefficient_now(row.performance);
  row.s_c = selection_coefficient(raw_env.stimulus_clarity, raw_env.degradation);

  const AdaptiveAssessment assessment = classify_phase(row.f_c, row.s_c, params_.phase);
  row.phase = assessment.phase;

  f_history_.push_back(row.f_c);
  s_history_.push_back(row.s_c);
  if (f_history_.size() > static_cast<std::size_t>(params_.regime_window)) {
    f_history_.pop_front();
    s_history_.pop_front();
  }
  if (f_history_.size() >= 3) {
    const std::vector<double> f(f_history_.begin(), f_history_.end());
    const std::vector<double> s(s_history_.begin(), s_history_.end());
    row.regime = regime(f, s, dt_, params_.regime).back();
  } else {
    row.regime = Regime::kEquilibrium;
  }
  steps_in_sampling_ = row.regime == Regime::kSampling ? steps_in_sampling_ + 1 : 0;

  // Sampling descends the landscape, consolidation climbs it.
  if (i % params_.steps_per_walk_move == 0 && row.regime != Regime::kEquilibrium) {
    const auto dir =
        row.regime == Regime::kSampling ? WalkDirection::kDescent : WalkDirection::kAscent;
    if (auto next = steepest_move(landscape_, genotype_, dir, TieRule::lowest_index(), nullptr)) {
      genotype_ = *next;
    }
  }

  const Action action = std::visit(
      Overloaded{[&](const ThresholdConfig& c) { return threshold_decide(row.arousal, c); },
                 [&](const LandscapeGuidedConfig& c) {
                   return landscape_decide(assessment, row.regime, steps_in_sampling_, c);
                 },
                 [](const PassiveConfig&) { return Action::none(); }},
      controller_);
  row.action = action.kind();

  const ActionParams action_params{params_.hysteresis, params_.ratchet,
                                   params_.optimal_performance};
  state_ = apply_action(state_, raw_env, action, action_params).state;

  row.hysteresis_offset = state_.hysteresis_offset;
  row.genotype = genotype_;
  row.landscape_fitness = landscape_.evaluate(genotype_);
  ++step_;
  return row;
}

Trace run_closed_loop(const ScenarioScript& scenario, const ControllerConfig& controller,
                      const SimulationSetup& setup, std::uint64_t seed, long steps, double dt) {
  if (steps < 1) throw ParameterError("steps must be >= 1");
  ClosedLoop loop(scenario, controller, setup, seed, dt);
  Trace trace;
  trace.header.seed = seed;
  trace.header.controller = controller_name(controller);
  trace.header.scenario = scenario.name;
  trace.header.steps = steps;
  trace.header.dt = dt;
  trace.rows.reserve(static_cast<std::size_t>(steps));
  for (long s = 0; s < steps; ++s) {
    trace.rows.push_back(loop.advance());
    if (loop.last_fc_flat()) ++trace.flat_fc_steps;
  }
  return trace;
}

}  // namespace adaptloop
