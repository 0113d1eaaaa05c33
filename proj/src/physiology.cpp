#include "adaptloop/physiology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptloop/error.hpp"

namespace adaptloop {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const PhysiologicalState& s) {
  require(s.capacity.lo >= 0.0 && s.capacity.hi <= 1.0 && s.capacity.lo <= s.capacity.hi,
          "capacity must be an interval inside [0, 1]");
  for (double x : s.indicators) {
    require(x >= s.capacity.lo && x <= s.capacity.hi, "indicators must lie inside capacity");
  }
  require(std::isfinite(s.mu) && unit(s.mu), "mu must lie in [0, 1]");
  require(s.sigma > 0.0 && std::isfinite(s.sigma), "sigma must be > 0");
  require(s.amplitude > 0.0 && s.amplitude <= 1.0, "amplitude must lie in (0, 1]");
  require(std::abs(s.hysteresis_offset) <= 0.2, "hysteresis_offset must lie in [-0.2, 0.2]");
  for (double h : s.habituation_rates) require(h >= 0.0, "habituation rates must be >= 0");
  require(s.reversion_rate >= 0.0, "reversion_rate must be >= 0");
}

void validate(const MemoryState& m) {
  require(unit(m.fear) && unit(m.declarative), "memory levels must lie in [0, 1]");
  require(unit(m.alpha_fear) && unit(m.alpha_decl), "memory rates must lie in [0, 1]");
  require(unit(m.interference), "interference must lie in [0, 1]");
}

void validate(const Environment& e) {
  require(unit(e.degradation), "degradation must lie in [0, 1]");
  require(unit(e.stimulus_clarity), "stimulus_clarity must lie in [0, 1]");
  require(std::isfinite(e.drift_bias), "drift_bias must be finite");
  require(e.noise_scale >= 0.0, "noise_scale must be >= 0");
}

double mean_arousal(const PhysiologicalState& state) {
  double sum = 0.0;
  for (double x : state.indicators) sum += x;
  return sum / kIndicatorCount;
}

double performance_at(const PhysiologicalState& state, double arousal) {
  const double d = arousal - state.mu;
  const double bump = state.amplitude * std::exp(-(d * d) / (2.0 * state.sigma * state.sigma));
  return std::clamp(state.hysteresis_offset + bump, 0.0, 1.0);
}

double performance_of(const PhysiologicalState& state) {
  return performance_at(state, mean_arousal(state));
}

int gauge_of(double performance) {
  if (!(performance >= 0.0 && performance <= 1.0)) {
    throw DomainError("performance must lie in [0, 1] for the gauge");
  }
  return std::min(static_cast<int>(std::floor(10.0 * performance)), 9);
}

double optimal_band_width(const PhysiologicalState& state, double optimal_performance) {
  const double ratio = (optimal_performance - state.hysteresis_offset) / state.amplitude;
  if (ratio <= 0.0) return state.capacity.width();
  if (ratio > 1.0) return 0.0;
  const double half = state.sigma * std::sqrt(-2.0 * std::log(ratio));
  const double lo = std::max(state.mu - half, state.capacity.lo);
  const double hi = std::min(state.mu + half, state.capacity.hi);
  return std::max(0.0, hi - lo);
}

PhysiologicalState step(const PhysiologicalState& state, const Environment& env, double dt,
                        Rng& rng) {
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  PhysiologicalState next = state;
  const double noise = env.noise_scale * std::sqrt(dt);
  for (int i = 0; i < kIndicatorCount; ++i) {
    const double x = state.indicators[i];
    double v = x + state.reversion_rate * (env.drift_bias - x) * dt -
               state.habituation_rates[i] * x * dt;
    // Draw unconditionally so the stream position never depends on noise_scale.
    const double z = standard_normal(rng);
    if (noise > 0.0) v += noise * z;
    next.indicators[i] = state.capacity.clamp(v);
  }
  return next;
}

PhysiologicalState apply_hysteresis(const PhysiologicalState& state, double width,
                                    const HysteresisParams& params) {
  if (!(width >= 0.0)) throw ParameterError("optimal band width must be >= 0");
  PhysiologicalState next = state;
  if (width < params.critical_width) {
    next.hysteresis_offset = std::max(-params.limit, state.hysteresis_offset - params.delta);
  } else if (width > params.critical_width) {
    next.hysteresis_offset = std::min(params.limit, state.hysteresis_offset + params.delta);
  }
  return next;
}

PhysiologicalState ratchet_perturb(const PhysiologicalState& state, double magnitude,
                                   const RatchetParams& params) {
  if (!(magnitude >= 0.0)) throw ParameterError("ratchet magnitude must be >= 0");
  if (magnitude <= params.threshold) return state;
  PhysiologicalState next = state;
  const double widen = magnitude * params.widen_fraction;
  next.capacity.lo = std::max(0.0, state.capacity.lo - widen);
  next.capacity.hi = std::min(1.0, state.capacity.hi + widen);
  return next;
}

MemoryState consolidate_memories(const MemoryState& mem, Presentation presentation, int count) {
  if (count < 1) throw ParameterError("presentation count must be >= 1");
  MemoryState m = mem;
  for (int i = 0; i < count; ++i) {
    const double before = m.fear;
    if (presentation.fearful) m.fear += (1.0 - m.fear) * m.alpha_fear;
    const double gained = m.fear - before;
    m.declarative += (1.0 - m.declarative) * m.alpha_decl * (1.0 - m.interference * gained);
    m.fear = std::min(m.fear, 1.0);
    m.declarative = std::min(m.declarative, 1.0);
  }
  return m;
}

}  // namespace adaptloop
