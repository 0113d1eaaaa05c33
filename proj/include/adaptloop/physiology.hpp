#pragma once

#include <array>

#include "adaptloop/rng.hpp"

namespace adaptloop {

inline constexpr int kIndicatorCount = 3;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Arousal indicators and the inverted-U response curve they feed.
struct PhysiologicalState {
  std::array<double, kIndicatorCount> indicators{0.5, 0.5, 0.5};
  double mu = 0.5;
  double sigma = 0.15;
  double amplitude = 0.9;
  double hysteresis_offset = 0.0;
  Interval capacity{0.1, 0.9};
  std::array<double, kIndicatorCount> habituation_rates{0.0, 0.02, 0.04};
  // Speed (per unit time) at which indicators drift toward the environment bias.
  double reversion_rate = 1.0;

  friend bool operator==(const PhysiologicalState&, const PhysiologicalState&) = default;
};

struct MemoryState {
  double fear = 0.0;
  double declarative = 0.0;
  double alpha_fear = 0.95;
  double alpha_decl = 0.1;
  double interference = 0.8;

  friend bool operator==(const MemoryState&, const MemoryState&) = default;
};

struct Environment {
  double degradation = 0.0;
  double stimulus_clarity = 1.0;
  double drift_bias = 0.5;
  double noise_scale = 0.02;

  friend bool operator==(const Environment&, const Environment&) = default;
};

struct Presentation {
  bool fearful = false;
};

struct HysteresisParams {
  double critical_width = 0.3;  // w*
  double delta = 0.05;
  double limit = 0.2;  // offset stays in [-limit, limit]
};

struct RatchetParams {
  double threshold = 0.2;
  double widen_fraction = 0.1;
};

// Throws DomainError naming the first field outside its declared bounds.
void validate(const PhysiologicalState& state);
void validate(const MemoryState& mem);
void validate(const Environment& env);

double mean_arousal(const PhysiologicalState& state);

// offset + amplitude * exp(-(a - mu)^2 / (2 sigma^2)), clamped to [0, 1].
double performance_of(const PhysiologicalState& state);
double performance_at(const PhysiologicalState& state, double arousal);

int gauge_of(double performance);

// Width of the arousal range whose performance reaches `optimal_performance`,
// restricted to the reachable capacity interval.
double optimal_band_width(const PhysiologicalState& state, double optimal_performance);

// One Euler-Maruyama step of the three indicator channels. Each channel drifts
// toward env.drift_bias, decays multiplicatively at its habituation rate and
// receives independent Gaussian noise.
PhysiologicalState step(const PhysiologicalState& state, const Environment& env, double dt,
                        Rng& rng);

PhysiologicalState apply_hysteresis(const PhysiologicalState& state, double optimal_band_width,
                                    const HysteresisParams& params = {});

PhysiologicalState ratchet_perturb(const PhysiologicalState& state, double magnitude,
                                   const RatchetParams& params = {});

MemoryState consolidate_memories(const MemoryState& mem, Presentation presentation, int count);

}  // namespace adaptloop
