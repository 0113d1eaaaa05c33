#pragma once

#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace adaptloop {

enum class Phase { kEvolvable, kRobust, kBrittle };
enum class Regime { kSampling, kConsolidation, kEquilibrium };

std::string_view to_string(Phase p);
std::string_view to_string(Regime r);
Phase parse_phase(std::string_view s);
Regime parse_regime(std::string_view s);

struct AdaptiveAssessment {
  double f_c = 0.0;
  double s_c = 0.0;
  Phase phase = Phase::kRobust;
  double e_d = 0.0;  // evolvable surplus
  double r_d = 0.0;  // closeness of fitness and selection
  double b_d = 0.0;  // brittle deficit
};

struct PhaseParams {
  double robust_radius = 0.15;
  double balance_band = 0.1;
};

struct RegimeParams {
  // Tolerance on dS/dt - dF/dt, relative to the largest absolute series value.
  double relative_tolerance = 1e-6;
};

struct RegimeSeries {
  std::vector<double> times;
  std::vector<double> f_values;
  std::vector<double> s_values;
  std::vector<Regime> regimes;
  std::vector<double> equilibrium_times;
  bool identical_series = false;
};

double fitness_coefficient(double x_n, double x_min, double x_max);
double selection_coefficient(double stimulus_clarity, double degradation);

AdaptiveAssessment classify_phase(double f_c, double s_c, const PhaseParams& params = {});

// Central differences inside the series, one-sided at the ends.
std::vector<double> derivative(std::span<const double> series, double dt);

std::vector<Regime> regime(std::span<const double> f_series, std::span<const double> s_series,
                           double dt, const RegimeParams& params = {});

// Times (relative to t0) where dF/dt = dS/dt: sign changes are located by
// linear interpolation, runs inside the tolerance band report their midpoint.
std::vector<double> equilibrium_times(std::span<const double> f_series,
                                      std::span<const double> s_series, double dt,
                                      const RegimeParams& params = {}, double t0 = 0.0);

RegimeSeries analyze_regimes(std::span<const double> f_series, std::span<const double> s_series,
                             double dt, const RegimeParams& params = {}, double t0 = 0.0);

inline constexpr double kNoEquilibrium = std::numeric_limits<double>::infinity();

// 1 / (1 + t_eq); an absent equilibrium (+inf) maps to 0.
double robustness_indicator(double first_equilibrium_time);

}  // namespace adaptloop
