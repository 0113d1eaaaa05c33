#include "adaptloop/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptloop/error.hpp"

namespace adaptloop {

namespace {

struct Difference {
  std::vector<double> g;  // dF/dt - dS/dt
  double tol = 0.0;
};

void check_series(std::span<const double> f, std::span<const double> s, double dt) {
  if (f.size() != s.size()) throw ParameterError("fitness and selection series differ in length");
  if (f.size() < 3) throw InsufficientDataError("regime analysis needs at least 3 points");
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
}

Difference difference(std::span<const double> f, std::span<const double> s, double dt,
                      const RegimeParams& params) {
  check_series(f, s, dt);
  const auto df = derivative(f, dt);
  const auto ds = derivative(s, dt);
  Difference d;
  d.g.resize(f.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    d.g[i] = df[i] - ds[i];
    scale = std::max({scale, std::abs(f[i]), std::abs(s[i])});
  }
  d.tol = params.relative_tolerance * scale;
  return d;
}

}  // namespace

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kEvolvable: return "Evolvable";
    case Phase::kRobust: return "Robust";
    case Phase::kBrittle: return "Brittle";
  }
  return "?";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kSampling: return "Sampling";
    case Regime::kConsolidation: return "Consolidation";
    case Regime::kEquilibrium: return "Equilibrium";
  }
  return "?";
}

Phase parse_phase(std::string_view s) {
  for (Phase p : {Phase::kEvolvable, Phase::kRobust, Phase::kBrittle}) {
    if (to_string(p) == s) return p;
  }
  throw ParameterError("unknown phase '" + std::string(s) + "'");
}

Regime parse_regime(std::string_view s) {
  for (Regime r : {Regime::kSampling, Regime::kConsolidation, Regime::kEquilibrium}) {
    if (to_string(r) == s) return r;
  }
  throw ParameterError("unknown regime '" + std::string(s) + "'");
}

double fitness_coefficient(double x_n, double x_min, double x_max) {
  if (!(x_max > x_min)) throw DegenerateRangeError("fitness coefficient needs x_max > x_min");
  if (!(x_n >= x_min && x_n <= x_max)) {
    throw DomainError("x_n must lie in [x_min, x_max]");
  }
  return std::clamp((x_n - x_min) / (x_max - x_min), 0.0, 1.0);
}

double selection_coefficient(double stimulus_clarity, double degradation) {
  if (!(stimulus_clarity >= 0.0 && stimulus_clarity <= 1.0)) {
    throw DomainError("stimulus clarity must lie in [0, 1]");
  }
  if (!(degradation >= 0.0 && degradation <= 1.0)) {
    throw DomainError("degradation must lie in [0, 1]");
  }
  return stimulus_clarity - degradation;
}

AdaptiveAssessment classify_phase(double f_c, double s_c, const PhaseParams& params) {
  if (!(f_c >= 0.0 && f_c <= 1.0)) throw DomainError("f_c must lie in [0, 1]");
  if (!(s_c >= -1.0 && s_c <= 1.0)) throw DomainError("s_c must lie in [-1, 1]");
  AdaptiveAssessment a;
  a.f_c = f_c;
  a.s_c = s_c;
  const double gap = f_c - s_c;
  const double eps = params.balance_band;
  if (std::hypot(f_c, s_c) <= params.robust_radius || std::abs(gap) <= eps) {
    a.phase = Phase::kRobust;
  } else if (gap > eps) {
    a.phase = Phase::kEvolvable;
    a.e_d = std::max(0.0, gap - eps);
  } else {
    a.phase = Phase::kBrittle;
    a.b_d = std::max(0.0, -gap - eps);
  }
  a.r_d = std::clamp(1.0 - std::abs(gap), 0.0, 1.0);
  return a;
}

std::vector<double> derivative(std::span<const double> x, double dt) {
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientDataError("derivative needs at least 2 points");
  std::vector<double> d(n);
  d[0] = (x[1] - x[0]) / dt;
  d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
  return d;
}

std::vector<Regime> regime(std::span<const double> f, std::span<const double> s, double dt,
                           const RegimeParams& params) {
  const Difference d = difference(f, s, dt, params);
  std::vector<Regime> out(d.g.size());
  for (std::size_t i = 0; i < d.g.size(); ++i) {
    // dS/dt - dF/dt = -g
    if (-d.g[i] > d.tol) {
      out[i] = Regime::kSampling;
    } else if (-d.g[i] < -d.tol) {
      out[i] = Regime::kConsolidation;
    } else {
      out[i] = Regime::kEquilibrium;
    }
  }
  // A sign change between two samples is an equilibrium crossing; the sample
  // nearer the crossing carries the label.
  for (std::size_t i = 0; i + 1 < d.g.size(); ++i) {
    const bool both_out = std::abs(d.g[i]) > d.tol && std::abs(d.g[i + 1]) > d.tol;
    if (both_out && (d.g[i] > 0.0) != (d.g[i + 1] > 0.0)) {
      out[std::abs(d.g[i]) <= std::abs(d.g[i + 1]) ? i : i + 1] = Regime::kEquilibrium;
    }
  }
  return out;
}

std::vector<double> equilibrium_times(std::span<const double> f, std::span<const double> s,
                                      double dt, const RegimeParams& params, double t0) {
  const Difference d = difference(f, s, dt, params);
  const auto& g = d.g;
  auto time = [&](double index) { return t0 + index * dt; };
  auto in_band = [&](std::size_t i) { return std::abs(g[i]) <= d.tol; };

  std::vector<double> out;
  std::size_t i = 0;
  while (i < g.size()) {
    if (in_band(i)) {
      std::size_t j = i;
      while (j + 1 < g.size() && in_band(j + 1)) ++j;
      out.push_back(time(0.5 * static_cast<double>(i + j)));
      i = j + 1;
      continue;
    }
    if (i + 1 < g.size() && !in_band(i + 1) && (g[i] > 0.0) != (g[i + 1] > 0.0)) {
      const double frac = g[i] / (g[i] - g[i + 1]);
      out.push_back(time(static_cast<double>(i) + frac));
    }
    ++i;
  }
  return out;
}

RegimeSeries analyze_regimes(std::span<const double> f, std::span<const double> s, double dt,
                             const RegimeParams& params, double t0) {
  RegimeSeries r;
  r.regimes = regime(f, s, dt, params);
  r.equilibrium_times = equilibrium_times(f, s, dt, params, t0);
  r.f_values.assign(f.begin(), f.end());
  r.s_values.assign(s.begin(), s.end());
  r.times.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r.times[i] = t0 + static_cast<double>(i) * dt;
  r.identical_series = std::equal(f.begin(), f.end(), s.begin());
  return r;
}

double robustness_indicator(double t_eq) {
  if (std::isnan(t_eq) || t_eq < 0.0) throw DomainError("equilibrium time must be >= 0");
  if (std::isinf(t_eq)) return 0.0;
  return 1.0 / (1.0 + t_eq);
}

}  // namespace adaptloop
