#include <cmath>
#include <vector>

#include "adaptloop/adaptation.hpp"
#include "adaptloop/error.hpp"
#include "adaptloop/rng.hpp"
#include "doctest.h"

using namespace adaptloop;

namespace {

struct Series {
  std::vector<double> f;
  std::vector<double> s;
};

template <class F, class S>
Series sample(F&& f, S&& s, double dt, double t0 = 0.0, double t1 = 1.0) {
  Series out;
  const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    out.f.push_back(f(t));
    out.s.push_back(s(t));
  }
  return out;
}

double crossing_error(double dt) {
  const auto x = sample([](double t) { return t * t; }, [](double t) { return t; }, dt);
  double best = INFINITY;
  for (double t : equilibrium_times(x.f, x.s, dt)) best = std::min(best, std::abs(t - 0.5));
  return best;
}

}  // namespace

TEST_CASE("fitness coefficient examples and errors") {
  CHECK(fitness_coefficient(5, 0, 10) == 0.5);
  CHECK(fitness_coefficient(-2, -2, 7) == 0.0);
  CHECK(fitness_coefficient(7, -2, 7) == 1.0);
  CHECK_THROWS_AS(fitness_coefficient(1, 1, 1), DegenerateRangeError);
  CHECK_THROWS_AS(fitness_coefficient(11, 0, 10), DomainError);
  CHECK_THROWS_AS(fitness_coefficient(-1, 0, 10), DomainError);
}

TEST_CASE("fitness coefficient is affine invariant") {
  Rng rng = make_rng(5, Stream::kScenario);
  for (int i = 0; i < 1000; ++i) {
    const double lo = uniform01(rng) * 4 - 2;
    const double hi = lo + 0.1 + uniform01(rng) * 3;
    const double x = lo + (hi - lo) * uniform01(rng);
    const double a = 0.001 + uniform01(rng) * 50;
    const double b = uniform01(rng) * 40 - 20;
    CHECK(std::abs(fitness_coefficient(x, lo, hi) -
                   fitness_coefficient(a * x + b, a * lo + b, a * hi + b)) <= 1e-12);
  }
}

TEST_CASE("selection coefficient examples and errors") {
  CHECK(selection_coefficient(1.0, 0.0) == 1.0);
  CHECK(selection_coefficient(0.8, 0.3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(selection_coefficient(0.5, 0.5) == 0.0);
  CHECK_THROWS_AS(selection_coefficient(1.1, 0.0), DomainError);
  CHECK_THROWS_AS(selection_coefficient(0.5, -0.1), DomainError);
}

TEST_CASE("phase classification examples") {
  CHECK(classify_phase(0, 0).phase == Phase::kRobust);
  const auto ev = classify_phase(0.9, 0.1);
  CHECK(ev.phase == Phase::kEvolvable);
  CHECK(ev.e_d == doctest::Approx(0.7));
  CHECK(ev.b_d == 0.0);
  const auto br = classify_phase(0.1, 0.9);
  CHECK(br.phase == Phase::kBrittle);
  CHECK(br.b_d == doctest::Approx(0.7));
  CHECK(br.e_d == 0.0);
  CHECK(classify_phase(0.5, 0.45).phase == Phase::kRobust);
  CHECK_THROWS_AS(classify_phase(1.2, 0.0), DomainError);
  CHECK_THROWS_AS(classify_phase(0.5, -1.5), DomainError);
}

TEST_CASE("phase classification: swap symmetry and exclusive degrees on a grid") {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double f = i / 100.0;
      const double s = j / 100.0;
      const auto a = classify_phase(f, s);
      const auto b = classify_phase(s, f);
      CHECK(a.e_d * a.b_d == 0.0);
      CHECK(a.r_d >= 0.0);
      CHECK(a.r_d <= 1.0);
      if (a.phase == Phase::kRobust) CHECK(b.phase == Phase::kRobust);
      if (a.phase == Phase::kEvolvable) CHECK(b.phase == Phase::kBrittle);
      if (a.phase == Phase::kBrittle) CHECK(b.phase == Phase::kEvolvable);
    }
  }
}

TEST_CASE("phase and regime names round-trip") {
  for (Phase p : {Phase::kEvolvable, Phase::kRobust, Phase::kBrittle}) {
    CHECK(parse_phase(to_string(p)) == p);
  }
  for (Regime r : {Regime::kSampling, Regime::kConsolidation, Regime::kEquilibrium}) {
    CHECK(parse_regime(to_string(r)) == r);
  }
  CHECK_THROWS(parse_phase("Stable"));
}

TEST_CASE("regime on linear series") {
  const double dt = 0.01;
  const auto up = sample([](double t) { return t; }, [](double t) { return 2 * t; }, dt);
  for (Regime r : regime(up.f, up.s, dt)) CHECK(r == Regime::kSampling);
  const auto down = sample([](double t) { return 2 * t; }, [](double t) { return t; }, dt);
  for (Regime r : regime(down.f, down.s, dt)) CHECK(r == Regime::kConsolidation);
  const auto same = sample([](double t) { return std::sin(3 * t); }, [](double t) { return std::sin(3 * t); }, dt);
  for (Regime r : regime(same.f, same.s, dt)) CHECK(r == Regime::kEquilibrium);
  CHECK(analyze_regimes(same.f, same.s, dt).identical_series);
  CHECK_FALSE(analyze_regimes(up.f, up.s, dt).identical_series);
}

TEST_CASE("regime needs at least three points") {
  const std::vector<double> two{0.0, 1.0};
  CHECK_THROWS_AS(regime(two, two, 0.1), InsufficientDataError);
  CHECK_THROWS_AS(equilibrium_times(two, two, 0.1), InsufficientDataError);
}

TEST_CASE("equilibrium times on analytic series") {
  const double dt = 1e-3;
  const auto quad = sample([](double t) { return t * t; }, [](double t) { return t; }, dt);
  const auto eq = equilibrium_times(quad.f, quad.s, dt);
  REQUIRE(eq.size() == 1);
  CHECK(std::abs(eq[0] - 0.5) <= dt);

  const auto parallel = sample([](double t) { return t; }, [](double t) { return t + 1; }, dt);
  const auto plateau = equilibrium_times(parallel.f, parallel.s, dt);
  REQUIRE(plateau.size() == 1);
  CHECK(plateau[0] == doctest::Approx(0.5));

  const auto apart = sample([](double t) { return t; }, [](double t) { return 2 * t; }, dt);
  CHECK(equilibrium_times(apart.f, apart.s, dt).empty());
}

TEST_CASE("equilibrium crossing off the sample grid") {
  for (double dt : {1e-2, 3e-3, 1e-3}) {
    const double t0 = 0.37 * dt;
    const auto x = sample([](double t) { return t * t; }, [](double t) { return t; }, dt, t0, 1.0);
    const auto eq = equilibrium_times(x.f, x.s, dt, {}, t0);
    REQUIRE(eq.size() == 1);
    CHECK(std::abs(eq[0] - 0.5) <= dt);
  }
}

TEST_CASE("equilibrium location converges at first order") {
  for (double dt : {1e-2, 1e-3, 1e-4}) {
    const double e = crossing_error(dt);
    CHECK(e <= dt);
    CHECK(crossing_error(dt / 2) <= std::max(e / 2, 1e-12));
  }
}

TEST_CASE("regime and equilibrium times agree") {
  Rng rng = make_rng(17, Stream::kScenario);
  const double dt = 0.01;
  for (int trial = 0; trial < 50; ++trial) {
    const double w = 2 + 10 * uniform01(rng);
    const double phase = 6 * uniform01(rng);
    const double slope = 2 * uniform01(rng) - 1;
    const auto x = sample([&](double t) { return std::sin(w * t + phase); },
                          [&](double t) { return slope * t; }, dt, 0.0, 3.0);
    const auto series = analyze_regimes(x.f, x.s, dt);
    CHECK(series.times.size() == x.f.size());
    CHECK(series.regimes.size() == x.f.size());
    for (double t : series.equilibrium_times) {
      CHECK(t >= series.times.front());
      CHECK(t <= series.times.back());
      bool covered = false;
      for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.regimes[i] == Regime::kEquilibrium &&
            std::abs(t - series.times[i]) <= dt / 2 + 1e-12) {
          covered = true;
        }
      }
      CHECK(covered);
    }
  }
}

TEST_CASE("robustness indicator") {
  CHECK(robustness_indicator(0.0) == 1.0);
  CHECK(robustness_indicator(1.0) == 0.5);
  CHECK(robustness_indicator(kNoEquilibrium) == 0.0);
  CHECK(robustness_indicator(2.0) < robustness_indicator(1.0));
  CHECK_THROWS_AS(robustness_indicator(-0.1), DomainError);
}

TEST_CASE("derivative uses central differences inside and one-sided ends") {
  const std::vector<double> x{0.0, 1.0, 4.0, 9.0};
  const auto d = derivative(x, 1.0);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 2.0);
  CHECK(d[2] == 4.0);
  CHECK(d[3] == 5.0);
}
