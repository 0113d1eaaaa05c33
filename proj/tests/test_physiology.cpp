#include <algorithm>
#include <cmath>

#include "adaptloop/error.hpp"
#include "adaptloop/physiology.hpp"
#include "doctest.h"

using namespace adaptloop;

namespace {

PhysiologicalState peak_state() {
  PhysiologicalState s;
  s.amplitude = 1.0;
  return s;
}

PhysiologicalState at_arousal(double a) {
  PhysiologicalState s = peak_state();
  s.indicators = {a, a, a};
  return s;
}

double channel_spread(const PhysiologicalState& s) {
  const auto [lo, hi] = std::minmax_element(s.indicators.begin(), s.indicators.end());
  return *hi - *lo;
}

}  // namespace

TEST_CASE("performance at the peak and with an offset") {
  auto s = at_arousal(0.5);
  CHECK(performance_of(s) == 1.0);
  s.hysteresis_offset = -0.05;
  CHECK(performance_of(s) == doctest::Approx(0.95).epsilon(1e-15));
  s.hysteresis_offset = 0.2;
  CHECK(performance_of(s) == 1.0);  // clamped
}

TEST_CASE("performance is symmetric about mu and peaks there") {
  const auto s = peak_state();
  for (double d : {0.01, 0.07, 0.2, 0.45}) {
    CHECK(performance_at(s, s.mu + d) == doctest::Approx(performance_at(s, s.mu - d)).epsilon(1e-12));
  }
  double best = -1.0;
  double arg = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double a = i / 1000.0;
    if (performance_at(s, a) > best) {
      best = performance_at(s, a);
      arg = a;
    }
  }
  CHECK(arg == doctest::Approx(s.mu));
}

TEST_CASE("gauge discretization") {
  CHECK(gauge_of(1.0) == 9);
  CHECK(gauge_of(0.0) == 0);
  CHECK(gauge_of(0.65) == 6);
  CHECK(gauge_of(0.3) == 3);
  CHECK_THROWS_AS(gauge_of(-0.01), DomainError);
  CHECK_THROWS_AS(gauge_of(1.01), DomainError);
  CHECK_THROWS_AS(gauge_of(NAN), DomainError);
  int last = 0;
  for (int i = 0; i <= 1000; ++i) {
    const int g = gauge_of(i / 1000.0);
    CHECK(g >= last);
    last = g;
  }
}

TEST_CASE("step: noiseless fixed point") {
  auto s = at_arousal(0.42);
  s.habituation_rates = {0.0, 0.0, 0.0};
  Environment env;
  env.noise_scale = 0.0;
  env.drift_bias = 0.42;
  Rng rng = make_rng(1, Stream::kPhysiology);
  const auto next = step(s, env, 0.1, rng);
  CHECK(next == s);
}

TEST_CASE("step: distinct habituation rates spread identical starts") {
  auto s = at_arousal(0.5);
  s.habituation_rates = {0.0, 0.05, 0.1};
  Environment env;
  env.noise_scale = 0.0;
  const double before = channel_spread(s);
  for (long i = 0; i < 1000; ++i) {
    Rng rng = make_rng(3, Stream::kPhysiology, static_cast<std::uint64_t>(i));
    s = step(s, env, 0.01, rng);
  }
  CHECK(before == 0.0);
  CHECK(channel_spread(s) > 0.01);
}

TEST_CASE("step: same stream gives the same state, results stay in capacity") {
  auto s = at_arousal(0.5);
  Environment env;
  env.noise_scale = 5.0;
  Rng a = make_rng(9, Stream::kPhysiology, 4);
  Rng b = make_rng(9, Stream::kPhysiology, 4);
  const auto x = step(s, env, 0.1, a);
  const auto y = step(s, env, 0.1, b);
  CHECK(x == y);
  for (double v : x.indicators) {
    CHECK(v >= s.capacity.lo);
    CHECK(v <= s.capacity.hi);
  }
  CHECK_THROWS_AS(step(s, env, 0.0, a), ParameterError);
}

TEST_CASE("hysteresis direction") {
  const HysteresisParams p;
  PhysiologicalState s;
  CHECK(apply_hysteresis(s, 0.1, p).hysteresis_offset == doctest::Approx(-0.05));
  CHECK(apply_hysteresis(s, 0.5, p).hysteresis_offset == doctest::Approx(0.05));
  CHECK(apply_hysteresis(s, p.critical_width, p) == s);
  s.hysteresis_offset = 0.2;
  CHECK(apply_hysteresis(s, 0.9, p).hysteresis_offset == 0.2);
  s.hysteresis_offset = -0.2;
  CHECK(apply_hysteresis(s, 0.0, p).hysteresis_offset == -0.2);
  CHECK_THROWS(apply_hysteresis(s, -0.1, p));
}

TEST_CASE("ratchet widens capacity above threshold only") {
  PhysiologicalState s;
  s.capacity = {0.3, 0.7};
  s.indicators = {0.5, 0.5, 0.5};
  CHECK(ratchet_perturb(s, 0.0) == s);
  CHECK(ratchet_perturb(s, 0.2) == s);
  const auto wide = ratchet_perturb(s, 0.5);
  CHECK(wide.capacity.lo == doctest::Approx(0.25));
  CHECK(wide.capacity.hi == doctest::Approx(0.75));
  auto r = s;
  for (int i = 0; i < 50; ++i) {
    const auto next = ratchet_perturb(r, 0.9);
    CHECK(next.capacity.lo <= r.capacity.lo);
    CHECK(next.capacity.hi >= r.capacity.hi);
    r = next;
  }
  CHECK(r.capacity.lo == 0.0);
  CHECK(r.capacity.hi == 1.0);
  CHECK_THROWS(ratchet_perturb(s, -1.0));
}

TEST_CASE("memory consolidation") {
  MemoryState m;
  const auto fear = consolidate_memories(m, {true}, 1);
  CHECK(fear.fear == doctest::Approx(0.95));

  MemoryState free_decl;
  free_decl.interference = 0.0;
  double expect = 0.0;
  for (int i = 0; i < 29; ++i) expect += (1.0 - expect) * 0.1;
  CHECK(consolidate_memories(free_decl, {false}, 29).declarative ==
        doctest::Approx(1.0 - std::pow(0.9, 29)).epsilon(1e-12));
  CHECK(expect == doctest::Approx(0.953).epsilon(1e-3));

  MemoryState blocked;
  blocked.interference = 1.0;
  const auto both = consolidate_memories(blocked, {true}, 1);
  CHECK(both.declarative == doctest::Approx(0.1 * 0.05).epsilon(1e-12));
  CHECK_THROWS(consolidate_memories(m, {false}, 0));
}

TEST_CASE("memory levels are monotone and bounded under any sequence") {
  Rng rng = make_rng(21, Stream::kScenario);
  MemoryState m;
  for (int i = 0; i < 500; ++i) {
    const auto next = consolidate_memories(m, {uniform01(rng) < 0.3}, 1 + static_cast<int>(rng() % 3));
    CHECK(next.fear >= m.fear);
    CHECK(next.declarative >= m.declarative);
    CHECK(next.fear <= 1.0);
    CHECK(next.declarative <= 1.0);
    m = next;
  }
}

TEST_CASE("optimal band width") {
  auto s = peak_state();
  const double expected = 2.0 * 0.15 * std::sqrt(2.0 * std::log(1.0 / 0.6));
  CHECK(optimal_band_width(s, 0.6) == doctest::Approx(expected));
  s.capacity = {0.45, 0.9};
  CHECK(optimal_band_width(s, 0.6) == doctest::Approx(0.5 + expected / 2 - 0.45));
  s.amplitude = 0.5;
  CHECK(optimal_band_width(s, 0.6) == 0.0);
}

TEST_CASE("validate rejects out-of-bound fields") {
  PhysiologicalState s;
  s.sigma = 0.0;
  CHECK_THROWS_AS(validate(s), DomainError);
  s = {};
  s.indicators = {0.95, 0.5, 0.5};
  CHECK_THROWS_AS(validate(s), DomainError);
  Environment e;
  e.degradation = 1.5;
  CHECK_THROWS_AS(validate(e), DomainError);
  MemoryState m;
  m.interference = 2.0;
  CHECK_THROWS_AS(validate(m), DomainError);
}
