#include <algorithm>
#include <cmath>
#include <set>

#include "adaptloop/error.hpp"
#include "adaptloop/landscape.hpp"
#include "doctest.h"

using namespace adaptloop;

namespace {

// Independent evaluation straight from the contribution table.
double table_fitness(const Landscape& land, std::uint32_t bits) {
  const int n = land.n();
  const int k = land.k();
  const auto table = land.contribution_table();
  const std::size_t block = std::size_t{1} << (k + 1);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::uint32_t pattern = 0;
    for (int j = 0; j <= k; ++j) pattern = (pattern << 1) | ((bits >> ((i + j) % n)) & 1U);
    sum += table[static_cast<std::size_t>(i) * block + pattern];
  }
  return sum / n;
}

std::set<std::uint32_t> oracle_extrema(const Landscape& land, bool maxima) {
  std::set<std::uint32_t> out;
  const std::uint32_t count = 1U << land.n();
  for (std::uint32_t b = 0; b < count; ++b) {
    const double f = table_fitness(land, b);
    bool ok = true;
    for (int i = 0; i < land.n() && ok; ++i) {
      const double g = table_fitness(land, b ^ (1U << i));
      ok = maxima ? f > g : f < g;
    }
    if (ok) out.insert(b);
  }
  return out;
}

std::set<std::uint32_t> bits_of(const std::vector<Extremum>& ex) {
  std::set<std::uint32_t> out;
  for (const auto& e : ex) out.insert(e.genotype.bits());
  return out;
}

Landscape two_locus_peaks() {
  // f(00)=0.1, f(01)=0.9, f(10)=0.8, f(11)=0.2 with both loci carrying f.
  return Landscape::from_table(2, 1, {0.1, 0.9, 0.8, 0.2, 0.1, 0.8, 0.9, 0.2});
}

}  // namespace

TEST_CASE("generate_nk rejects out-of-range n and k") {
  CHECK_THROWS_AS(Landscape::generate_nk(0, 0, 1), ParameterError);
  CHECK_THROWS_AS(Landscape::generate_nk(25, 0, 1), ParameterError);
  CHECK_THROWS_AS(Landscape::generate_nk(4, 4, 1), ParameterError);
  CHECK_THROWS_AS(Landscape::generate_nk(4, -1, 1), ParameterError);
  CHECK_NOTHROW(Landscape::generate_nk(24, 23, 1));
}

TEST_CASE("table shape and range") {
  const auto land = Landscape::generate_nk(7, 3, 42);
  const auto t = land.contribution_table();
  CHECK(t.size() == 7u * 16u);
  for (double v : t) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  for (double f : land.fitness_table()) {
    CHECK(f >= 0.0);
    CHECK(f < 1.0);
  }
}

TEST_CASE("regeneration is bit-identical and seeds differ") {
  const auto a = Landscape::generate_nk(9, 4, 123);
  const auto b = Landscape::generate_nk(9, 4, 123);
  const auto c = Landscape::generate_nk(9, 4, 124);
  CHECK(std::equal(a.contribution_table().begin(), a.contribution_table().end(),
                   b.contribution_table().begin()));
  CHECK_FALSE(std::equal(a.contribution_table().begin(), a.contribution_table().end(),
                         c.contribution_table().begin()));
}

TEST_CASE("evaluate matches the independent table oracle") {
  for (int k = 0; k < 6; ++k) {
    const auto land = Landscape::generate_nk(6, k, 9 + k);
    for (std::uint32_t b = 0; b < 64; ++b) {
      CHECK(land.evaluate(Genotype(b, 6)) == doctest::Approx(table_fitness(land, b)).epsilon(1e-15));
    }
  }
}

TEST_CASE("n=2 k=1 hand table: genotype 00 is the mean of two lookups") {
  const auto land = Landscape::from_table(2, 1, {0.2, 0.4, 0.0, 0.0, 0.6, 0.8, 0.0, 0.0});
  CHECK(land.evaluate(Genotype::parse("00")) == doctest::Approx(0.4).epsilon(1e-15));
  // 4 genotypes, each the mean of exactly 2 lookups.
  CHECK(land.fitness_table().size() == 4);
  CHECK(land.evaluate(Genotype::parse("01")) == doctest::Approx((0.4 + 0.0) / 2));
  CHECK(land.evaluate(Genotype::parse("10")) == doctest::Approx((0.0 + 0.8) / 2));
}

TEST_CASE("k=0 symmetric tables give bit-independent fitness") {
  const auto land = Landscape::from_table(3, 0, {0.3, 0.3, 0.7, 0.7, 0.1, 0.1});
  const auto fit = land.fitness_table();
  for (double f : fit) CHECK(f == fit.front());
}

TEST_CASE("evaluate rejects a length mismatch and is deterministic") {
  const auto land = Landscape::generate_nk(5, 2, 3);
  CHECK_THROWS_AS(land.evaluate(Genotype::parse("0101")), ShapeError);
  const auto g = Genotype::parse("01101");
  CHECK(land.evaluate(g) == land.evaluate(g));
}

TEST_CASE("genotype parse and formatting") {
  const auto g = Genotype::parse("1011");
  CHECK(g.length() == 4);
  CHECK(g.bit(0));
  CHECK_FALSE(g.bit(1));
  CHECK(g.to_string() == "1011");
  CHECK(g.flipped(1).to_string() == "1111");
  CHECK(g.hamming(Genotype::parse("0010")) == 2);
  CHECK_THROWS(Genotype::parse("10x1"));
}

TEST_CASE("n=4 k=0 has exactly one optimum") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto land = Landscape::generate_nk(4, 0, s);
    CHECK(local_extrema(land, ExtremumKind::kMaxima).size() == 1);
    CHECK(local_extrema(land, ExtremumKind::kMinima).size() == 1);
  }
}

TEST_CASE("hand-built two-locus landscape has maxima {01, 10}") {
  const auto land = two_locus_peaks();
  CHECK(land.evaluate(Genotype::parse("00")) == doctest::Approx(0.1));
  CHECK(land.evaluate(Genotype::parse("01")) == doctest::Approx(0.9));
  CHECK(land.evaluate(Genotype::parse("10")) == doctest::Approx(0.8));
  CHECK(land.evaluate(Genotype::parse("11")) == doctest::Approx(0.2));
  std::set<std::string> names;
  for (const auto& e : local_extrema(land, ExtremumKind::kMaxima)) names.insert(e.genotype.to_string());
  CHECK(names == std::set<std::string>{"01", "10"});
}

TEST_CASE("local_extrema equals the exhaustive oracle and maxima are never empty") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const int n = 3 + static_cast<int>(s % 8);
    const int k = static_cast<int>(s % static_cast<std::uint64_t>(n));
    const auto land = Landscape::generate_nk(n, k, s);
    const auto maxima = local_extrema(land, ExtremumKind::kMaxima);
    CHECK(!maxima.empty());
    CHECK(bits_of(maxima) == oracle_extrema(land, true));
    CHECK(bits_of(local_extrema(land, ExtremumKind::kMinima)) == oracle_extrema(land, false));
  }
}

TEST_CASE("n=10 k=9 mean optima count is near 2^10/11") {
  double total = 0.0;
  constexpr int kSeeds = 200;
  for (int s = 0; s < kSeeds; ++s) {
    total += static_cast<double>(oracle_extrema(Landscape::generate_nk(10, 9, s), true).size());
  }
  const double expected = 1024.0 / 11.0;
  CHECK(std::abs(total / kSeeds - expected) <= 0.15 * expected);
}

TEST_CASE("ruggedness: flat landscape reports zero variance") {
  const auto land = Landscape::from_table(3, 0, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  const auto r = ruggedness_autocorrelation(land, 200, 1);
  CHECK(r.zero_variance);
  CHECK(r.rho == 0.0);
  CHECK_THROWS_AS(ruggedness_autocorrelation(land, 99, 1), ParameterError);
}

TEST_CASE("ruggedness: deterministic and bounded") {
  const auto land = Landscape::generate_nk(12, 5, 8);
  const auto a = ruggedness_autocorrelation(land, 500, 77);
  const auto b = ruggedness_autocorrelation(land, 500, 77);
  CHECK(a.rho == b.rho);
  CHECK(a.rho >= -1.0);
  CHECK(a.rho <= 1.0);
}

TEST_CASE("ruggedness ordering at n=12: smooth beats fully rugged") {
  double rho_smooth = 0.0;
  double rho_rugged = 0.0;
  double optima_smooth = 0.0;
  double optima_rugged = 0.0;
  constexpr int kSeeds = 50;
  for (int s = 0; s < kSeeds; ++s) {
    const auto smooth = Landscape::generate_nk(12, 0, s);
    const auto rugged = Landscape::generate_nk(12, 11, s);
    rho_smooth += ruggedness_autocorrelation(smooth, 1000, s).rho;
    rho_rugged += ruggedness_autocorrelation(rugged, 1000, s).rho;
    optima_smooth += static_cast<double>(local_extrema(smooth, ExtremumKind::kMaxima).size());
    optima_rugged += static_cast<double>(local_extrema(rugged, ExtremumKind::kMaxima).size());
  }
  CHECK(rho_smooth / kSeeds > rho_rugged / kSeeds);
  CHECK(optima_smooth <= optima_rugged);
}

TEST_CASE("walk from a local maximum stays put") {
  const auto land = two_locus_peaks();
  const auto path =
      adaptive_walk(land, Genotype::parse("01"), WalkDirection::kAscent, TieRule::lowest_index(), 10);
  CHECK(path.steps.size() == 1);
  CHECK(path.fitnesses.size() == 1);
  CHECK(path.terminated_at_extremum);
}

TEST_CASE("k=0 descent always ends at the unique minimum") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto land = Landscape::generate_nk(8, 0, s);
    const auto minimum = *oracle_extrema(land, false).begin();
    Rng rng = make_rng(s, Stream::kWalkStart);
    for (int w = 0; w < 5; ++w) {
      const auto path = adaptive_walk(land, random_genotype(8, rng), WalkDirection::kDescent,
                                      TieRule::lowest_index(), 100);
      CHECK(path.terminated_at_extremum);
      CHECK(path.steps.back().bits() == minimum);
    }
  }
}

TEST_CASE("walks are strictly monotone, single-bit and end in the oracle set") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto land = Landscape::generate_nk(10, 4, s);
    const auto maxima = oracle_extrema(land, true);
    Rng rng = make_rng(s, Stream::kWalkStart);
    for (const auto& tie : {TieRule::lowest_index(), TieRule::seeded(s + 5)}) {
      const auto path = adaptive_walk(land, random_genotype(10, rng), WalkDirection::kAscent, tie, 1000);
      CHECK(path.steps.size() == path.fitnesses.size());
      for (std::size_t i = 1; i < path.steps.size(); ++i) {
        CHECK(path.fitnesses[i] > path.fitnesses[i - 1]);
        CHECK(path.steps[i].hamming(path.steps[i - 1]) == 1);
      }
      CHECK(path.terminated_at_extremum);
      CHECK(maxima.count(path.steps.back().bits()) == 1);
    }
  }
}

TEST_CASE("max_steps cuts a walk short without claiming an extremum") {
  const auto land = Landscape::generate_nk(12, 0, 4);
  const auto peak = *oracle_extrema(land, true).begin();
  const Genotype start(~peak & 0xFFFU, 12);  // 12 flips away from the peak
  const auto path = adaptive_walk(land, start, WalkDirection::kAscent, TieRule::lowest_index(), 3);
  CHECK(path.steps.size() == 4);
  CHECK_FALSE(path.terminated_at_extremum);
  CHECK_THROWS(adaptive_walk(land, start, WalkDirection::kAscent, TieRule::lowest_index(), 0));
}

TEST_CASE("seeded tie rule is reproducible") {
  const auto land = Landscape::from_table(3, 0, {0.1, 0.5, 0.1, 0.5, 0.1, 0.5});
  const auto a = adaptive_walk(land, Genotype::parse("000"), WalkDirection::kAscent, TieRule::seeded(3), 10);
  const auto b = adaptive_walk(land, Genotype::parse("000"), WalkDirection::kAscent, TieRule::seeded(3), 10);
  CHECK(a.steps == b.steps);
  const auto low = adaptive_walk(land, Genotype::parse("000"), WalkDirection::kAscent,
                                 TieRule::lowest_index(), 10);
  CHECK(low.steps[1].to_string() == "100");
}

TEST_CASE("neutral neighbours") {
  const auto land = Landscape::generate_nk(10, 3, 2);
  const auto g = Genotype::parse("0110100110");
  CHECK(neutral_neighbors(land, g, 0.0).empty());
  CHECK(neutral_neighbors(land, g, 1.0).size() == 10);
  CHECK_THROWS(neutral_neighbors(land, g, -0.1));

  // Flipping locus 0 or 1 moves fitness by 0.005; locus 2 by 0.1.
  const auto hand = Landscape::from_table(3, 0, {0.5, 0.515, 0.5, 0.485, 0.5, 0.8});
  std::set<std::string> names;
  for (const auto& n : neutral_neighbors(hand, Genotype::parse("000"), 0.01)) {
    names.insert(n.to_string());
  }
  CHECK(names == std::set<std::string>{"100", "010"});
}

TEST_CASE("surface export covers the genotype space") {
  const auto small = Landscape::generate_nk(2, 1, 6);
  const auto s2 = export_surface(small, 2);
  CHECK(s2.width == 2);
  CHECK(s2.height == 2);
  std::multiset<double> cells;
  for (const auto& p : s2.points) cells.insert(p.fitness);
  const auto table = small.fitness_table();
  CHECK(cells == std::multiset<double>(table.begin(), table.end()));

  for (int n : {5, 6, 9}) {
    const auto land = Landscape::generate_nk(n, 2, n);
    const auto s = export_surface(land, 1 << 12);
    CHECK(s.width == (1 << ((n + 1) / 2)));
    CHECK(s.height == (1 << (n / 2)));
    CHECK(s.points.size() == (std::size_t{1} << n));
    std::set<std::pair<int, int>> coords;
    std::multiset<double> fits;
    for (const auto& p : s.points) {
      coords.insert({p.x, p.y});
      fits.insert(p.fitness);
    }
    CHECK(coords.size() == s.points.size());
    const auto all = land.fitness_table();
    CHECK(fits == std::multiset<double>(all.begin(), all.end()));
  }
  CHECK_THROWS_AS(export_surface(small, 1), ParameterError);
}

TEST_CASE("landscape JSON round-trip") {
  const auto land = Landscape::generate_nk(8, 2, 99);
  const auto back = Landscape::from_json(land.to_json());
  CHECK(back.n() == 8);
  CHECK(back.k() == 2);
  CHECK(back.seed() == 99);
  CHECK(back.fitness_table() == land.fitness_table());
  CHECK(land.to_json().find("\"format_version\"") != std::string::npos);
}
