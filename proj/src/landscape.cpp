#include "adaptloop/landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "adaptloop/error.hpp"
#include "json.hpp"

namespace adaptloop {

namespace {

void check_nk(int n, int k) {
  if (n < 1 || n > kMaxLoci) {
    throw ParameterError("n must satisfy 1 <= n <= " + std::to_string(kMaxLoci) + ", got " +
                         std::to_string(n));
  }
  if (k < 0 || k > n - 1) {
    throw ParameterError("k must satisfy 0 <= k <= n-1 (n=" + std::to_string(n) + "), got " +
                         std::to_string(k));
  }
}

std::size_t table_size(int n, int k) { return static_cast<std::size_t>(n) << (k + 1); }

bool improves(double candidate, double current, WalkDirection dir) {
  return dir == WalkDirection::kAscent ? candidate > current : candidate < current;
}

}  // namespace

Genotype::Genotype(std::uint32_t bits, int length) : bits_(bits), length_(length) {
  if (length < 0 || length > kMaxLoci) throw ParameterError("genotype length out of range");
  if (length < 32 && (bits >> length) != 0) throw ParameterError("genotype bits exceed length");
}

Genotype Genotype::parse(const std::string& text) {
  if (text.size() > static_cast<std::size_t>(kMaxLoci)) {
    throw ParameterError("genotype string longer than " + std::to_string(kMaxLoci));
  }
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      bits |= 1U << i;
    } else if (text[i] != '0') {
      throw ParameterError("genotype string may only contain '0' and '1': " + text);
    }
  }
  return Genotype(bits, static_cast<int>(text.size()));
}

int Genotype::hamming(const Genotype& other) const {
  if (other.length_ != length_) throw ShapeError("hamming distance between different lengths");
  return std::popcount(bits_ ^ other.bits_);
}

std::string Genotype::to_string() const {
  std::string s(static_cast<std::size_t>(length_), '0');
  for (int i = 0; i < length_; ++i) {
    if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

Landscape::Landscape(int n, int k, std::uint64_t seed, std::vector<double> table)
    : n_(n), k_(k), seed_(seed), table_(std::move(table)) {}

Landscape Landscape::generate_nk(int n, int k, std::uint64_t seed) {
  check_nk(n, k);
  Rng rng = make_rng(seed, Stream::kLandscapeTable);
  std::vector<double> table(table_size(n, k));
  for (double& c : table) c = uniform01(rng);
  return Landscape(n, k, seed, std::move(table));
}

Landscape Landscape::from_table(int n, int k, std::vector<double> table) {
  check_nk(n, k);
  if (table.size() != table_size(n, k)) {
    throw ParameterError("contribution table needs n * 2^(k+1) = " +
                         std::to_string(table_size(n, k)) + " entries, got " +
                         std::to_string(table.size()));
  }
  for (double c : table) {
    if (!(c >= 0.0 && c < 1.0)) throw DomainError("contributions must lie in [0, 1)");
  }
  return Landscape(n, k, 0, std::move(table));
}

double Landscape::contribution(int locus, std::uint32_t pattern) const {
  const std::size_t block = std::size_t{1} << (k_ + 1);
  return table_[static_cast<std::size_t>(locus) * block + pattern];
}

double Landscape::evaluate_bits(std::uint32_t bits) const {
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    std::uint32_t pattern = 0;
    for (int j = 0; j <= k_; ++j) {
      pattern = (pattern << 1) | ((bits >> ((i + j) % n_)) & 1U);
    }
    sum += contribution(i, pattern);
  }
  return sum / n_;
}

double Landscape::evaluate(const Genotype& g) const {
  if (g.length() != n_) {
    throw ShapeError("genotype length " + std::to_string(g.length()) +
                     " does not match landscape n=" + std::to_string(n_));
  }
  return evaluate_bits(g.bits());
}

std::vector<double> Landscape::fitness_table() const {
  std::vector<double> out(std::size_t{1} << n_);
  for (std::uint32_t b = 0; b < out.size(); ++b) out[b] = evaluate_bits(b);
  return out;
}

std::string Landscape::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["k"] = k_;
  j["seed"] = seed_;
  j["format_version"] = kLandscapeFormatVersion;
  return j.dump();
}

Landscape Landscape::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("landscape json: ") + e.what());
  }
  for (const char* key : {"n", "k", "seed", "format_version"}) {
    if (!j.contains(key)) throw ParameterError(std::string("landscape json missing '") + key + "'");
  }
  if (j.at("format_version").get<int>() != kLandscapeFormatVersion) {
    throw ParameterError("unsupported landscape format_version");
  }
  return generate_nk(j.at("n").get<int>(), j.at("k").get<int>(),
                     j.at("seed").get<std::uint64_t>());
}

std::vector<Extremum> local_extrema(const Landscape& landscape, ExtremumKind kind) {
  const int n = landscape.n();
  const std::vector<double> fit = landscape.fitness_table();
  const auto dir = kind == ExtremumKind::kMaxima ? WalkDirection::kAscent : WalkDirection::kDescent;
  std::vector<Extremum> out;
  for (std::uint32_t b = 0; b < fit.size(); ++b) {
    bool strict = true;
    for (int i = 0; i < n && strict; ++i) {
      // An extremum must beat every neighbour strictly.
      if (!improves(fit[b], fit[b ^ (1U << i)], dir)) strict = false;
    }
    if (strict) out.push_back({Genotype(b, n), fit[b]});
  }
  return out;
}

RuggednessResult ruggedness_autocorrelation(const Landscape& landscape, int walk_length,
                                            std::uint64_t seed) {
  if (walk_length < 100) throw ParameterError("walk_length must be >= 100");
  Rng rng = make_rng(seed, Stream::kRuggednessWalk);
  Genotype g = random_genotype(landscape.n(), rng);
  std::vector<double> f;
  f.reserve(static_cast<std::size_t>(walk_length));
  f.push_back(landscape.evaluate(g));
  std::uniform_int_distribution<int> pick(0, landscape.n() - 1);
  while (f.size() < static_cast<std::size_t>(walk_length)) {
    g = g.flipped(pick(rng));
    f.push_back(landscape.evaluate(g));
  }
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  double var = 0.0;
  double cov = 0.0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    var += (f[t] - mean) * (f[t] - mean);
    if (t + 1 < f.size()) cov += (f[t] - mean) * (f[t + 1] - mean);
  }
  if (var <= 0.0) return {0.0, true};
  return {std::clamp(cov / var, -1.0, 1.0), false};
}

std::optional<Genotype> steepest_move(const Landscape& landscape, const Genotype& from,
                                      WalkDirection direction, const TieRule& tie, Rng* rng) {
  const double current = landscape.evaluate(from);
  double best = current;
  std::vector<int> best_loci;
  for (int i = 0; i < landscape.n(); ++i) {
    const double f = landscape.evaluate(from.flipped(i));
    if (!improves(f, current, direction)) continue;
    if (best_loci.empty() || improves(f, best, direction)) {
      best = f;
      best_loci.assign(1, i);
    } else if (f == best) {
      best_loci.push_back(i);
    }
  }
  if (best_loci.empty()) return std::nullopt;
  int chosen = best_loci.front();
  if (tie.kind == TieRule::Kind::kSeededRandom && best_loci.size() > 1) {
    if (rng == nullptr) throw ParameterError("seeded-random tie rule needs a generator");
    std::uniform_int_distribution<std::size_t> pick(0, best_loci.size() - 1);
    chosen = best_loci[pick(*rng)];
  }
  return from.flipped(chosen);
}

WalkPath adaptive_walk(const Landscape& landscape, const Genotype& start,
                       WalkDirection direction, const TieRule& tie, int max_steps) {
  if (max_steps < 1) throw ParameterError("max_steps must be >= 1");
  Rng rng = make_rng(tie.seed, Stream::kTieBreak);
  WalkPath path;
  path.steps.push_back(start);
  path.fitnesses.push_back(landscape.evaluate(start));
  for (int s = 0; s < max_steps; ++s) {
    auto next = steepest_move(landscape, path.steps.back(), direction, tie, &rng);
    if (!next) {
      path.terminated_at_extremum = true;
      return path;
    }
    path.steps.push_back(*next);
    path.fitnesses.push_back(landscape.evaluate(*next));
  }
  path.terminated_at_extremum =
      !steepest_move(landscape, path.steps.back(), direction, TieRule::lowest_index(), nullptr);
  return path;
}

std::vector<Genotype> neutral_neighbors(const Landscape& landscape, const Genotype& g,
                                        double epsilon) {
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
  const double f = landscape.evaluate(g);
  std::vector<Genotype> out;
  for (int i = 0; i < landscape.n(); ++i) {
    const Genotype nb = g.flipped(i);
    if (std::abs(landscape.evaluate(nb) - f) <= epsilon) out.push_back(nb);
  }
  return out;
}

Surface export_surface(const Landscape& landscape, int resolution) {
  if (resolution < 2) throw ParameterError("resolution must be >= 2");
  const int n = landscape.n();
  const int x_bits = (n + 1) / 2;
  const int y_bits = n / 2;
  const int x_axis = 1 << x_bits;
  const int y_axis = 1 << y_bits;
  Surface s;
  s.width = std::min(x_axis, resolution);
  s.height = std::min(y_axis, resolution);
  s.points.reserve(static_cast<std::size_t>(s.width) * static_cast<std::size_t>(s.height));
  auto gray = [](std::uint32_t p) { return p ^ (p >> 1); };
  for (int row = 0; row < s.height; ++row) {
    const auto ypos = static_cast<std::uint32_t>(static_cast<long long>(row) * y_axis / s.height);
    for (int col = 0; col < s.width; ++col) {
      const auto xpos = static_cast<std::uint32_t>(static_cast<long long>(col) * x_axis / s.width);
      const std::uint32_t bits = gray(xpos) | (gray(ypos) << x_bits);
      s.points.push_back({static_cast<int>(xpos), static_cast<int>(ypos),
                          landscape.evaluate(Genotype(bits, n))});
    }
  }
  return s;
}

Genotype random_genotype(int n, Rng& rng) {
  std::uint32_t bits = 0;
  for (int i = 0; i < n; ++i) {
    if (rng() >> 63) bits |= 1U << i;
  }
  return Genotype(bits, n);
}

}  // namespace adaptloop
