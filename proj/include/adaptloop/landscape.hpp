#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaptloop/rng.hpp"

namespace adaptloop {

inline constexpr int kMaxLoci = 24;
inline constexpr int kLandscapeFormatVersion = 1;

// Binary genotype of fixed length, bit i stored at position i of `bits`.
class Genotype {
 public:
  Genotype() = default;
  Genotype(std::uint32_t bits, int length);

  // Parses a string of '0'/'1' characters; character i is locus i.
  static Genotype parse(const std::string& text);

  int length() const { return length_; }
  std::uint32_t bits() const { return bits_; }
  bool bit(int locus) const { return (bits_ >> locus) & 1U; }
  Genotype flipped(int locus) const { return Genotype(bits_ ^ (1U << locus), length_); }
  int hamming(const Genotype& other) const;
  std::string to_string() const;

  friend bool operator==(const Genotype&, const Genotype&) = default;

 private:
  std::uint32_t bits_ = 0;
  int length_ = 0;
};

enum class WalkDirection { kAscent, kDescent };
enum class ExtremumKind { kMaxima, kMinima };

struct TieRule {
  enum class Kind { kLowestIndex, kSeededRandom } kind = Kind::kLowestIndex;
  std::uint64_t seed = 0;

  static TieRule lowest_index() { return {}; }
  static TieRule seeded(std::uint64_t s) { return {Kind::kSeededRandom, s}; }
};

struct Extremum {
  Genotype genotype;
  double fitness = 0.0;
};

struct WalkPath {
  std::vector<Genotype> steps;
  std::vector<double> fitnesses;
  bool terminated_at_extremum = false;
};

struct RuggednessResult {
  double rho = 0.0;
  bool zero_variance = false;
};

struct SurfacePoint {
  int x = 0;
  int y = 0;
  double fitness = 0.0;
};

struct Surface {
  int width = 0;   // cells along x
  int height = 0;  // cells along y
  std::vector<SurfacePoint> points;  // row-major: y outer, x inner
};

// NK landscape. Locus i contributes a value looked up from its own bit and the
// bits of the k cyclically following loci; fitness is the mean contribution.
// Immutable after construction.
class Landscape {
 public:
  static Landscape generate_nk(int n, int k, std::uint64_t seed);

  // Builds a landscape from an explicit contribution table laid out as
  // n blocks of 2^(k+1) entries. Pattern index for locus i has the locus's
  // own bit as the most significant bit followed by loci i+1..i+k.
  static Landscape from_table(int n, int k, std::vector<double> table);

  int n() const { return n_; }
  int k() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> contribution_table() const { return table_; }
  double contribution(int locus, std::uint32_t pattern) const;

  double evaluate(const Genotype& g) const;

  // Fitness of every genotype, indexed by the genotype's bit mask.
  std::vector<double> fitness_table() const;

  std::string to_json() const;
  static Landscape from_json(const std::string& text);

 private:
  Landscape(int n, int k, std::uint64_t seed, std::vector<double> table);
  double evaluate_bits(std::uint32_t bits) const;

  int n_ = 0;
  int k_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> table_;
};

std::vector<Extremum> local_extrema(const Landscape& landscape, ExtremumKind kind);

RuggednessResult ruggedness_autocorrelation(const Landscape& landscape, int walk_length,
                                            std::uint64_t seed);

// Single steepest move; nullopt when no neighbour strictly improves.
// `rng` is only consulted for seeded-random tie breaking.
std::optional<Genotype> steepest_move(const Landscape& landscape, const Genotype& from,
                                      WalkDirection direction, const TieRule& tie, Rng* rng);

WalkPath adaptive_walk(const Landscape& landscape, const Genotype& start,
                       WalkDirection direction, const TieRule& tie, int max_steps);

std::vector<Genotype> neutral_neighbors(const Landscape& landscape, const Genotype& g,
                                        double epsilon);

// Gray-code embedding: the first ceil(n/2) loci give the x coordinate, the rest
// give y. `resolution` caps the number of cells per axis.
Surface export_surface(const Landscape& landscape, int resolution);

Genotype random_genotype(int n, Rng& rng);

}  // namespace adaptloop
