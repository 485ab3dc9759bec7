#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace greentune::optim {

using Position = std::vector<double>;

// Objective to be minimized. Must be a pure function of the position so it
// can be evaluated concurrently for distinct candidates.
using Objective = std::function<double(std::span<const double>)>;

using Rng = std::mt19937_64;

/// Box-bounded search space. Integer-masked dimensions are rounded to the
/// nearest integer (half away from zero) after every continuous operation.
struct SearchSpace {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer_mask;

  static SearchSpace box(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower.size(); }
  double range(std::size_t d) const { return upper[d] - lower[d]; }

  /// Throws ContractError when the invariants do not hold.
  void validate() const;
};

struct Candidate {
  Position position;
  std::optional<double> fitness;  // absent until evaluated
};

struct RunConfig {
  int population_size = 50;
  int max_nfe = 800;
  std::uint64_t seed = 0;
  // Concurrent objective evaluations per batch; 0 picks hardware concurrency.
  unsigned workers = 1;

  void validate(int min_population = 4) const;
};

// Per-generation bookkeeping. Entry g describes the state after generation g
// (entry 0 is the initial population).
struct GenerationTrace {
  std::vector<int> nfe;
  std::vector<int> population_size;
};

struct RunResult {
  Candidate best;
  std::vector<double> best_history;  // non-increasing
  int nfe_used = 0;
  GenerationTrace trace;
  std::vector<Candidate> final_population;
};

double round_half_away(double v);

/// Saturates each coordinate into [lower, upper] and rounds integer-masked
/// dimensions. Idempotent.
Position clamp(std::span<const double> position, const SearchSpace& space);
void clamp_in_place(Position& position, const SearchSpace& space);

/// Uniform sample inside the space (integer dimensions rounded).
Position sample_uniform(const SearchSpace& space, Rng& rng);

double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Evaluates every position, possibly concurrently. Results are indexed like
/// the input so scheduling never affects outcomes.
std::vector<double> evaluate_batch(const Objective& objective,
                                   const std::vector<Position>& positions,
                                   unsigned workers);

/// Tracks the incumbent and appends to best_history / trace.
class BestTracker {
 public:
  void offer(const Position& position, double fitness);
  void close_generation(RunResult& result, int nfe, int population_size) const;
  const Candidate& best() const { return best_; }

 private:
  Candidate best_;
};

}  // namespace greentune::optim
