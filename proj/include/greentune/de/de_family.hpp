#pragma once

// Differential-evolution lineage: classic DE, JADE, SHADE and L-SHADE.
//
// All variants share one generational loop. Within a generation the random
// draws happen in a fixed order, one individual at a time:
//   control parameters -> p / pbest -> r1 -> r2 -> crossover
// and only then are the trial vectors evaluated (possibly concurrently).
// Selection, archive maintenance, memory update and population reduction run
// sequentially afterwards.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "greentune/optim/core.hpp"

namespace greentune::de {

using optim::Position;
using optim::Rng;

enum class Variant { de, jade, shade, lshade };
enum class MutationStrategy { current_to_rand_1_bin, current_to_pbest_1_bin };

Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);
MutationStrategy parse_strategy(std::string_view name);
std::string_view to_string(MutationStrategy s);

struct DeParams {
  double f = 0.8;
  double cr = 0.9;
  MutationStrategy strategy = MutationStrategy::current_to_rand_1_bin;

  void validate() const;
};

struct JadeParams {
  double mu_cr = 0.5;  // initial mean crossover rate
  double mu_f = 0.5;   // initial mean scale factor
  double c = 0.1;      // adaptation rate of the means
  double p = 0.1;      // greediness of current-to-pbest
  bool use_archive = true;
};

struct ShadeParams {
  int memory_size = 50;
  int min_population = 4;  // L-SHADE end-of-run population
};

struct Options {
  DeParams de;
  JadeParams jade;
  ShadeParams shade;
  // Overrides the mutation strategy of the adaptive variants (which default to
  // current-to-pbest/1). Plain DE always follows de.strategy.
  std::optional<MutationStrategy> adaptive_strategy;
};

/// Success-history memory of (CR, F) means; every entry starts at 0.5.
struct HistoryMemory {
  std::vector<double> m_cr;
  std::vector<double> m_f;
  std::size_t k = 0;  // next slot to overwrite, cycles 0..H-1

  explicit HistoryMemory(std::size_t size);
  std::size_t size() const { return m_cr.size(); }
};

/// Control parameters that produced a strictly better trial this generation,
/// weighted by the fitness improvement.
struct SuccessLog {
  std::vector<double> s_cr;
  std::vector<double> s_f;
  std::vector<double> improvements;

  void record(double cr, double f, double improvement);
  void clear();
  bool empty() const { return s_cr.empty(); }
};

/// External archive of parents beaten by their trials.
class Archive {
 public:
  void add(Position position) { members_.push_back(std::move(position)); }
  /// Uniform-random eviction until size <= capacity.
  void trim(std::size_t capacity, Rng& rng);
  std::size_t size() const { return members_.size(); }
  const Position& operator[](std::size_t i) const { return members_[i]; }

 private:
  std::vector<Position> members_;
};

struct ControlParams {
  double cr = 0.0;
  double f = 0.0;
};

/// v = x_i + f (x_pbest - x_i) + f (x_r1 - x_r2); no bound handling.
Position mutate_current_to_pbest(std::span<const double> x_i, std::span<const double> x_pbest,
                                 std::span<const double> x_r1, std::span<const double> x_r2,
                                 double f);

/// v = x_i + k (x_r1 - x_i) + f (x_r2 - x_r3); no bound handling.
Position mutate_current_to_rand(std::span<const double> x_i, std::span<const double> x_r1,
                                std::span<const double> x_r2, std::span<const double> x_r3,
                                double k, double f);

/// Draws p uniformly from [2/pop_size, 0.2]. When 2/pop_size >= 0.2 the
/// interval collapses and 0.2 is returned without consuming the generator.
double sample_p(int pop_size, Rng& rng);

/// Size of the top-p pool: max(2, round(p * pop_size)), capped at pop_size.
int pbest_pool_size(double p, int pop_size);

/// Normal CR clipped to [0,1]; Cauchy F resampled while <= 0 and truncated at 1.
ControlParams sample_control_params(const HistoryMemory& mem, Rng& rng);
double sample_cr(double mean, Rng& rng);
double sample_f(double location, Rng& rng);

/// u_j = v_j if draws[j] < cr or j == j_rand, else x_j.
Position binomial_crossover(std::span<const double> x, std::span<const double> v, double cr,
                            std::span<const double> draws, std::size_t j_rand);
/// Draws j_rand first, then one uniform per dimension.
Position binomial_crossover(std::span<const double> x, std::span<const double> v, double cr,
                            Rng& rng);

double weighted_arithmetic_mean(std::span<const double> values, std::span<const double> weights);
double weighted_lehmer_mean(std::span<const double> values, std::span<const double> weights);

/// Writes the weighted means of the success log into slot k and advances k.
/// An empty log leaves the memory (including k) untouched.
HistoryMemory update_memory(HistoryMemory mem, const SuccessLog& log);

/// Linear population size reduction:
/// round((p_min - p_init) / max_nfe * nfe + p_init).
int lpsr(int nfe, int p_init, int max_nfe, int p_min = 4);
int lpsr(int nfe, const optim::RunConfig& config, int p_min = 4);

/// Runs the requested variant until max_nfe evaluations have been spent.
/// Throws BudgetError when max_nfe cannot cover the initial population.
optim::RunResult run(Variant variant, const optim::Objective& objective,
                     const optim::SearchSpace& space, const optim::RunConfig& config,
                     const Options& options = {});

}  // namespace greentune::de
