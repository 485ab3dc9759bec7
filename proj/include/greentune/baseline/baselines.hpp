#pragma once

// Non-DE baselines: random search, a generational real-coded GA and a
// global-best PSO. All of them spend exactly max_nfe evaluations.

#include <optional>
#include <span>
#include <vector>

#include "greentune/optim/core.hpp"

namespace greentune::baseline {

using optim::Position;

struct GaParams {
  double pc = 0.95;
  double pm = 0.05;
  int tournament_size = 2;

  void validate() const;
};

struct PsoParams {
  double c1 = 2.05;
  double c2 = 2.05;
  double w_min = 0.4;
  double w_max = 0.9;

  void validate() const;
};

/// max_nfe independent uniform samples, evaluated in batches of
/// population_size (one batch per trace entry).
optim::RunResult run_random_search(const optim::Objective& objective,
                                   const optim::SearchSpace& space,
                                   const optim::RunConfig& config);

/// Tournament selection, arithmetic crossover with probability pc, Gaussian
/// per-gene mutation (sigma = 10% of the range) with probability pm, and an
/// elite of one. Requires an even population.
optim::RunResult run_ga(const optim::Objective& objective, const optim::SearchSpace& space,
                        const optim::RunConfig& config, const GaParams& params = {},
                        std::optional<std::vector<Position>> initial_population = std::nullopt);

/// Inertia decreasing linearly from w_max at nfe = 0 to w_min at max_nfe.
double inertia_weight(int nfe, int max_nfe, const PsoParams& params);

/// One particle velocity update for given per-dimension random factors.
/// Velocities are clamped to +-range of each dimension.
Position pso_velocity(std::span<const double> x, std::span<const double> velocity,
                      std::span<const double> personal_best, std::span<const double> global_best,
                      double w, const PsoParams& params, std::span<const double> r1,
                      std::span<const double> r2, const optim::SearchSpace& space);

optim::RunResult run_pso(const optim::Objective& objective, const optim::SearchSpace& space,
                         const optim::RunConfig& config, const PsoParams& params = {});

}  // namespace greentune::baseline
