#include "greentune/baseline/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "greentune/common/error.hpp"

namespace greentune::baseline {

using optim::Rng;

void GaParams::validate() const {
  if (!(pc >= 0.0 && pc <= 1.0)) throw ConfigError("GA crossover probability must lie in [0,1]");
  if (!(pm >= 0.0 && pm <= 1.0)) throw ConfigError("GA mutation probability must lie in [0,1]");
  if (tournament_size < 2) throw ConfigError("GA tournament size must be >= 2");
}

void PsoParams::validate() const {
  if (!(c1 > 0.0 && c2 > 0.0)) throw ConfigError("PSO acceleration coefficients must be positive");
  if (!(w_min < w_max)) throw ConfigError("PSO requires w_min < w_max");
}

optim::RunResult run_random_search(const optim::Objective& objective,
                                   const optim::SearchSpace& space,
                                   const optim::RunConfig& config) {
  space.validate();
  config.validate(1);
  Rng rng(config.seed);
  optim::RunResult result;
  optim::BestTracker tracker;
  int nfe = 0;
  while (nfe < config.max_nfe) {
    const int m = std::min(config.population_size, config.max_nfe - nfe);
    std::vector<Position> batch;
    for (int i = 0; i < m; ++i) batch.push_back(optim::sample_uniform(space, rng));
    const std::vector<double> fitness = optim::evaluate_batch(objective, batch, config.workers);
    for (int i = 0; i < m; ++i) tracker.offer(batch[i], fitness[i]);
    nfe += m;
    tracker.close_generation(result, nfe, m);
    if (nfe >= config.max_nfe) {
      for (int i = 0; i < m; ++i) result.final_population.push_back({batch[i], fitness[i]});
    }
  }
  return result;
}

namespace {

std::size_t tournament(const std::vector<double>& fitness, int size, Rng& rng) {
  std::size_t winner = optim::uniform_index(rng, fitness.size());
  for (int t = 1; t < size; ++t) {
    const std::size_t challenger = optim::uniform_index(rng, fitness.size());
    if (fitness[challenger] < fitness[winner]) winner = challenger;
  }
  return winner;
}

void mutate_gaussian(Position& child, const optim::SearchSpace& space, double pm, Rng& rng) {
  for (std::size_t d = 0; d < child.size(); ++d) {
    if (optim::uniform01(rng) < pm) {
      child[d] += std::normal_distribution<double>(0.0, 0.1 * space.range(d))(rng);
    }
  }
  optim::clamp_in_place(child, space);
}

}  // namespace

optim::RunResult run_ga(const optim::Objective& objective, const optim::SearchSpace& space,
                        const optim::RunConfig& config, const GaParams& params,
                        std::optional<std::vector<Position>> initial_population) {
  space.validate();
  config.validate(2);
  params.validate();
  if (config.population_size % 2 != 0) throw ConfigError("GA population size must be even");
  if (config.max_nfe < config.population_size) {
    throw BudgetError("insufficient evaluation budget for the initial GA population");
  }

  Rng rng(config.seed);
  std::vector<Position> pop;
  if (initial_population) {
    if (initial_population->size() != static_cast<std::size_t>(config.population_size)) {
      throw ContractError("initial population size does not match population_size");
    }
    for (const Position& x : *initial_population) pop.push_back(optim::clamp(x, space));
  } else {
    for (int i = 0; i < config.population_size; ++i) pop.push_back(optim::sample_uniform(space, rng));
  }

  optim::RunResult result;
  optim::BestTracker tracker;
  std::vector<double> fitness = optim::evaluate_batch(objective, pop, config.workers);
  int nfe = config.population_size;
  for (std::size_t i = 0; i < pop.size(); ++i) tracker.offer(pop[i], fitness[i]);
  tracker.close_generation(result, nfe, config.population_size);

  const std::size_t np = pop.size();
  while (nfe < config.max_nfe) {
    std::vector<Position> children;
    while (children.size() < np - 1) {
      Position a = pop[tournament(fitness, params.tournament_size, rng)];
      Position b = pop[tournament(fitness, params.tournament_size, rng)];
      if (optim::uniform01(rng) < params.pc) {
        const double alpha = optim::uniform01(rng);
        for (std::size_t d = 0; d < a.size(); ++d) {
          const double ad = a[d];
          a[d] = alpha * ad + (1.0 - alpha) * b[d];
          b[d] = (1.0 - alpha) * ad + alpha * b[d];
        }
      }
      mutate_gaussian(a, space, params.pm, rng);
      mutate_gaussian(b, space, params.pm, rng);
      children.push_back(std::move(a));
      if (children.size() < np - 1) children.push_back(std::move(b));
    }
    const std::size_t m = std::min(children.size(), static_cast<std::size_t>(config.max_nfe - nfe));
    children.resize(m);
    const std::vector<double> child_fitness = optim::evaluate_batch(objective, children, config.workers);
    nfe += static_cast<int>(m);

    // Elite first, then the evaluated children, then (only when the budget cut
    // the brood short) the best remaining parents.
    std::vector<std::size_t> order(np);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return fitness[x] < fitness[y]; });
    std::vector<Position> next{pop[order[0]]};
    std::vector<double> next_fitness{fitness[order[0]]};
    for (std::size_t i = 0; i < m; ++i) {
      tracker.offer(children[i], child_fitness[i]);
      next.push_back(std::move(children[i]));
      next_fitness.push_back(child_fitness[i]);
    }
    for (std::size_t r = 1; next.size() < np; ++r) {
      next.push_back(pop[order[r]]);
      next_fitness.push_back(fitness[order[r]]);
    }
    pop = std::move(next);
    fitness = std::move(next_fitness);
    tracker.close_generation(result, nfe, static_cast<int>(np));
  }
  for (std::size_t i = 0; i < pop.size(); ++i) result.final_population.push_back({pop[i], fitness[i]});
  return result;
}

double inertia_weight(int nfe, int max_nfe, const PsoParams& params) {
  const double t = std::clamp(static_cast<double>(nfe) / max_nfe, 0.0, 1.0);
  return params.w_max - (params.w_max - params.w_min) * t;
}

Position pso_velocity(std::span<const double> x, std::span<const double> velocity,
                      std::span<const double> personal_best, std::span<const double> global_best,
                      double w, const PsoParams& params, std::span<const double> r1,
                      std::span<const double> r2, const optim::SearchSpace& space) {
  const std::size_t n = x.size();
  if (velocity.size() != n || personal_best.size() != n || global_best.size() != n ||
      r1.size() != n || r2.size() != n || space.dim() != n) {
    throw ContractError("pso_velocity: dimensionality mismatch");
  }
  Position v(n);
  for (std::size_t d = 0; d < n; ++d) {
    const double raw = w * velocity[d] + params.c1 * r1[d] * (personal_best[d] - x[d]) +
                       params.c2 * r2[d] * (global_best[d] - x[d]);
    v[d] = std::clamp(raw, -space.range(d), space.range(d));
  }
  return v;
}

optim::RunResult run_pso(const optim::Objective& objective, const optim::SearchSpace& space,
                         const optim::RunConfig& config, const PsoParams& params) {
  space.validate();
  config.validate(1);
  params.validate();
  if (config.max_nfe < config.population_size) {
    throw BudgetError("insufficient evaluation budget for the initial swarm");
  }
  Rng rng(config.seed);
  const std::size_t n = static_cast<std::size_t>(config.population_size);
  const std::size_t dim = space.dim();

  std::vector<Position> x(n);
  std::vector<Position> v(n, Position(dim));
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = optim::sample_uniform(space, rng);
    for (std::size_t d = 0; d < dim; ++d) {
      const double span = 0.1 * space.range(d);
      v[i][d] = optim::uniform(rng, -span, span);
    }
  }
  std::vector<double> fx = optim::evaluate_batch(objective, x, config.workers);
  int nfe = static_cast<int>(n);
  std::vector<Position> pbest = x;
  std::vector<double> pbest_fit = fx;

  optim::RunResult result;
  optim::BestTracker tracker;
  for (std::size_t i = 0; i < n; ++i) tracker.offer(x[i], fx[i]);
  tracker.close_generation(result, nfe, static_cast<int>(n));

  std::vector<double> r1(dim);
  std::vector<double> r2(dim);
  while (nfe < config.max_nfe) {
    const std::size_t m = std::min(n, static_cast<std::size_t>(config.max_nfe - nfe));
    const double w = inertia_weight(nfe, config.max_nfe, params);
    const Position gbest = tracker.best().position;
    std::vector<Position> moved;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        r1[d] = optim::uniform01(rng);
        r2[d] = optim::uniform01(rng);
      }
      v[i] = pso_velocity(x[i], v[i], pbest[i], gbest, w, params, r1, r2, space);
      for (std::size_t d = 0; d < dim; ++d) x[i][d] += v[i][d];
      optim::clamp_in_place(x[i], space);
      moved.push_back(x[i]);
    }
    const std::vector<double> fit = optim::evaluate_batch(objective, moved, config.workers);
    nfe += static_cast<int>(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (fit[i] < pbest_fit[i]) {
        pbest[i] = x[i];
        pbest_fit[i] = fit[i];
      }
      tracker.offer(x[i], fit[i]);
    }
    tracker.close_generation(result, nfe, static_cast<int>(n));
  }
  for (std::size_t i = 0; i < n; ++i) result.final_population.push_back({pbest[i], pbest_fit[i]});
  return result;
}

}  // namespace greentune::baseline
