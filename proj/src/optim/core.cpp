#include "greentune/optim/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "greentune/common/error.hpp"

namespace greentune::optim {

SearchSpace SearchSpace::box(std::size_t dim, double lo, double hi) {
  SearchSpace space;
  space.lower.assign(dim, lo);
  space.upper.assign(dim, hi);
  space.integer_mask.assign(dim, false);
  space.validate();
  return space;
}

void SearchSpace::validate() const {
  if (lower.empty()) throw ContractError("search space must have at least one dimension");
  if (upper.size() != lower.size() || integer_mask.size() != lower.size()) {
    throw ContractError("search space bound vectors differ in length");
  }
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!(lower[d] < upper[d])) {
      throw ContractError("search space dimension " + std::to_string(d) +
                          " has lower >= upper");
    }
    if (integer_mask[d] &&
        (lower[d] != round_half_away(lower[d]) || upper[d] != round_half_away(upper[d]))) {
      throw ContractError("integer dimension " + std::to_string(d) +
                          " has non-integral bounds");
    }
  }
}

void RunConfig::validate(int min_population) const {
  if (population_size < min_population) {
    throw ConfigError("population_size must be >= " + std::to_string(min_population));
  }
  if (max_nfe < 1) throw ConfigError("max_nfe must be positive");
}

double round_half_away(double v) { return std::round(v); }

void clamp_in_place(Position& position, const SearchSpace& space) {
  if (position.size() != space.dim()) {
    throw ContractError("position has " + std::to_string(position.size()) +
                        " coordinates, space has " + std::to_string(space.dim()));
  }
  for (std::size_t d = 0; d < position.size(); ++d) {
    double v = std::clamp(position[d], space.lower[d], space.upper[d]);
    if (space.integer_mask[d]) v = round_half_away(v);
    position[d] = v;
  }
}

Position clamp(std::span<const double> position, const SearchSpace& space) {
  Position out(position.begin(), position.end());
  clamp_in_place(out, space);
  return out;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw ContractError("uniform_index over an empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Position sample_uniform(const SearchSpace& space, Rng& rng) {
  Position x(space.dim());
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = uniform(rng, space.lower[d], space.upper[d]);
  clamp_in_place(x, space);
  return x;
}

std::vector<double> evaluate_batch(const Objective& objective,
                                   const std::vector<Position>& positions,
                                   unsigned workers) {
  std::vector<double> out(positions.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(positions.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = objective(positions[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < positions.size(); i += workers) {
            out[i] = objective(positions[i]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void BestTracker::offer(const Position& position, double fitness) {
  if (!best_.fitness || fitness < *best_.fitness) {
    best_.position = position;
    best_.fitness = fitness;
  }
}

void BestTracker::close_generation(RunResult& result, int nfe, int population_size) const {
  result.best = best_;
  result.best_history.push_back(*best_.fitness);
  result.trace.nfe.push_back(nfe);
  result.trace.population_size.push_back(population_size);
  result.nfe_used = nfe;
}

}  // namespace greentune::optim
