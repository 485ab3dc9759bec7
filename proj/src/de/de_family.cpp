#include "greentune/de/de_family.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "greentune/common/error.hpp"

namespace greentune::de {

namespace {

void check_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("vectors differ in dimensionality");
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "de") return Variant::de;
  if (name == "jade") return Variant::jade;
  if (name == "shade") return Variant::shade;
  if (name == "lshade") return Variant::lshade;
  throw ConfigError("unknown DE variant '" + std::string(name) + "'");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::de: return "de";
    case Variant::jade: return "jade";
    case Variant::shade: return "shade";
    case Variant::lshade: return "lshade";
  }
  return "?";
}

MutationStrategy parse_strategy(std::string_view name) {
  if (name == "current-to-rand/1/bin") return MutationStrategy::current_to_rand_1_bin;
  if (name == "current-to-pbest/1/bin") return MutationStrategy::current_to_pbest_1_bin;
  throw ConfigError("unknown mutation strategy '" + std::string(name) +
                    "' (expected current-to-rand/1/bin or current-to-pbest/1/bin)");
}

std::string_view to_string(MutationStrategy s) {
  return s == MutationStrategy::current_to_rand_1_bin ? "current-to-rand/1/bin"
                                                      : "current-to-pbest/1/bin";
}

void DeParams::validate() const {
  if (!(f > 0.0)) throw ConfigError("DE scale factor must be positive");
  if (!(cr >= 0.0 && cr <= 1.0)) throw ConfigError("DE crossover rate must lie in [0,1]");
}

HistoryMemory::HistoryMemory(std::size_t size) : m_cr(size, 0.5), m_f(size, 0.5) {
  if (size == 0) throw ConfigError("history memory size must be positive");
}

void SuccessLog::record(double cr, double f, double improvement) {
  s_cr.push_back(cr);
  s_f.push_back(f);
  improvements.push_back(improvement);
}

void SuccessLog::clear() {
  s_cr.clear();
  s_f.clear();
  improvements.clear();
}

void Archive::trim(std::size_t capacity, Rng& rng) {
  while (members_.size() > capacity) {
    const std::size_t victim = optim::uniform_index(rng, members_.size());
    members_[victim] = std::move(members_.back());
    members_.pop_back();
  }
}

Position mutate_current_to_pbest(std::span<const double> x_i, std::span<const double> x_pbest,
                                 std::span<const double> x_r1, std::span<const double> x_r2,
                                 double f) {
  check_same_dim(x_i, x_pbest);
  check_same_dim(x_i, x_r1);
  check_same_dim(x_i, x_r2);
  Position v(x_i.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = x_i[j] + f * (x_pbest[j] - x_i[j]) + f * (x_r1[j] - x_r2[j]);
  }
  return v;
}

Position mutate_current_to_rand(std::span<const double> x_i, std::span<const double> x_r1,
                                std::span<const double> x_r2, std::span<const double> x_r3,
                                double k, double f) {
  check_same_dim(x_i, x_r1);
  check_same_dim(x_i, x_r2);
  check_same_dim(x_i, x_r3);
  Position v(x_i.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = x_i[j] + k * (x_r1[j] - x_i[j]) + f * (x_r2[j] - x_r3[j]);
  }
  return v;
}

double sample_p(int pop_size, Rng& rng) {
  if (pop_size < 4) throw ContractError("sample_p requires pop_size >= 4");
  const double lo = 2.0 / pop_size;
  if (lo >= 0.2) return 0.2;
  return optim::uniform(rng, lo, 0.2);
}

int pbest_pool_size(double p, int pop_size) {
  const int pool = std::max(2, static_cast<int>(optim::round_half_away(p * pop_size)));
  return std::min(pool, pop_size);
}

double sample_cr(double mean, Rng& rng) {
  const double cr = std::normal_distribution<double>(mean, 0.1)(rng);
  return std::clamp(cr, 0.0, 1.0);
}

double sample_f(double location, Rng& rng) {
  std::cauchy_distribution<double> cauchy(location, 0.1);
  double f = cauchy(rng);
  while (!(f > 0.0)) f = cauchy(rng);
  return std::min(f, 1.0);
}

ControlParams sample_control_params(const HistoryMemory& mem, Rng& rng) {
  const std::size_t r = optim::uniform_index(rng, mem.size());
  ControlParams out;
  out.cr = sample_cr(mem.m_cr[r], rng);
  out.f = sample_f(mem.m_f[r], rng);
  return out;
}

Position binomial_crossover(std::span<const double> x, std::span<const double> v, double cr,
                            std::span<const double> draws, std::size_t j_rand) {
  check_same_dim(x, v);
  if (draws.size() != x.size()) throw ContractError("one crossover draw per dimension required");
  if (j_rand >= x.size()) throw ContractError("j_rand outside the dimensions");
  Position u(x.begin(), x.end());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (draws[j] < cr || j == j_rand) u[j] = v[j];
  }
  return u;
}

Position binomial_crossover(std::span<const double> x, std::span<const double> v, double cr,
                            Rng& rng) {
  const std::size_t j_rand = optim::uniform_index(rng, x.size());
  std::vector<double> draws(x.size());
  for (double& d : draws) d = optim::uniform01(rng);
  return binomial_crossover(x, v, cr, draws, j_rand);
}

double weighted_arithmetic_mean(std::span<const double> values, std::span<const double> weights) {
  check_same_dim(values, weights);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i];
    den += weights[i];
  }
  return num / den;
}

double weighted_lehmer_mean(std::span<const double> values, std::span<const double> weights) {
  check_same_dim(values, weights);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i] * values[i];
    den += weights[i] * values[i];
  }
  return num / den;
}

HistoryMemory update_memory(HistoryMemory mem, const SuccessLog& log) {
  if (log.empty()) return mem;
  const double total = std::accumulate(log.improvements.begin(), log.improvements.end(), 0.0);
  std::vector<double> weights(log.improvements.size());
  if (total > 0.0 && std::isfinite(total)) {
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = log.improvements[i] / total;
  } else {
    std::fill(weights.begin(), weights.end(), 1.0);
  }
  mem.m_cr[mem.k] = weighted_arithmetic_mean(log.s_cr, weights);
  mem.m_f[mem.k] = weighted_lehmer_mean(log.s_f, weights);
  mem.k = (mem.k + 1) % mem.size();
  return mem;
}

int lpsr(int nfe, int p_init, int max_nfe, int p_min) {
  if (nfe < 0 || nfe > max_nfe) throw ContractError("lpsr: nfe outside [0, max_nfe]");
  const double size =
      static_cast<double>(p_min - p_init) / static_cast<double>(max_nfe) * nfe + p_init;
  return static_cast<int>(optim::round_half_away(size));
}

int lpsr(int nfe, const optim::RunConfig& config, int p_min) {
  return lpsr(nfe, config.population_size, config.max_nfe, p_min);
}

namespace {

// Index in [0, n) not contained in `excluded`.
std::size_t draw_excluding(Rng& rng, std::size_t n, std::initializer_list<std::size_t> excluded) {
  for (;;) {
    const std::size_t r = optim::uniform_index(rng, n);
    if (std::find(excluded.begin(), excluded.end(), r) == excluded.end()) return r;
  }
}

struct Population {
  std::vector<Position> x;
  std::vector<double> fitness;

  std::size_t size() const { return x.size(); }

  std::vector<std::size_t> ranking() const {
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    return order;
  }

  // Drops the worst members until `target` remain; among equal fitness the
  // later index goes first.
  void shrink_to(std::size_t target) {
    if (target >= size()) return;
    std::vector<std::size_t> order = ranking();
    order.resize(target);
    std::sort(order.begin(), order.end());
    Population kept;
    for (std::size_t i : order) {
      kept.x.push_back(std::move(x[i]));
      kept.fitness.push_back(fitness[i]);
    }
    *this = std::move(kept);
  }
};

}  // namespace

optim::RunResult run(Variant variant, const optim::Objective& objective,
                     const optim::SearchSpace& space, const optim::RunConfig& config,
                     const Options& options) {
  space.validate();
  config.validate(4);
  options.de.validate();
  if (config.max_nfe < config.population_size) {
    throw BudgetError("insufficient evaluation budget: max_nfe " + std::to_string(config.max_nfe) +
                      " < population size " + std::to_string(config.population_size));
  }
  if (options.shade.min_population < 4 || options.shade.min_population > config.population_size) {
    throw ConfigError("L-SHADE minimum population must lie in [4, population_size]");
  }

  const bool adaptive = variant != Variant::de;
  const MutationStrategy strategy =
      adaptive ? options.adaptive_strategy.value_or(MutationStrategy::current_to_pbest_1_bin)
               : options.de.strategy;
  const bool use_archive =
      strategy == MutationStrategy::current_to_pbest_1_bin && adaptive &&
      (variant != Variant::jade || options.jade.use_archive);

  optim::Rng rng(config.seed);
  optim::RunResult result;
  optim::BestTracker tracker;

  Population pop;
  for (int i = 0; i < config.population_size; ++i) pop.x.push_back(optim::sample_uniform(space, rng));
  pop.fitness = optim::evaluate_batch(objective, pop.x, config.workers);
  int nfe = config.population_size;
  for (std::size_t i = 0; i < pop.size(); ++i) tracker.offer(pop.x[i], pop.fitness[i]);
  tracker.close_generation(result, nfe, static_cast<int>(pop.size()));

  HistoryMemory memory(static_cast<std::size_t>(options.shade.memory_size));
  double mu_cr = options.jade.mu_cr;
  double mu_f = options.jade.mu_f;
  Archive archive;
  SuccessLog successes;

  std::vector<Position> trials;
  std::vector<ControlParams> used;
  while (nfe < config.max_nfe) {
    const std::size_t np = pop.size();
    const std::size_t m = std::min<std::size_t>(np, static_cast<std::size_t>(config.max_nfe - nfe));
    const std::vector<std::size_t> order = pop.ranking();
    trials.clear();
    used.clear();

    for (std::size_t i = 0; i < m; ++i) {
      ControlParams cp;
      switch (variant) {
        case Variant::de:
          cp = {options.de.cr, options.de.f};
          break;
        case Variant::jade:
          cp.cr = sample_cr(mu_cr, rng);
          cp.f = sample_f(mu_f, rng);
          break;
        case Variant::shade:
        case Variant::lshade:
          cp = sample_control_params(memory, rng);
          break;
      }

      Position v;
      if (strategy == MutationStrategy::current_to_pbest_1_bin) {
        const double p = variant == Variant::jade ? options.jade.p
                                                  : sample_p(static_cast<int>(np), rng);
        const auto pool =
            static_cast<std::size_t>(pbest_pool_size(p, static_cast<int>(np)));
        std::size_t pbest = order[optim::uniform_index(rng, pool)];
        while (pbest == i) pbest = order[optim::uniform_index(rng, pool)];
        const std::size_t r1 = draw_excluding(rng, np, {i, pbest});
        const std::size_t donors = np + (use_archive ? archive.size() : 0);
        const std::size_t r2 = draw_excluding(rng, donors, {i, pbest, r1});
        const Position& x_r2 = r2 < np ? pop.x[r2] : archive[r2 - np];
        v = mutate_current_to_pbest(pop.x[i], pop.x[pbest], pop.x[r1], x_r2, cp.f);
      } else {
        const std::size_t r1 = draw_excluding(rng, np, {i});
        const std::size_t r2 = draw_excluding(rng, np, {i, r1});
        const std::size_t r3 = draw_excluding(rng, np, {i, r1, r2});
        const double k = optim::uniform01(rng);
        v = mutate_current_to_rand(pop.x[i], pop.x[r1], pop.x[r2], pop.x[r3], k, cp.f);
      }
      optim::clamp_in_place(v, space);
      trials.push_back(binomial_crossover(pop.x[i], v, cp.cr, rng));
      used.push_back(cp);
    }

    const std::vector<double> trial_fitness = optim::evaluate_batch(objective, trials, config.workers);
    nfe += static_cast<int>(m);

    successes.clear();
    for (std::size_t i = 0; i < m; ++i) {
      tracker.offer(trials[i], trial_fitness[i]);
      if (trial_fitness[i] <= pop.fitness[i]) {
        if (trial_fitness[i] < pop.fitness[i]) {
          if (use_archive) archive.add(pop.x[i]);
          successes.record(used[i].cr, used[i].f, pop.fitness[i] - trial_fitness[i]);
        }
        pop.x[i] = std::move(trials[i]);
        pop.fitness[i] = trial_fitness[i];
      }
    }
    if (use_archive) archive.trim(np, rng);

    if (variant == Variant::shade || variant == Variant::lshade) {
      memory = update_memory(std::move(memory), successes);
    } else if (variant == Variant::jade && !successes.empty()) {
      const std::vector<double> ones(successes.s_cr.size(), 1.0);
      const double c = options.jade.c;
      mu_cr = (1.0 - c) * mu_cr + c * weighted_arithmetic_mean(successes.s_cr, ones);
      mu_f = (1.0 - c) * mu_f + c * weighted_lehmer_mean(successes.s_f, ones);
    }

    if (variant == Variant::lshade) {
      const int target = std::max(options.shade.min_population,
                                  lpsr(nfe, config.population_size, config.max_nfe,
                                       options.shade.min_population));
      if (static_cast<std::size_t>(target) < pop.size()) {
        pop.shrink_to(static_cast<std::size_t>(target));
        archive.trim(pop.size(), rng);
      }
    }
    tracker.close_generation(result, nfe, static_cast<int>(pop.size()));
  }

  for (std::size_t i = 0; i < pop.size(); ++i) {
    result.final_population.push_back({pop.x[i], pop.fitness[i]});
  }
  return result;
}

}  // namespace greentune::de
