#include "greentune/search/optimizer.hpp"

#include "greentune/common/error.hpp"

namespace greentune::search {

const std::vector<std::string>& optimizer_names() {
  static const std::vector<std::string> names{"rs", "ga", "pso", "de", "jade", "shade", "lshade"};
  return names;
}

OptimizerKind parse_optimizer(std::string_view name) {
  const auto& names = optimizer_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<OptimizerKind>(i);
  }
  std::string valid;
  for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'; valid names: " + valid);
}

std::string_view to_string(OptimizerKind kind) {
  return optimizer_names()[static_cast<std::size_t>(kind)];
}

optim::RunResult run_optimizer(OptimizerKind kind, const optim::Objective& objective,
                               const optim::SearchSpace& space, const optim::RunConfig& config,
                               const OptimizerSettings& settings) {
  switch (kind) {
    case OptimizerKind::rs: return baseline::run_random_search(objective, space, config);
    case OptimizerKind::ga: return baseline::run_ga(objective, space, config, settings.ga);
    case OptimizerKind::pso: return baseline::run_pso(objective, space, config, settings.pso);
    case OptimizerKind::de: return de::run(de::Variant::de, objective, space, config, settings.de);
    case OptimizerKind::jade: return de::run(de::Variant::jade, objective, space, config, settings.de);
    case OptimizerKind::shade:
      return de::run(de::Variant::shade, objective, space, config, settings.de);
    case OptimizerKind::lshade:
      return de::run(de::Variant::lshade, objective, space, config, settings.de);
  }
  throw ContractError("unhandled optimizer kind");
}

}  // namespace greentune::search
