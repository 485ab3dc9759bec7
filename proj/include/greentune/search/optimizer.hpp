#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "greentune/baseline/baselines.hpp"
#include "greentune/de/de_family.hpp"
#include "greentune/optim/core.hpp"

namespace greentune::search {

enum class OptimizerKind { rs, ga, pso, de, jade, shade, lshade };

struct OptimizerSettings {
  baseline::GaParams ga;
  baseline::PsoParams pso;
  de::Options de;
};

/// Throws ConfigError listing the valid names.
OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind);
const std::vector<std::string>& optimizer_names();

optim::RunResult run_optimizer(OptimizerKind kind, const optim::Objective& objective,
                               const optim::SearchSpace& space, const optim::RunConfig& config,
                               const OptimizerSettings& settings = {});

}  // namespace greentune::search
