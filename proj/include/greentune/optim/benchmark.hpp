#pragma once

#include <span>
#include <string_view>

#include "greentune/optim/core.hpp"

namespace greentune::optim {

enum class Benchmark { sphere, rastrigin, rosenbrock };

/// Parses "sphere", "rastrigin" or "rosenbrock"; throws ConfigError otherwise.
Benchmark parse_benchmark(std::string_view name);

double benchmark(Benchmark kind, std::span<const double> x);
double benchmark(std::string_view name, std::span<const double> x);

Objective benchmark_objective(Benchmark kind);

}  // namespace greentune::optim
