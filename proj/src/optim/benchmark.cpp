#include "greentune/optim/benchmark.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "greentune/common/error.hpp"

namespace greentune::optim {

Benchmark parse_benchmark(std::string_view name) {
  if (name == "sphere") return Benchmark::sphere;
  if (name == "rastrigin") return Benchmark::rastrigin;
  if (name == "rosenbrock") return Benchmark::rosenbrock;
  throw ConfigError("unknown benchmark '" + std::string(name) +
                    "' (expected sphere, rastrigin or rosenbrock)");
}

double benchmark(Benchmark kind, std::span<const double> x) {
  double sum = 0.0;
  switch (kind) {
    case Benchmark::sphere:
      for (double v : x) sum += v * v;
      return sum;
    case Benchmark::rastrigin:
      for (double v : x) sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0;
      return sum;
    case Benchmark::rosenbrock:
      // Optimum at (1, ..., 1).
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        sum += 100.0 * a * a + b * b;
      }
      return sum;
  }
  return sum;
}

double benchmark(std::string_view name, std::span<const double> x) {
  return benchmark(parse_benchmark(name), x);
}

Objective benchmark_objective(Benchmark kind) {
  return [kind](std::span<const double> x) { return benchmark(kind, x); };
}

}  // namespace greentune::optim
