#include <doctest.h>

#include <cmath>
#include <numbers>

#include "greentune/common/error.hpp"
#include "greentune/optim/benchmark.hpp"
#include "greentune/optim/core.hpp"

using namespace greentune;
using namespace greentune::optim;

namespace {

SearchSpace mixed_space() {
  SearchSpace s;
  s.lower = {0.0, 30.0, -5.0};
  s.upper = {1.0, 100.0, 5.0};
  s.integer_mask = {false, true, false};
  return s;
}

}  // namespace

TEST_CASE("round half away from zero") {
  CHECK(round_half_away(2.5) == 3.0);
  CHECK(round_half_away(-2.5) == -3.0);
  CHECK(round_half_away(55.7) == 56.0);
  CHECK(round_half_away(55.49) == 55.0);
}

TEST_CASE("clamp saturates and rounds") {
  const auto s = mixed_space();
  SUBCASE("in-bounds position is unchanged") {
    const Position p{0.25, 42.0, -1.5};
    CHECK(clamp(p, s) == p);
  }
  SUBCASE("continuous coordinate saturates") {
    CHECK(clamp(Position{1.7, 40.0, 0.0}, s)[0] == 1.0);
    CHECK(clamp(Position{-0.1, 40.0, 0.0}, s)[0] == 0.0);
  }
  SUBCASE("integer coordinate rounds") {
    CHECK(clamp(Position{0.5, 55.7, 0.0}, s)[1] == 56.0);
    CHECK(clamp(Position{0.5, 102.3, 0.0}, s)[1] == 100.0);
  }
  SUBCASE("idempotent") {
    const Position p{3.0, 29.2, -9.0};
    const auto once = clamp(p, s);
    CHECK(clamp(once, s) == once);
  }
  SUBCASE("dimension mismatch") { CHECK_THROWS_AS(clamp(Position{0.1}, s), ContractError); }
}

TEST_CASE("search space validation") {
  auto s = mixed_space();
  CHECK_NOTHROW(s.validate());
  s.upper[0] = -1.0;
  CHECK_THROWS_AS(s.validate(), ContractError);
  auto t = SearchSpace::box(3, -1.0, 1.0);
  t.integer_mask.pop_back();
  CHECK_THROWS_AS(t.validate(), ContractError);
}

TEST_CASE("uniform samples stay inside the space") {
  const auto s = mixed_space();
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto p = sample_uniform(s, rng);
    for (std::size_t d = 0; d < s.dim(); ++d) {
      CHECK(p[d] >= s.lower[d]);
      CHECK(p[d] <= s.upper[d]);
    }
    CHECK(p[1] == std::round(p[1]));
  }
}

TEST_CASE("benchmarks") {
  const std::vector<double> zero(5, 0.0);
  CHECK(benchmark(Benchmark::sphere, zero) == 0.0);
  CHECK(benchmark(Benchmark::rastrigin, zero) == doctest::Approx(0.0));
  CHECK(benchmark(Benchmark::sphere, std::vector<double>{1.0, 2.0}) == 5.0);
  CHECK(benchmark(Benchmark::rosenbrock, std::vector<double>{1.0, 1.0, 1.0}) == 0.0);

  // Independent Rastrigin evaluation.
  const std::vector<double> x{0.5, -1.25, 2.0};
  double expected = 10.0 * 3;
  for (double v : x) expected += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  CHECK(benchmark("rastrigin", x) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(parse_benchmark("ackley"), ConfigError);
}

TEST_CASE("batch evaluation does not depend on the worker count") {
  Rng rng(3);
  const auto s = SearchSpace::box(4, -5.0, 5.0);
  std::vector<Position> positions;
  for (int i = 0; i < 37; ++i) positions.push_back(sample_uniform(s, rng));
  const auto f = benchmark_objective(Benchmark::rastrigin);
  const auto serial = evaluate_batch(f, positions, 1);
  CHECK(evaluate_batch(f, positions, 4) == serial);
  for (std::size_t i = 0; i < positions.size(); ++i) CHECK(serial[i] == f(positions[i]));
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.population_size = 2;
  CHECK_THROWS(c.validate());
  c = RunConfig{};
  c.max_nfe = 0;
  CHECK_THROWS(c.validate());
}
