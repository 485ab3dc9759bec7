#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "greentune/common/error.hpp"
#include "greentune/energy/synth.hpp"
#include "greentune/fstune/fstune.hpp"

using namespace greentune;
using namespace greentune::fstune;

namespace {

std::vector<double> genome_with(std::vector<double> head, std::size_t length) {
  head.resize(length, 0.0);
  return head;
}

// Small three-class fixture: two informative columns, one constant, one noisy.
struct Fixture {
  hgbc::FeatureMatrix x;
  std::vector<int> y;
};

Fixture fixture(std::size_t n) {
  Fixture f;
  f.x = hgbc::FeatureMatrix(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    f.x(i, 0) = c * 10.0 + static_cast<double>(i % 5);
    f.x(i, 1) = static_cast<double>((i * 7) % 11);
    f.x(i, 2) = 4.0;
    f.x(i, 3) = c == 2 ? 1.0 : static_cast<double>(i % 2);
    f.y.push_back(c);
  }
  return f;
}

}  // namespace

TEST_CASE("genome layout") {
  CHECK(genome_length(Variant::fs_only, 32) == 32);
  CHECK(genome_length(Variant::tune_only, 32) == 5);
  CHECK(genome_length(Variant::combined, 32) == 37);
  const auto space = genome_space(Variant::combined, 32);
  CHECK(space.lower[32] == 0.001);
  CHECK(space.upper[33] == 29.0);
  CHECK(space.integer_mask[34]);
  CHECK_FALSE(space.integer_mask[35]);
  CHECK(space.upper[36] == 255.0);
  CHECK(parse_variant("fs") == Variant::fs_only);
  CHECK_THROWS_AS(parse_variant("both"), ConfigError);
}

TEST_CASE("mask decoding") {
  CHECK(decode_mask(genome_with({0.6, 0.4, 0.51}, 32)) == std::vector<std::size_t>{0, 2});
  CHECK(decode_mask(std::vector<double>(32, 1.0)).size() == 32);
  auto low = std::vector<double>(32, 0.3);
  low[7] = 0.45;
  CHECK(decode_mask(low) == std::vector<std::size_t>{7});
  CHECK(decode_mask(std::vector<double>(32, 0.5)) == std::vector<std::size_t>{0});
}

TEST_CASE("parameter decoding") {
  const std::vector<double> cells{0.1, 12.4, 55.7, 1.5, 128.2};
  const auto p = decode_params(cells);
  CHECK(p.learning_rate == 0.1);
  CHECK(p.min_samples_leaf == 12);
  CHECK(p.max_leaf_nodes == 56);
  CHECK(p.l2 == 1.5);
  CHECK(p.max_bins == 128);

  const auto edge = decode_params(std::vector<double>{0.001, 1, 30, 0, 2});
  CHECK(edge.learning_rate == 0.001);
  CHECK(edge.min_samples_leaf == 1);
  CHECK(edge.max_leaf_nodes == 30);
  CHECK(edge.l2 == 0.0);
  CHECK(edge.max_bins == 2);

  CHECK(decode_params(std::vector<double>{0.5, 10, 102.3, 1, 10}).max_leaf_nodes == 100);
  hgbc::HgbcParams base;
  base.n_trees = 7;
  CHECK(decode_params(cells, base).n_trees == 7);
}

TEST_CASE("variant decoding") {
  hgbc::HgbcParams defaults;
  defaults.n_trees = 9;
  const auto fs = decode(Variant::fs_only, genome_with({0.9}, 4), 4, defaults);
  CHECK(fs.features == std::vector<std::size_t>{0});
  CHECK(fs.params == defaults);
  const auto tune = decode(Variant::tune_only, std::vector<double>{0.2, 3, 40, 0, 64}, 4, defaults);
  CHECK(tune.features.size() == 4);
  CHECK(tune.params.min_samples_leaf == 3);
  CHECK(tune.params.n_trees == 9);
  CHECK_THROWS_AS(decode(Variant::combined, std::vector<double>(5), 4, defaults), ContractError);
}

TEST_CASE("objective") {
  const auto f = fixture(90);
  ObjectiveConfig cfg;
  cfg.inner_k = 3;
  cfg.seed = 2;
  cfg.defaults.n_trees = 10;
  cfg.defaults.min_samples_leaf = 5;
  FsObjective obj(f.x, f.y, Variant::fs_only, cfg);

  SUBCASE("separable column gives zero error") {
    CHECK(obj(genome_with({1.0}, 4)) == 0.0);
  }
  SUBCASE("pooled error equals a direct recount") {
    const std::vector<std::size_t> features{1, 3};
    std::size_t wrong = 0;
    for (int k = 0; k < 3; ++k) {
      const auto train = obj.folds().train_indices(k);
      const auto test = obj.folds().test_indices(k);
      std::vector<int> y_train;
      for (auto r : train) y_train.push_back(f.y[r]);
      const auto model = hgbc::fit(f.x.select(train, features), y_train, cfg.defaults);
      const auto pred = model.predict(f.x.select(test, features));
      for (std::size_t i = 0; i < test.size(); ++i) wrong += pred[i] != f.y[test[i]];
    }
    CHECK(obj(genome_with({0.0, 0.9, 0.0, 0.8}, 4)) == 100.0 * static_cast<double>(wrong) / 90.0);
  }
  SUBCASE("cache") {
    const auto g = genome_with({0.0, 0.9, 0.0, 0.8}, 4);
    const double first = obj(g);
    auto same = g;
    same[0] = 0.2;  // decodes to the same selection
    CHECK(obj(same) == first);
    CHECK(obj.cache_hits() == 1);
    CHECK(obj.evaluations() == 1);
  }
}

TEST_CASE("cross-validation error arithmetic") {
  // Four held-out rows with one mistake give 25 percent.
  CvOutcome o;
  o.predictions = {0, 1, 1, 2};
  o.misclassified = 1;
  CHECK(o.error_percent() == 25.0);
}

TEST_CASE("optimize returns a decoded best genome") {
  const auto f = fixture(90);
  OptimizeConfig cfg;
  cfg.run.population_size = 8;
  cfg.run.max_nfe = 24;
  cfg.run.seed = 3;
  cfg.objective.inner_k = 3;
  cfg.objective.defaults.n_trees = 5;
  const auto r = optimize(Variant::combined, f.x, f.y, cfg);
  CHECK(r.run.nfe_used == 24);
  CHECK(r.objective == *r.run.best.fitness);
  CHECK(r.decoded == decode(Variant::combined, r.run.best.position, 4, cfg.objective.defaults));
  CHECK(r.fold_accuracy.size() == 3);
  const auto again = optimize(Variant::combined, f.x, f.y, cfg);
  CHECK(again.decoded == r.decoded);
}

TEST_CASE("chi-square statistic") {
  const std::vector<double> table{30, 10, 10, 30};
  CHECK(std::abs(chi_square_statistic(table, 2, 2) - 20.0) < 1e-9);
  // Independent table.
  CHECK(chi_square_statistic(std::vector<double>{10, 20, 30, 60}, 2, 2) == doctest::Approx(0.0));
  // Empty rows are ignored.
  CHECK(std::abs(chi_square_statistic(std::vector<double>{30, 10, 0, 0, 10, 30}, 3, 2) - 20.0) < 1e-9);
}

TEST_CASE("filter scores") {
  SUBCASE("constant feature scores zero everywhere") {
    const auto f = fixture(60);
    for (auto m : {FilterMethod::chi_square, FilterMethod::anova_f, FilterMethod::mutual_info}) {
      CHECK(filter_scores(m, f.x, f.y)[2] == 0.0);
    }
  }
  SUBCASE("feature identical to a binary label") {
    hgbc::FeatureMatrix x(10, 3);
    std::vector<int> y;
    for (std::size_t i = 0; i < 10; ++i) {
      const int c = i < 4 ? 1 : 0;
      y.push_back(c);
      x(i, 0) = static_cast<double>(i % 3);
      x(i, 1) = c;
      x(i, 2) = static_cast<double>((i * 3) % 7);
    }
    const double p = 0.4;
    const double entropy = -(p * std::log(p) + (1 - p) * std::log(1 - p));
    const auto mi = filter_scores(FilterMethod::mutual_info, x, y);
    CHECK(mi[1] == doctest::Approx(entropy).epsilon(1e-12));
    for (auto m : {FilterMethod::chi_square, FilterMethod::anova_f}) {
      const auto s = filter_scores(m, x, y);
      CHECK(s[1] > s[0]);
      CHECK(s[1] > s[2]);
    }
    // Contingency of the identical feature is diagonal: chi-square = n.
    CHECK(filter_scores(FilterMethod::chi_square, x, y)[1] == doctest::Approx(10.0));
  }
  SUBCASE("single class") {
    const auto f = fixture(6);
    CHECK_THROWS_AS(filter_scores(FilterMethod::anova_f, f.x, std::vector<int>(6, 0)),
                    StatisticsError);
  }
  SUBCASE("mutual information ranks informative features first on synthetic data") {
    const auto r = energy::synthesize(energy::SynthSpec{{0.4, 0.35, 0.25}, 20000, 4, 0.0});
    const auto scores =
        filter_scores(FilterMethod::mutual_info, r.dataset.matrix(), r.dataset.labels());
    double worst_informative = std::numeric_limits<double>::infinity();
    double best_noise = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool informative =
          std::find(r.informative.begin(), r.informative.end(), i) != r.informative.end();
      if (informative) {
        worst_informative = std::min(worst_informative, scores[i]);
      } else {
        best_noise = std::max(best_noise, scores[i]);
      }
    }
    CHECK(worst_informative > best_noise);
  }
}

TEST_CASE("top-k selection") {
  const std::vector<double> s{0.5, 2.0, 2.0, 0.1};
  CHECK(select_top_k(s, 1) == std::vector<std::size_t>{1});
  CHECK(select_top_k(s, 2) == std::vector<std::size_t>{1, 2});
  CHECK(select_top_k(std::vector<double>{1, 3, 3}, 1) == std::vector<std::size_t>{1});
  CHECK(select_top_k(s, 4) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(select_top_k(s, 0), ContractError);
  CHECK_THROWS_AS(select_top_k(s, 5), ContractError);
  CHECK(parse_filter_method("chi2") == FilterMethod::chi_square);
  CHECK_THROWS_AS(parse_filter_method("relief"), ConfigError);
}
