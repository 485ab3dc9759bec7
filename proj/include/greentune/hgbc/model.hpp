#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "greentune/hgbc/binning.hpp"
#include "greentune/hgbc/matrix.hpp"
#include "greentune/hgbc/tree.hpp"

namespace greentune::hgbc {

struct HgbcParams {
  double learning_rate = 0.1;
  int min_samples_leaf = 20;
  int max_leaf_nodes = 31;
  double l2 = 0.0;
  int max_bins = 255;
  int n_trees = 100;  // boosting rounds; not part of the tuned genome

  /// Throws ConfigError when a field leaves its range:
  /// lr [0.001,1], min_samples_leaf [1,29], max_leaf_nodes [30,100],
  /// l2 [0,3], max_bins [2,255], n_trees >= 0.
  void validate() const;
  friend bool operator==(const HgbcParams&, const HgbcParams&) = default;
};

struct FitOptions {
  bool histogram_subtraction = true;
  // When set, receives the mean training cross-entropy before the first round
  // and after every round.
  std::vector<double>* training_loss = nullptr;
};

/// Multi-class softmax gradient boosting over binned features: one tree per
/// class per round.
class HgbcModel {
 public:
  HgbcModel() = default;

  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return classes_.size(); }
  const std::vector<int>& classes() const { return classes_; }
  const std::vector<double>& baseline() const { return baseline_; }
  const HgbcParams& params() const { return params_; }
  const BinMapper& bin_mapper() const { return mapper_; }
  std::size_t n_rounds() const { return classes_.empty() ? 0 : trees_.size() / classes_.size(); }
  const Tree& tree(std::size_t round, std::size_t class_index) const {
    return trees_[round * classes_.size() + class_index];
  }
  const std::vector<Tree>& trees() const { return trees_; }

  /// Softmax probabilities in the order of classes(). Throws ContractError on
  /// a feature-count mismatch.
  std::vector<double> predict_proba(std::span<const double> features) const;
  /// argmax of predict_proba, lowest class index on ties.
  int predict(std::span<const double> features) const;
  std::vector<int> predict(const FeatureMatrix& features) const;

  void save(std::ostream& out) const;
  static HgbcModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static HgbcModel load_file(const std::string& path);

  friend bool operator==(const HgbcModel&, const HgbcModel&) = default;

 private:
  friend HgbcModel fit(const FeatureMatrix&, std::span<const int>, const HgbcParams&,
                       std::uint64_t, const FitOptions&);

  std::vector<double> raw_scores(std::span<const double> features) const;

  std::size_t n_features_ = 0;
  std::vector<int> classes_;
  std::vector<double> baseline_;  // log class priors
  std::vector<Tree> trees_;       // round-major
  BinMapper mapper_;
  HgbcParams params_;
};

/// Trains a model. Single-class data yields a tree-free model that always
/// predicts that class. Throws DataError on empty data or fewer than
/// 2 * min_samples_leaf rows. The seed is recorded for API stability; the
/// procedure itself draws no random numbers.
HgbcModel fit(const FeatureMatrix& features, std::span<const int> labels, const HgbcParams& params,
              std::uint64_t seed = 0, const FitOptions& options = {});

/// Mean multinomial cross-entropy of raw scores against labels.
double cross_entropy(std::span<const double> raw_scores_row_major, std::span<const int> class_index,
                     std::size_t n_classes);

}  // namespace greentune::hgbc
