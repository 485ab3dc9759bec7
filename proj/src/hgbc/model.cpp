#include "greentune/hgbc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "greentune/common/error.hpp"

namespace greentune::hgbc {

void HgbcParams::validate() const {
  if (!(learning_rate >= 0.001 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in [0.001, 1]");
  }
  if (min_samples_leaf < 1 || min_samples_leaf > 29) {
    throw ConfigError("min_samples_leaf must lie in [1, 29]");
  }
  if (max_leaf_nodes < 30 || max_leaf_nodes > 100) {
    throw ConfigError("max_leaf_nodes must lie in [30, 100]");
  }
  if (!(l2 >= 0.0 && l2 <= 3.0)) throw ConfigError("l2 must lie in [0, 3]");
  if (max_bins < 2 || max_bins > 255) throw ConfigError("max_bins must lie in [2, 255]");
  if (n_trees < 0) throw ConfigError("n_trees must be non-negative");
}

namespace {

void softmax_in_place(std::span<double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

}  // namespace

double cross_entropy(std::span<const double> raw, std::span<const int> class_index,
                     std::size_t n_classes) {
  const std::size_t n = class_index.size();
  if (raw.size() != n * n_classes) throw ContractError("raw score matrix has the wrong size");
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = raw.data() + i * n_classes;
    const double top = *std::max_element(row, row + n_classes);
    double sum = 0.0;
    for (std::size_t k = 0; k < n_classes; ++k) sum += std::exp(row[k] - top);
    total += top + std::log(sum) - row[static_cast<std::size_t>(class_index[i])];
  }
  return total / static_cast<double>(n);
}

HgbcModel fit(const FeatureMatrix& features, std::span<const int> labels, const HgbcParams& params,
              std::uint64_t /*seed*/, const FitOptions& options) {
  params.validate();
  const std::size_t n = features.rows();
  if (n == 0) throw DataError("cannot fit a model on empty data");
  if (labels.size() != n) throw ContractError("label count differs from row count");

  HgbcModel model;
  model.params_ = params;
  model.n_features_ = features.cols();
  model.classes_.assign(labels.begin(), labels.end());
  std::sort(model.classes_.begin(), model.classes_.end());
  model.classes_.erase(std::unique(model.classes_.begin(), model.classes_.end()),
                       model.classes_.end());
  const std::size_t n_classes = model.classes_.size();

  if (n_classes == 1) {
    model.baseline_ = {0.0};
    model.mapper_ = BinMapper(std::vector<std::vector<double>>(features.cols()));
    return model;
  }
  if (n < 2 * static_cast<std::size_t>(params.min_samples_leaf)) {
    throw DataError("need at least 2 * min_samples_leaf = " +
                    std::to_string(2 * params.min_samples_leaf) + " rows, got " +
                    std::to_string(n));
  }

  std::vector<int> class_index(n);
  std::vector<std::size_t> counts(n_classes, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(model.classes_.begin(), model.classes_.end(), labels[i]);
    class_index[i] = static_cast<int>(it - model.classes_.begin());
    ++counts[static_cast<std::size_t>(class_index[i])];
  }
  model.baseline_.resize(n_classes);
  for (std::size_t k = 0; k < n_classes; ++k) {
    model.baseline_[k] = std::log(static_cast<double>(counts[k]) / static_cast<double>(n));
  }

  model.mapper_ = BinMapper::fit(features, params.max_bins);
  const BinnedMatrix binned = model.mapper_.transform(features);

  std::vector<double> raw(n * n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(model.baseline_.begin(), model.baseline_.end(), raw.begin() + static_cast<std::ptrdiff_t>(i * n_classes));
  }
  if (options.training_loss) {
    options.training_loss->clear();
    options.training_loss->push_back(cross_entropy(raw, class_index, n_classes));
  }

  TreeGrowthParams growth;
  growth.max_leaf_nodes = params.max_leaf_nodes;
  growth.min_samples_leaf = params.min_samples_leaf;
  growth.l2 = params.l2;
  growth.learning_rate = params.learning_rate;
  growth.histogram_subtraction = options.histogram_subtraction;

  std::vector<double> prob(n * n_classes);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<int> leaf_of_row;
  model.trees_.reserve(static_cast<std::size_t>(params.n_trees) * n_classes);
  for (int round = 0; round < params.n_trees; ++round) {
    prob = raw;
    for (std::size_t i = 0; i < n; ++i) {
      softmax_in_place(std::span<double>(prob.data() + i * n_classes, n_classes));
    }
    for (std::size_t k = 0; k < n_classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[i * n_classes + k];
        grad[i] = p - (class_index[i] == static_cast<int>(k) ? 1.0 : 0.0);
        hess[i] = p * (1.0 - p);
      }
      Tree tree = grow_tree(binned, model.mapper_, grad, hess, growth, &leaf_of_row);
      for (std::size_t i = 0; i < n; ++i) {
        raw[i * n_classes + k] += tree.nodes()[static_cast<std::size_t>(leaf_of_row[i])].value;
      }
      model.trees_.push_back(std::move(tree));
    }
    if (options.training_loss) {
      options.training_loss->push_back(cross_entropy(raw, class_index, n_classes));
    }
  }
  return model;
}

std::vector<double> HgbcModel::raw_scores(std::span<const double> features) const {
  if (features.size() != n_features_) {
    throw ContractError("model expects " + std::to_string(n_features_) + " features, got " +
                        std::to_string(features.size()));
  }
  std::vector<double> raw = baseline_;
  const std::size_t c = classes_.size();
  for (std::size_t t = 0; t < trees_.size(); ++t) raw[t % c] += trees_[t].predict(features);
  return raw;
}

std::vector<double> HgbcModel::predict_proba(std::span<const double> features) const {
  std::vector<double> p = raw_scores(features);
  softmax_in_place(p);
  return p;
}

int HgbcModel::predict(std::span<const double> features) const {
  const std::vector<double> p = predict_proba(features);
  const auto best = std::max_element(p.begin(), p.end());  // first maximum
  return classes_[static_cast<std::size_t>(best - p.begin())];
}

std::vector<int> HgbcModel::predict(const FeatureMatrix& features) const {
  std::vector<int> out(features.rows());
  for (std::size_t r = 0; r < features.rows(); ++r) out[r] = predict(features.row(r));
  return out;
}

}  // namespace greentune::hgbc
