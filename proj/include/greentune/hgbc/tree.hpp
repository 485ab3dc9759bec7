#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "greentune/hgbc/binning.hpp"

namespace greentune::hgbc {

struct TreeNode {
  // Split nodes have feature >= 0; leaves have feature == -1.
  int feature = -1;
  BinIndex bin = 0;
  double threshold = 0.0;  // value <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (already scaled by the learning rate)
  std::uint32_t count = 0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& nodes() { return nodes_; }
  std::size_t leaf_count() const;

  double predict(std::span<const double> features) const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeGrowthParams {
  int max_leaf_nodes = 31;
  int min_samples_leaf = 20;
  double l2 = 0.0;
  double learning_rate = 0.1;
  bool histogram_subtraction = true;
};

/// Grows one regression tree best-first on (gradient, hessian) pairs over all
/// rows of `binned`. When given, `leaf_of_row[r]` receives the id of the leaf
/// that row r ends up in.
Tree grow_tree(const BinnedMatrix& binned, const BinMapper& mapper,
               std::span<const double> gradients, std::span<const double> hessians,
               const TreeGrowthParams& params, std::vector<int>* leaf_of_row = nullptr);

}  // namespace greentune::hgbc
