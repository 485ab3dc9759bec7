#include "greentune/hgbc/tree.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "greentune/common/error.hpp"
#include "greentune/hgbc/histogram.hpp"

namespace greentune::hgbc {

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

double Tree::predict(std::span<const double> features) const {
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const TreeNode& n = nodes_[id];
    id = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[id].value;
}

namespace {

struct OpenLeaf {
  int node = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  NodeHistogram hist;  // only built for nodes that may still split
  HistBin total;
  std::optional<SplitCandidate> split;
};

double leaf_value(const HistBin& total, const TreeGrowthParams& p) {
  const double den = total.h + p.l2;
  if (!(den > 0.0)) return 0.0;
  return -p.learning_rate * total.g / den;
}

}  // namespace

Tree grow_tree(const BinnedMatrix& binned, const BinMapper& mapper,
               std::span<const double> gradients, std::span<const double> hessians,
               const TreeGrowthParams& params, std::vector<int>* leaf_of_row) {
  const std::size_t n = binned.rows();
  if (gradients.size() != n || hessians.size() != n) {
    throw ContractError("gradient/hessian length differs from row count");
  }
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  const auto span_of = [&rows](std::size_t b, std::size_t e) {
    return std::span<const std::uint32_t>(rows.data() + b, e - b);
  };

  const auto min_leaf = static_cast<std::size_t>(std::max(params.min_samples_leaf, 1));
  const auto may_split = [min_leaf](const OpenLeaf& leaf) {
    return leaf.end - leaf.begin >= 2 * min_leaf;
  };
  const auto direct_total = [&](const OpenLeaf& leaf) {
    HistBin total;
    for (std::uint32_t r : span_of(leaf.begin, leaf.end)) {
      total.g += gradients[r];
      total.h += hessians[r];
      ++total.count;
    }
    return total;
  };
  const auto build = [&](OpenLeaf& leaf) {
    leaf.hist.build(binned, gradients, hessians, span_of(leaf.begin, leaf.end));
  };
  const auto finish = [&](OpenLeaf& leaf) {
    leaf.total = direct_total(leaf);
    leaf.hist.set_total(leaf.total);
    if (may_split(leaf)) leaf.split = find_best_split(leaf.hist, params.l2, params.min_samples_leaf);
  };

  std::vector<TreeNode> nodes(1);
  std::vector<OpenLeaf> open;
  {
    OpenLeaf root{0, 0, n, NodeHistogram(mapper), {}, std::nullopt};
    if (may_split(root)) build(root);
    finish(root);
    open.push_back(std::move(root));
  }

  std::size_t leaves = 1;
  while (leaves < static_cast<std::size_t>(params.max_leaf_nodes)) {
    // Highest gain wins; ties go to the oldest node.
    std::size_t pick = open.size();
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (!open[i].split) continue;
      if (pick == open.size() || open[i].split->gain > open[pick].split->gain ||
          (open[i].split->gain == open[pick].split->gain && open[i].node < open[pick].node)) {
        pick = i;
      }
    }
    if (pick == open.size()) break;

    OpenLeaf parent = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    const SplitCandidate split = *parent.split;
    const auto col = binned.column(split.feature);
    const auto mid_it = std::stable_partition(
        rows.begin() + static_cast<std::ptrdiff_t>(parent.begin),
        rows.begin() + static_cast<std::ptrdiff_t>(parent.end),
        [&](std::uint32_t r) { return col[r] <= split.bin; });
    const auto mid = static_cast<std::size_t>(mid_it - rows.begin());

    const int left_id = static_cast<int>(nodes.size());
    const int right_id = left_id + 1;
    TreeNode& pn = nodes[static_cast<std::size_t>(parent.node)];
    pn.feature = static_cast<int>(split.feature);
    pn.bin = split.bin;
    pn.threshold = mapper.thresholds(split.feature)[split.bin];
    pn.left = left_id;
    pn.right = right_id;
    nodes.resize(nodes.size() + 2);

    OpenLeaf left{left_id, parent.begin, mid, NodeHistogram(mapper), {}, std::nullopt};
    OpenLeaf right{right_id, mid, parent.end, NodeHistogram(mapper), {}, std::nullopt};
    if (params.histogram_subtraction) {
      const bool left_smaller = (mid - parent.begin) <= (parent.end - mid);
      OpenLeaf& small = left_smaller ? left : right;
      OpenLeaf& large = left_smaller ? right : left;
      if (may_split(large)) {
        build(small);
        large.hist = std::move(parent.hist);
        large.hist.subtract_bins(small.hist);
      } else if (may_split(small)) {
        build(small);
      }
    } else {
      if (may_split(left)) build(left);
      if (may_split(right)) build(right);
    }
    // Totals are always summed directly so leaf values do not depend on the
    // histogram mode.
    finish(left);
    finish(right);
    open.push_back(std::move(left));
    open.push_back(std::move(right));
    ++leaves;
  }

  for (const OpenLeaf& leaf : open) {
    TreeNode& node = nodes[static_cast<std::size_t>(leaf.node)];
    node.value = leaf_value(leaf.total, params);
    node.count = leaf.total.count;
    if (leaf_of_row) {
      leaf_of_row->resize(n);
      for (std::uint32_t r : span_of(leaf.begin, leaf.end)) (*leaf_of_row)[r] = leaf.node;
    }
  }
  // Split nodes keep the count of the rows that reached them.
  for (std::size_t i = nodes.size(); i-- > 0;) {
    TreeNode& node = nodes[i];
    if (!node.is_leaf()) {
      node.count = nodes[static_cast<std::size_t>(node.left)].count +
                   nodes[static_cast<std::size_t>(node.right)].count;
    }
  }
  return Tree(std::move(nodes));
}

}  // namespace greentune::hgbc
