#include "greentune/hgbc/histogram.hpp"

#include <cmath>

#include "greentune/common/error.hpp"

namespace greentune::hgbc {

std::vector<HistBin> build_histogram(std::span<const BinIndex> column,
                                     std::span<const double> gradients,
                                     std::span<const double> hessians,
                                     std::span<const std::uint32_t> rows, std::size_t n_bins) {
  std::vector<HistBin> hist(n_bins);
  for (std::uint32_t r : rows) {
    if (r >= column.size()) throw ContractError("histogram row index out of range");
    HistBin& b = hist.at(column[r]);
    b.g += gradients[r];
    b.h += hessians[r];
    ++b.count;
  }
  return hist;
}

NodeHistogram::NodeHistogram(const BinMapper& layout) {
  offsets_.reserve(layout.n_features() + 1);
  for (std::size_t f = 0; f < layout.n_features(); ++f) {
    offsets_.push_back(offsets_.back() + layout.n_bins(f));
  }
}

void NodeHistogram::build(const BinnedMatrix& binned, std::span<const double> gradients,
                          std::span<const double> hessians, std::span<const std::uint32_t> rows) {
  bins_.assign(offsets_.back(), HistBin{});
  HistBin total;
  for (std::uint32_t r : rows) {
    total.g += gradients[r];
    total.h += hessians[r];
    ++total.count;
  }
  total_ = total;
  for (std::size_t f = 0; f < n_features(); ++f) {
    const auto col = binned.column(f);
    HistBin* base = bins_.data() + offsets_[f];
    for (std::uint32_t r : rows) {
      HistBin& b = base[col[r]];
      b.g += gradients[r];
      b.h += hessians[r];
      ++b.count;
    }
  }
}

void NodeHistogram::subtract_bins(const NodeHistogram& other) {
  if (other.bins_.size() != bins_.size()) throw ContractError("histogram layouts differ");
  for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] -= other.bins_[i];
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double l2) {
  const auto term = [l2](double g, double h) {
    const double den = h + l2;
    return den > 0.0 ? g * g / den : 0.0;
  };
  return 0.5 * (term(g_left, h_left) + term(g_right, h_right) -
                term(g_left + g_right, h_left + h_right));
}

std::optional<SplitCandidate> find_best_split(const NodeHistogram& hist, double l2,
                                              int min_samples_leaf) {
  const HistBin& total = hist.total();
  const auto min_leaf = static_cast<std::uint32_t>(std::max(min_samples_leaf, 1));
  if (total.count < 2 * min_leaf) return std::nullopt;

  const double parent = total.h + l2 > 0.0 ? total.g * total.g / (total.h + l2) : 0.0;
  // Gains at or below this level are rounding noise of a homogeneous node.
  const double min_gain = 1e-12 * (1.0 + std::abs(parent));

  std::optional<SplitCandidate> best;
  for (std::size_t f = 0; f < hist.n_features(); ++f) {
    const auto bins = hist.feature(f);
    HistBin left;
    for (std::size_t t = 0; t + 1 < bins.size(); ++t) {
      // An empty bin repeats the partition of the previous threshold, which
      // already won any tie.
      if (bins[t].count == 0) continue;
      left += bins[t];
      if (left.count < min_leaf) continue;
      const std::uint32_t right_count = total.count - left.count;
      if (right_count < min_leaf) break;
      const double gain =
          split_gain(left.g, left.h, total.g - left.g, total.h - left.h, l2);
      if (gain > min_gain && (!best || gain > best->gain)) {
        best = SplitCandidate{f, static_cast<BinIndex>(t), gain};
      }
    }
  }
  return best;
}

}  // namespace greentune::hgbc
