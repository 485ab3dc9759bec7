#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "greentune/hgbc/binning.hpp"

namespace greentune::hgbc {

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t count = 0;

  HistBin& operator+=(const HistBin& o) {
    g += o.g;
    h += o.h;
    count += o.count;
    return *this;
  }
  HistBin& operator-=(const HistBin& o) {
    g -= o.g;
    h -= o.h;
    count -= o.count;
    return *this;
  }
  friend bool operator==(const HistBin&, const HistBin&) = default;
};

/// Gradient/hessian/count accumulation of one feature column over the rows of
/// a node.
std::vector<HistBin> build_histogram(std::span<const BinIndex> column,
                                     std::span<const double> gradients,
                                     std::span<const double> hessians,
                                     std::span<const std::uint32_t> rows, std::size_t n_bins);

/// Histograms of every feature for one node, stored back to back, plus the
/// node totals.
class NodeHistogram {
 public:
  NodeHistogram() = default;
  explicit NodeHistogram(const BinMapper& layout);

  /// Accumulates all features over `rows`.
  void build(const BinnedMatrix& binned, std::span<const double> gradients,
             std::span<const double> hessians, std::span<const std::uint32_t> rows);

  std::size_t n_features() const { return offsets_.size() - 1; }
  std::span<const HistBin> feature(std::size_t f) const {
    return {bins_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }
  std::span<HistBin> feature(std::size_t f) {
    return {bins_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }

  const HistBin& total() const { return total_; }
  void set_total(const HistBin& total) { total_ = total; }

  /// Bin-wise this -= other (sibling subtraction); totals are left alone.
  void subtract_bins(const NodeHistogram& other);

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<HistBin> bins_;
  HistBin total_;
};

struct SplitCandidate {
  std::size_t feature = 0;
  BinIndex bin = 0;  // rows with bin <= this go left
  double gain = 0.0;
};

/// Second-order gain 1/2 [GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2)].
double split_gain(double g_left, double h_left, double g_right, double h_right, double l2);

/// Best (feature, bin) over all prefixes that leave at least
/// min_samples_leaf rows on each side; absent when no gain is positive.
/// Ties go to the lowest feature, then the lowest bin.
std::optional<SplitCandidate> find_best_split(const NodeHistogram& hist, double l2,
                                              int min_samples_leaf);

}  // namespace greentune::hgbc
