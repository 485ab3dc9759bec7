#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "greentune/hgbc/matrix.hpp"

namespace greentune::hgbc {

using BinIndex = std::uint8_t;

/// Column-major matrix of bin indices.
class BinnedMatrix {
 public:
  BinnedMatrix() = default;
  BinnedMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bins_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const BinIndex> column(std::size_t c) const { return {bins_.data() + c * rows_, rows_}; }
  std::span<BinIndex> column(std::size_t c) { return {bins_.data() + c * rows_, rows_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BinIndex> bins_;
};

/// Per-feature quantile thresholds. The bin of a value is the number of
/// thresholds strictly below it, so a split "bin <= t" is the same test as
/// "value <= thresholds[t]".
class BinMapper {
 public:
  BinMapper() = default;
  explicit BinMapper(std::vector<std::vector<double>> thresholds);

  static BinMapper fit(const FeatureMatrix& features, int max_bins);

  std::size_t n_features() const { return thresholds_.size(); }
  std::size_t n_bins(std::size_t feature) const { return thresholds_[feature].size() + 1; }
  const std::vector<double>& thresholds(std::size_t feature) const { return thresholds_[feature]; }

  BinIndex bin(std::size_t feature, double value) const;
  BinnedMatrix transform(const FeatureMatrix& features) const;

  friend bool operator==(const BinMapper&, const BinMapper&) = default;

 private:
  std::vector<std::vector<double>> thresholds_;
};

/// Thresholds for one column: midpoints between adjacent distinct values,
/// one bin per distinct value when there are at most max_bins of them,
/// otherwise roughly equal-count bins.
std::vector<double> quantile_thresholds(std::vector<double> values, int max_bins);

}  // namespace greentune::hgbc
