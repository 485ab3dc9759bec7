#include "greentune/hgbc/binning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greentune/common/error.hpp"

namespace greentune::hgbc {

std::vector<double> quantile_thresholds(std::vector<double> values, int max_bins) {
  if (max_bins < 2 || max_bins > 255) throw ConfigError("max_bins must lie in [2, 255]");
  std::vector<double> thresholds;
  if (values.empty()) return thresholds;
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  std::unique_copy(values.begin(), values.end(), std::back_inserter(distinct));

  if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      thresholds.push_back(distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0);
    }
    return thresholds;
  }

  const std::size_t n = values.size();
  for (int b = 1; b < max_bins; ++b) {
    // Last sample of the b-th equal-count slice, then the midpoint to the next
    // distinct value above it.
    const auto rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(b) * static_cast<double>(n) / max_bins));
    const double lo = values[std::max<std::size_t>(rank, 1) - 1];
    const auto next = std::upper_bound(distinct.begin(), distinct.end(), lo);
    if (next == distinct.end()) break;
    const double t = lo + (*next - lo) / 2.0;
    if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
  }
  return thresholds;
}

BinMapper::BinMapper(std::vector<std::vector<double>> thresholds)
    : thresholds_(std::move(thresholds)) {
  for (const auto& t : thresholds_) {
    if (t.size() > 254) throw ContractError("a feature may have at most 255 bins");
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (!(t[i - 1] < t[i])) throw ContractError("bin thresholds must be strictly increasing");
    }
  }
}

BinMapper BinMapper::fit(const FeatureMatrix& features, int max_bins) {
  if (features.rows() == 0) throw DataError("cannot fit bins on an empty matrix");
  std::vector<std::vector<double>> thresholds(features.cols());
  std::vector<double> column(features.rows());
  for (std::size_t c = 0; c < features.cols(); ++c) {
    for (std::size_t r = 0; r < features.rows(); ++r) column[r] = features(r, c);
    thresholds[c] = quantile_thresholds(column, max_bins);
  }
  return BinMapper(std::move(thresholds));
}

BinIndex BinMapper::bin(std::size_t feature, double value) const {
  const auto& t = thresholds_[feature];
  return static_cast<BinIndex>(std::lower_bound(t.begin(), t.end(), value) - t.begin());
}

BinnedMatrix BinMapper::transform(const FeatureMatrix& features) const {
  if (features.cols() != n_features()) {
    throw ContractError("matrix has " + std::to_string(features.cols()) +
                        " features, bin mapper expects " + std::to_string(n_features()));
  }
  BinnedMatrix out(features.rows(), features.cols());
  for (std::size_t c = 0; c < features.cols(); ++c) {
    auto col = out.column(c);
    for (std::size_t r = 0; r < features.rows(); ++r) col[r] = bin(c, features(r, c));
  }
  return out;
}

}  // namespace greentune::hgbc
