#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "greentune/common/error.hpp"
#include "greentune/fstune/fstune.hpp"
#include "greentune/hgbc/binning.hpp"

namespace greentune::fstune {

namespace {

constexpr int kFilterBins = 10;

struct Contingency {
  std::vector<double> counts;  // bins x classes, row-major
  std::size_t bins = 0;
  std::size_t classes = 0;
};

Contingency contingency(const hgbc::FeatureMatrix& x, std::size_t col,
                        std::span<const std::size_t> class_index, std::size_t n_classes) {
  std::vector<double> values(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) values[r] = x(r, col);
  const auto thresholds = hgbc::quantile_thresholds(values, kFilterBins);
  Contingency t;
  t.bins = thresholds.size() + 1;
  t.classes = n_classes;
  t.counts.assign(t.bins * t.classes, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto bin = static_cast<std::size_t>(
        std::lower_bound(thresholds.begin(), thresholds.end(), values[r]) - thresholds.begin());
    t.counts[bin * t.classes + class_index[r]] += 1.0;
  }
  return t;
}

double mutual_information(const Contingency& t) {
  double n = 0.0;
  for (double c : t.counts) n += c;
  std::vector<double> row(t.bins, 0.0);
  std::vector<double> col(t.classes, 0.0);
  for (std::size_t b = 0; b < t.bins; ++b) {
    for (std::size_t c = 0; c < t.classes; ++c) {
      row[b] += t.counts[b * t.classes + c];
      col[c] += t.counts[b * t.classes + c];
    }
  }
  double mi = 0.0;
  for (std::size_t b = 0; b < t.bins; ++b) {
    for (std::size_t c = 0; c < t.classes; ++c) {
      const double o = t.counts[b * t.classes + c];
      if (o > 0.0) mi += o / n * std::log(o * n / (row[b] * col[c]));
    }
  }
  return std::max(mi, 0.0);
}

double anova_f(const hgbc::FeatureMatrix& x, std::size_t col,
               std::span<const std::size_t> class_index, std::size_t n_classes) {
  const std::size_t n = x.rows();
  std::vector<double> sum(n_classes, 0.0);
  std::vector<double> count(n_classes, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sum[class_index[r]] += x(r, col);
    count[class_index[r]] += 1.0;
    total += x(r, col);
  }
  const double grand = total / static_cast<double>(n);
  double between = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double m = sum[c] / count[c];
    between += count[c] * (m - grand) * (m - grand);
  }
  double within = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = class_index[r];
    const double d = x(r, col) - sum[c] / count[c];
    within += d * d;
  }
  // Relative cutoff so rounding noise on a constant column does not count.
  const double scale = std::max(1.0, grand * grand) * static_cast<double>(n) * 1e-24;
  if (between <= scale) return 0.0;
  if (within <= scale) return std::numeric_limits<double>::infinity();
  const double df_between = static_cast<double>(n_classes - 1);
  const double df_within = static_cast<double>(n - n_classes);
  if (df_within <= 0.0) return std::numeric_limits<double>::infinity();
  return (between / df_between) / (within / df_within);
}

}  // namespace

FilterMethod parse_filter_method(std::string_view name) {
  if (name == "chi_square" || name == "chi2") return FilterMethod::chi_square;
  if (name == "anova_f" || name == "f_classif") return FilterMethod::anova_f;
  if (name == "mutual_info" || name == "mi") return FilterMethod::mutual_info;
  throw ConfigError("unknown filter method '" + std::string(name) +
                    "' (valid: chi_square, anova_f, mutual_info)");
}

std::string_view to_string(FilterMethod m) {
  switch (m) {
    case FilterMethod::chi_square: return "chi_square";
    case FilterMethod::anova_f: return "anova_f";
    case FilterMethod::mutual_info: return "mutual_info";
  }
  return "?";
}

double chi_square_statistic(std::span<const double> table, std::size_t rows, std::size_t cols) {
  if (table.size() != rows * cols) throw ContractError("contingency table has the wrong size");
  std::vector<double> row(rows, 0.0);
  std::vector<double> col(cols, 0.0);
  double n = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double o = table[r * cols + c];
      if (o < 0.0) throw ContractError("negative contingency count");
      row[r] += o;
      col[c] += o;
      n += o;
    }
  }
  double chi2 = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (row[r] == 0.0 || col[c] == 0.0) continue;
      const double e = row[r] * col[c] / n;
      const double d = table[r * cols + c] - e;
      chi2 += d * d / e;
    }
  }
  return chi2;
}

std::vector<double> filter_scores(FilterMethod method, const hgbc::FeatureMatrix& x,
                                  std::span<const int> labels) {
  if (labels.size() != x.rows()) throw ContractError("label count differs from row count");
  std::map<int, std::size_t> index;
  for (int l : labels) index.emplace(l, 0);
  if (index.size() < 2) throw StatisticsError("filter scores need at least two classes");
  std::size_t next = 0;
  for (auto& [label, i] : index) i = next++;
  std::vector<std::size_t> class_index(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) class_index[r] = index.at(labels[r]);

  std::vector<double> scores(x.cols(), 0.0);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    switch (method) {
      case FilterMethod::chi_square: {
        const auto t = contingency(x, f, class_index, index.size());
        scores[f] = chi_square_statistic(t.counts, t.bins, t.classes);
        break;
      }
      case FilterMethod::mutual_info:
        scores[f] = mutual_information(contingency(x, f, class_index, index.size()));
        break;
      case FilterMethod::anova_f:
        scores[f] = anova_f(x, f, class_index, index.size());
        break;
    }
  }
  return scores;
}

std::vector<std::size_t> select_top_k(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) throw ContractError("k must lie in [1, number of features]");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace greentune::fstune
