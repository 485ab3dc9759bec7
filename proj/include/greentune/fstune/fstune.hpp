#pragma once

// Wrapper feature selection and HGBC hyperparameter tuning. A genome holds one
// mask cell per feature followed by five parameter cells
// (learning_rate, min_samples_leaf, max_leaf_nodes, l2, max_bins).

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greentune/eval/stats.hpp"
#include "greentune/hgbc/matrix.hpp"
#include "greentune/hgbc/model.hpp"
#include "greentune/optim/core.hpp"
#include "greentune/search/optimizer.hpp"

namespace greentune::fstune {

inline constexpr std::size_t kParamCells = 5;

enum class Variant { fs_only, tune_only, combined };

/// Accepts fs / fs_only, tune / tune_only, combined. Throws ConfigError.
Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);

/// Mask cells for fs_only, parameter cells for tune_only, both for combined.
std::size_t genome_length(Variant v, std::size_t n_features);

/// Search box of the variant: mask cells in [0,1]; learning_rate [0.001,1],
/// min_samples_leaf [1,29], max_leaf_nodes [30,100], l2 [0,3], max_bins
/// [2,255], the three counts integer-valued.
optim::SearchSpace genome_space(Variant v, std::size_t n_features);

/// Indices whose cell is strictly above 0.5, ascending. An empty selection is
/// repaired to the single largest cell (lowest index on ties).
std::vector<std::size_t> decode_mask(std::span<const double> cells);

/// Parameter cells clamped into their ranges, counts rounded half away from
/// zero. Fields outside the genome (n_trees) come from `base`.
hgbc::HgbcParams decode_params(std::span<const double> cells, const hgbc::HgbcParams& base = {});

struct Decoded {
  std::vector<std::size_t> features;
  hgbc::HgbcParams params;

  friend bool operator==(const Decoded&, const Decoded&) = default;
};

/// fs_only keeps `defaults` for the parameters, tune_only selects every feature.
Decoded decode(Variant v, std::span<const double> genome, std::size_t n_features,
               const hgbc::HgbcParams& defaults);

// ---------------------------------------------------------------------------
// Cross-validated evaluation

struct CvOutcome {
  std::vector<int> predictions;  // held-out prediction for every row
  std::size_t misclassified = 0;
  eval::CvSummary summary;       // per-fold accuracy and F-measure

  double error_percent() const;
};

/// Fits on every training split restricted to `features` and predicts the
/// held-out fold.
CvOutcome cross_validate(const hgbc::FeatureMatrix& x, std::span<const int> labels,
                         std::span<const std::size_t> features, const hgbc::HgbcParams& params,
                         const eval::FoldAssignment& folds,
                         eval::FAverage average = eval::FAverage::macro);

struct ObjectiveConfig {
  int inner_k = 5;
  std::uint64_t seed = 0;          // fold assignment seed
  hgbc::HgbcParams defaults;       // parameters not under search; n_trees always
  bool cache = true;
};

/// Pooled held-out classification error, 100 * misclassified / rows, of the
/// decoded genome under inner stratified k-fold CV. The fold assignment is
/// fixed at construction. Safe for concurrent calls.
class FsObjective {
 public:
  FsObjective(hgbc::FeatureMatrix x, std::vector<int> labels, Variant variant,
              ObjectiveConfig config);

  double operator()(std::span<const double> genome) const;
  double evaluate(const Decoded& decoded) const;

  Variant variant() const { return variant_; }
  std::size_t n_features() const { return x_.cols(); }
  const ObjectiveConfig& config() const { return config_; }
  const eval::FoldAssignment& folds() const { return folds_; }
  std::size_t cache_hits() const;
  std::size_t evaluations() const;

 private:
  hgbc::FeatureMatrix x_;
  std::vector<int> labels_;
  Variant variant_;
  ObjectiveConfig config_;
  eval::FoldAssignment folds_;

  mutable std::mutex mutex_;
  mutable std::map<std::vector<double>, double> cache_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t evaluations_ = 0;
};

struct OptimizeConfig {
  search::OptimizerKind optimizer = search::OptimizerKind::lshade;
  search::OptimizerSettings settings;
  optim::RunConfig run;
  ObjectiveConfig objective;
};

struct FsResult {
  Decoded decoded;
  double objective = 0.0;            // percent error of the best genome
  std::vector<double> fold_accuracy; // inner folds of the best genome
  std::vector<double> fold_f_measure;
  optim::RunResult run;
};

/// Runs the optimizer over the variant's genome space on (x, labels).
FsResult optimize(Variant variant, const hgbc::FeatureMatrix& x, std::span<const int> labels,
                  const OptimizeConfig& config);

/// key=value report: variant, optimizer, selected feature names, decoded
/// parameters, objective and per-fold scores.
std::string format_report(const FsResult& result, Variant variant, search::OptimizerKind optimizer,
                          const std::vector<std::string>& feature_names);

// ---------------------------------------------------------------------------
// Filter feature selection

enum class FilterMethod { chi_square, anova_f, mutual_info };

/// Accepts chi_square / chi2, anova_f / f_classif, mutual_info / mi.
FilterMethod parse_filter_method(std::string_view name);
std::string_view to_string(FilterMethod m);

/// Pearson statistic sum (O - E)^2 / E over a row-major contingency table;
/// empty rows and columns are ignored.
double chi_square_statistic(std::span<const double> table, std::size_t rows, std::size_t cols);

/// One relevance score per column. Chi-square and mutual information
/// (nats) use a contingency of up to 10 equal-frequency bins against the
/// class; ANOVA F is the between/within class variance ratio. A constant
/// feature scores 0. Throws StatisticsError with fewer than two classes.
std::vector<double> filter_scores(FilterMethod method, const hgbc::FeatureMatrix& x,
                                  std::span<const int> labels);

/// The k highest scores (lower index wins ties), returned ascending.
/// Throws ContractError unless 1 <= k <= scores.size().
std::vector<std::size_t> select_top_k(std::span<const double> scores, std::size_t k);

}  // namespace greentune::fstune
