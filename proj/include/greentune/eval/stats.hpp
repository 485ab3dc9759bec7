#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace greentune::eval {

// ---------------------------------------------------------------------------
// Cross-validation folds

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold;  // fold index per instance

  std::vector<std::size_t> train_indices(int f) const;
  std::vector<std::size_t> test_indices(int f) const;
  /// FNV-1a digest of (k, fold vector); used to check that runs share folds.
  std::uint64_t fingerprint() const;
};

/// Stratified k-fold: members of each class (visited in ascending label
/// order) are shuffled with one generator seeded by `seed` and dealt round
/// robin, continuing the deal across classes. Fold sizes and per-class fold
/// counts each differ by at most one. Throws StratificationError naming the
/// first class with fewer than k members.
FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scores

enum class FAverage { macro, weighted };

struct Scores {
  double accuracy = 0.0;  // percent
  double f_measure = 0.0; // percent
};

/// Accuracy and F-measure in percent over the classes seen in truth or
/// predictions. Per-class F is 0 when precision + recall = 0.
Scores score(std::span<const int> truth, std::span<const int> predictions,
             FAverage average = FAverage::macro);

struct CvSummary {
  std::vector<double> accuracy;  // per fold, percent
  std::vector<double> f_measure;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // population standard deviation
  double f_mean = 0.0;
  double f_std = 0.0;

  static CvSummary from_folds(std::vector<double> accuracy, std::vector<double> f_measure);
};

double mean(std::span<const double> v);
double population_std(std::span<const double> v);
double median(std::vector<double> v);

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank test

enum class Outcome { a_wins, tie, b_wins };
enum class Sidedness { two_sided, one_sided };

struct WilcoxonResult {
  double p = 1.0;
  Outcome outcome = Outcome::tie;
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::size_t n_effective = 0;
  bool exact = true;
};

/// Paired test on a - b. Zero differences are dropped, tied magnitudes share
/// average ranks. Up to 25 non-zero pairs the p-value is exact (the null
/// distribution over all 2^n sign assignments is counted); beyond that a
/// tie-corrected normal approximation is used. A significant result goes to
/// the side with the larger rank sum.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.05,
                                    Sidedness sides = Sidedness::two_sided);

/// Normal-approximation p-value for the same statistic regardless of n.
double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b,
                         Sidedness sides = Sidedness::two_sided);

// ---------------------------------------------------------------------------
// Win/tie/loss matrix

struct WtlTotals {
  int wins = 0;
  int ties = 0;
  int losses = 0;
};

struct WtlMatrix {
  std::vector<std::string> names;
  // outcome[i][j]: row algorithm i against column algorithm j (diagonal tie).
  std::vector<std::vector<Outcome>> outcome;
  std::vector<std::vector<double>> p_value;
  std::vector<WtlTotals> totals;
};

/// Pairwise Wilcoxon outcomes on per-fold scores (higher is better). Throws
/// ProtocolError when score vectors differ in length.
WtlMatrix wtl_matrix(const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& fold_scores, double alpha = 0.05,
                     Sidedness sides = Sidedness::two_sided);

// ---------------------------------------------------------------------------
// Result tables

struct SummaryRow {
  std::string algorithm;
  CvSummary summary;
};

/// algorithm,accuracy_mean,accuracy_std,f_mean,f_std
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows);
/// Grid of +/-/= with a trailing w/t/l column.
void write_wtl_csv(std::ostream& out, const WtlMatrix& m);
void write_wtl_text(std::ostream& out, const WtlMatrix& m);

/// Fixed two-decimal formatting used by every result table.
std::string format_fixed(double v, int decimals = 2);

}  // namespace greentune::eval
