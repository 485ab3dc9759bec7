#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greentune/cli/config.hpp"
#include "greentune/energy/dataset.hpp"
#include "greentune/eval/stats.hpp"
#include "greentune/fstune/fstune.hpp"

namespace greentune::cli {

struct FoldRecord {
  int fold = 0;
  double accuracy = 0.0;   // percent, held-out outer fold
  double f_measure = 0.0;  // percent
  fstune::Decoded decoded;
  double inner_objective = 0.0;  // search objective of the chosen genome
  int nfe_used = 0;
};

struct SeedRecord {
  std::uint64_t seed = 0;
  eval::FoldAssignment folds;
  std::vector<FoldRecord> records;
  eval::CvSummary summary;
};

struct RunOutput {
  ExperimentConfig config;
  std::uint64_t dataset_fingerprint = 0;
  std::vector<std::string> feature_names;
  std::vector<SeedRecord> seeds;
  eval::CvSummary aggregate;  // over every fold of every seed
};

/// The configured dataset file, or the synthesized dataset.
energy::Dataset load_dataset(const ExperimentConfig& config);

/// Seed of the search run inside outer fold `fold` (fold -1: global search).
std::uint64_t derive_seed(std::uint64_t seed, int fold);

/// Outer stratified k-fold for one seed. Under the nested protocol each
/// training split gets its own search; under the global protocol one search
/// on the whole dataset is evaluated on every fold.
SeedRecord run_seed(const ExperimentConfig& config, const energy::Dataset& dataset,
                    std::uint64_t seed);
RunOutput run_experiment(const ExperimentConfig& config, const energy::Dataset& dataset);

/// Writes config.txt, manifest.txt, folds.csv, summary.csv, summary.txt and
/// searches.txt into `dir` (created when missing).
void write_run(const RunOutput& run, const std::string& dir);

/// What compare needs from a result directory.
struct StoredRun {
  std::string name;
  std::string dir;
  std::uint64_t dataset_fingerprint = 0;
  int outer_k = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> fold_fingerprints;  // one per seed
  std::vector<double> accuracy;                  // seed-major, fold-minor
  std::vector<double> f_measure;
};

/// Throws DataError when the directory does not hold a complete run.
StoredRun read_run(const std::string& dir);

/// Checks that all runs share dataset, seeds and folds (ProtocolError
/// otherwise), then writes wtl.csv, wtl.txt, summary.csv, summary.txt and
/// pvalues.csv. A repeated name gets a "#2", "#3", ... suffix.
eval::WtlMatrix compare_runs(const std::vector<StoredRun>& runs, const std::string& out_dir,
                             double alpha = 0.05,
                             eval::Sidedness sides = eval::Sidedness::two_sided);

// ---------------------------------------------------------------------------

struct FilterRow {
  std::string label;  // k as text, or "all" for the no-selection baseline
  std::size_t k = 0;
  eval::CvSummary summary;
};

struct FilterConfig {
  fstune::FilterMethod method = fstune::FilterMethod::mutual_info;
  std::vector<std::size_t> ks;  // empty: every k from 1 to the feature count
  int outer_k = 10;
  std::uint64_t seed = 1;
  hgbc::HgbcParams params;
  eval::FAverage f_average = eval::FAverage::macro;
};

/// Outer stratified CV of default HGBC on the top-k features, with the
/// filter scores recomputed on each training split. The first row is the
/// all-features baseline on the same folds.
std::vector<FilterRow> run_filter_fs(const energy::Dataset& dataset, const FilterConfig& config);

/// filter_fs.csv, filter_fs.txt and filter_scores.csv (scores on the whole
/// dataset, with rank) into `dir`.
void write_filter(const std::vector<FilterRow>& rows, const energy::Dataset& dataset,
                  const FilterConfig& config, const std::string& dir);

std::string hex64(std::uint64_t v);

}  // namespace greentune::cli
