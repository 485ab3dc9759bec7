#include "greentune/fstune/fstune.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "greentune/common/error.hpp"
#include "greentune/eval/stats.hpp"

namespace greentune::fstune {

namespace {

struct ParamRange {
  double lo;
  double hi;
  bool integer;
};

constexpr std::array<ParamRange, kParamCells> kRanges{{
    {0.001, 1.0, false},  // learning_rate
    {1.0, 29.0, true},    // min_samples_leaf
    {30.0, 100.0, true},  // max_leaf_nodes
    {0.0, 3.0, false},    // l2
    {2.0, 255.0, true},   // max_bins
}};

bool has_mask(Variant v) { return v != Variant::tune_only; }
bool has_params(Variant v) { return v != Variant::fs_only; }

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "fs" || name == "fs_only") return Variant::fs_only;
  if (name == "tune" || name == "tune_only") return Variant::tune_only;
  if (name == "combined") return Variant::combined;
  throw ConfigError("unknown variant '" + std::string(name) + "' (valid: fs, tune, combined)");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::fs_only: return "fs_only";
    case Variant::tune_only: return "tune_only";
    case Variant::combined: return "combined";
  }
  return "?";
}

std::size_t genome_length(Variant v, std::size_t n_features) {
  return (has_mask(v) ? n_features : 0) + (has_params(v) ? kParamCells : 0);
}

optim::SearchSpace genome_space(Variant v, std::size_t n_features) {
  optim::SearchSpace space;
  if (has_mask(v)) {
    space.lower.assign(n_features, 0.0);
    space.upper.assign(n_features, 1.0);
    space.integer_mask.assign(n_features, false);
  }
  if (has_params(v)) {
    for (const auto& r : kRanges) {
      space.lower.push_back(r.lo);
      space.upper.push_back(r.hi);
      space.integer_mask.push_back(r.integer);
    }
  }
  return space;
}

std::vector<std::size_t> decode_mask(std::span<const double> cells) {
  if (cells.empty()) throw ContractError("empty mask");
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] > 0.5) selected.push_back(i);
  }
  if (selected.empty()) {
    const auto top = std::max_element(cells.begin(), cells.end());
    selected.push_back(static_cast<std::size_t>(top - cells.begin()));
  }
  return selected;
}

hgbc::HgbcParams decode_params(std::span<const double> cells, const hgbc::HgbcParams& base) {
  if (cells.size() != kParamCells) throw ContractError("expected 5 parameter cells");
  std::array<double, kParamCells> v{};
  for (std::size_t i = 0; i < kParamCells; ++i) {
    if (!std::isfinite(cells[i])) throw ContractError("non-finite parameter cell");
    v[i] = std::clamp(cells[i], kRanges[i].lo, kRanges[i].hi);
    if (kRanges[i].integer) v[i] = optim::round_half_away(v[i]);
  }
  hgbc::HgbcParams p = base;
  p.learning_rate = v[0];
  p.min_samples_leaf = static_cast<int>(v[1]);
  p.max_leaf_nodes = static_cast<int>(v[2]);
  p.l2 = v[3];
  p.max_bins = static_cast<int>(v[4]);
  return p;
}

Decoded decode(Variant v, std::span<const double> genome, std::size_t n_features,
               const hgbc::HgbcParams& defaults) {
  if (genome.size() != genome_length(v, n_features)) {
    throw ContractError("genome length does not match the variant");
  }
  Decoded d;
  d.params = defaults;
  if (has_mask(v)) {
    d.features = decode_mask(genome.first(n_features));
  } else {
    d.features.resize(n_features);
    std::iota(d.features.begin(), d.features.end(), std::size_t{0});
  }
  if (has_params(v)) d.params = decode_params(genome.last(kParamCells), defaults);
  return d;
}

// ---------------------------------------------------------------------------

double CvOutcome::error_percent() const {
  if (predictions.empty()) return 0.0;
  return 100.0 * static_cast<double>(misclassified) / static_cast<double>(predictions.size());
}

CvOutcome cross_validate(const hgbc::FeatureMatrix& x, std::span<const int> labels,
                         std::span<const std::size_t> features, const hgbc::HgbcParams& params,
                         const eval::FoldAssignment& folds, eval::FAverage average) {
  if (labels.size() != x.rows() || folds.fold.size() != x.rows()) {
    throw ContractError("rows, labels and fold assignment differ in length");
  }
  CvOutcome out;
  out.predictions.assign(x.rows(), 0);
  std::vector<double> acc;
  std::vector<double> fm;
  for (int f = 0; f < folds.k; ++f) {
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    std::vector<int> train_labels;
    train_labels.reserve(train.size());
    for (std::size_t r : train) train_labels.push_back(labels[r]);
    const auto model = hgbc::fit(x.select(train, features), train_labels, params, folds.seed);
    const auto test_x = x.select(test, features);
    const auto pred = model.predict(test_x);
    std::vector<int> truth;
    truth.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      out.predictions[test[i]] = pred[i];
      truth.push_back(labels[test[i]]);
      if (pred[i] != labels[test[i]]) ++out.misclassified;
    }
    const auto s = eval::score(truth, pred, average);
    acc.push_back(s.accuracy);
    fm.push_back(s.f_measure);
  }
  out.summary = eval::CvSummary::from_folds(std::move(acc), std::move(fm));
  return out;
}

FsObjective::FsObjective(hgbc::FeatureMatrix x, std::vector<int> labels, Variant variant,
                         ObjectiveConfig config)
    : x_(std::move(x)), labels_(std::move(labels)), variant_(variant), config_(config) {
  if (labels_.size() != x_.rows()) throw ContractError("label count differs from row count");
  config_.defaults.validate();
  folds_ = eval::stratified_kfold(labels_, config_.inner_k, config_.seed);
}

double FsObjective::operator()(std::span<const double> genome) const {
  return evaluate(decode(variant_, genome, x_.cols(), config_.defaults));
}

double FsObjective::evaluate(const Decoded& d) const {
  std::vector<double> key;
  if (config_.cache) {
    key.assign(d.features.begin(), d.features.end());
    key.push_back(-1.0);
    key.insert(key.end(), {d.params.learning_rate, double(d.params.min_samples_leaf),
                           double(d.params.max_leaf_nodes), d.params.l2, double(d.params.max_bins),
                           double(d.params.n_trees)});
    std::lock_guard lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  const double err =
      cross_validate(x_, labels_, d.features, d.params, folds_).error_percent();
  std::lock_guard lock(mutex_);
  ++evaluations_;
  if (config_.cache) cache_.emplace(std::move(key), err);
  return err;
}

std::size_t FsObjective::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t FsObjective::evaluations() const {
  std::lock_guard lock(mutex_);
  return evaluations_;
}

FsResult optimize(Variant variant, const hgbc::FeatureMatrix& x, std::span<const int> labels,
                  const OptimizeConfig& config) {
  const FsObjective objective(x, std::vector<int>(labels.begin(), labels.end()), variant,
                              config.objective);
  const auto space = genome_space(variant, x.cols());
  FsResult result;
  result.run = search::run_optimizer(
      config.optimizer, [&](std::span<const double> g) { return objective(g); }, space,
      config.run, config.settings);
  result.decoded = decode(variant, result.run.best.position, x.cols(), config.objective.defaults);
  const auto cv = cross_validate(x, labels, result.decoded.features, result.decoded.params,
                                 objective.folds());
  result.objective = cv.error_percent();
  result.fold_accuracy = cv.summary.accuracy;
  result.fold_f_measure = cv.summary.f_measure;
  return result;
}

std::string format_report(const FsResult& r, Variant variant, search::OptimizerKind optimizer,
                          const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "variant=" << to_string(variant) << '\n';
  out << "optimizer=" << search::to_string(optimizer) << '\n';
  out << "selected_count=" << r.decoded.features.size() << '\n';
  out << "selected=";
  for (std::size_t i = 0; i < r.decoded.features.size(); ++i) {
    const std::size_t f = r.decoded.features[i];
    out << (i ? "," : "") << (f < names.size() ? names[f] : std::to_string(f));
  }
  out << '\n';
  const auto& p = r.decoded.params;
  out << "learning_rate=" << shortest(p.learning_rate) << '\n';
  out << "min_samples_leaf=" << p.min_samples_leaf << '\n';
  out << "max_leaf_nodes=" << p.max_leaf_nodes << '\n';
  out << "l2=" << shortest(p.l2) << '\n';
  out << "max_bins=" << p.max_bins << '\n';
  out << "n_trees=" << p.n_trees << '\n';
  out << "objective=" << eval::format_fixed(r.objective, 4) << '\n';
  out << "nfe_used=" << r.run.nfe_used << '\n';
  out << "fold_accuracy=";
  for (std::size_t i = 0; i < r.fold_accuracy.size(); ++i) {
    out << (i ? "," : "") << eval::format_fixed(r.fold_accuracy[i], 4);
  }
  out << "\nfold_f_measure=";
  for (std::size_t i = 0; i < r.fold_f_measure.size(); ++i) {
    out << (i ? "," : "") << eval::format_fixed(r.fold_f_measure[i], 4);
  }
  out << '\n';
  return out.str();
}

}  // namespace greentune::fstune
