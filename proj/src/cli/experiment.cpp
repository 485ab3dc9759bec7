#include "greentune/cli/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>

#include "greentune/common/error.hpp"
#include "greentune/common/io.hpp"
#include "greentune/energy/synth.hpp"

namespace greentune::cli {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::size_t> all_features(std::size_t n) {
  std::vector<std::size_t> f(n);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

std::vector<int> pick(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

fstune::OptimizeConfig optimize_config(const ExperimentConfig& c, std::uint64_t seed) {
  fstune::OptimizeConfig oc;
  oc.optimizer = *c.optimizer;
  oc.settings = c.settings;
  oc.run.population_size = c.population_size;
  oc.run.max_nfe = c.max_nfe;
  oc.run.seed = seed;
  oc.run.workers = c.workers;
  oc.objective.inner_k = c.inner_k;
  oc.objective.seed = seed;
  oc.objective.defaults = c.defaults;
  oc.objective.cache = c.cache;
  return oc;
}

struct Search {
  fstune::Decoded decoded;
  double objective = 0.0;
  int nfe_used = 0;
};

Search search(const ExperimentConfig& c, const hgbc::FeatureMatrix& x, std::span<const int> y,
              std::uint64_t seed) {
  if (!c.optimizer) return {{all_features(x.cols()), c.defaults}, 0.0, 0};
  const auto r = fstune::optimize(c.variant, x, y, optimize_config(c, seed));
  return {r.decoded, r.objective, r.run.nfe_used};
}

std::string csv_join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::map<std::string, std::string> kv;
  for (auto& [k, v] : parse_key_values(read_text_file(path))) kv[k] = v;
  return kv;
}

std::uint64_t parse_hex(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("bad hexadecimal value '" + s + "'");
  }
  return v;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("bad number '" + s + "'");
  }
  return v;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir);
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

energy::Dataset load_dataset(const ExperimentConfig& config) {
  if (!config.dataset.empty()) return energy::Dataset::read_file(config.dataset);
  return energy::synthesize(config.synth).dataset;
}

std::uint64_t derive_seed(std::uint64_t seed, int fold) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(fold + 1);
}

SeedRecord run_seed(const ExperimentConfig& c, const energy::Dataset& dataset, std::uint64_t seed) {
  const auto x = dataset.matrix();
  const auto y = dataset.labels();
  SeedRecord rec;
  rec.seed = seed;
  rec.folds = eval::stratified_kfold(y, c.outer_k, seed);

  std::optional<Search> global;
  if (c.protocol == Protocol::global) global = search(c, x, y, derive_seed(seed, -1));

  std::vector<double> acc;
  std::vector<double> fm;
  for (int f = 0; f < c.outer_k; ++f) {
    const auto train = rec.folds.train_indices(f);
    const auto test = rec.folds.test_indices(f);
    const auto y_train = pick(y, train);
    const Search s =
        global ? *global : search(c, x.select_rows(train), y_train, derive_seed(seed, f));
    const auto model = hgbc::fit(x.select(train, s.decoded.features), y_train, s.decoded.params);
    const auto pred = model.predict(x.select(test, s.decoded.features));
    const auto sc = eval::score(pick(y, test), pred, c.f_average);
    rec.records.push_back({f, sc.accuracy, sc.f_measure, s.decoded, s.objective, s.nfe_used});
    acc.push_back(sc.accuracy);
    fm.push_back(sc.f_measure);
  }
  rec.summary = eval::CvSummary::from_folds(std::move(acc), std::move(fm));
  return rec;
}

RunOutput run_experiment(const ExperimentConfig& config, const energy::Dataset& dataset) {
  config.validate();
  RunOutput out;
  out.config = config;
  out.dataset_fingerprint = dataset.fingerprint();
  out.feature_names = dataset.feature_names();
  std::vector<double> acc;
  std::vector<double> fm;
  for (std::uint64_t seed : config.seeds) {
    out.seeds.push_back(run_seed(config, dataset, seed));
    const auto& s = out.seeds.back().summary;
    acc.insert(acc.end(), s.accuracy.begin(), s.accuracy.end());
    fm.insert(fm.end(), s.f_measure.begin(), s.f_measure.end());
  }
  out.aggregate = eval::CvSummary::from_folds(std::move(acc), std::move(fm));
  return out;
}

void write_run(const RunOutput& run, const std::string& dir) {
  ensure_dir(dir);
  const std::string name = run.config.label();
  write_file_atomic(join_path(dir, "config.txt"), to_key_values(run.config));

  std::ostringstream manifest;
  manifest << "name=" << name << '\n';
  manifest << "dataset_fingerprint=" << hex64(run.dataset_fingerprint) << '\n';
  manifest << "outer_k=" << run.config.outer_k << '\n';
  manifest << "seeds=";
  for (std::size_t i = 0; i < run.seeds.size(); ++i) manifest << (i ? "," : "") << run.seeds[i].seed;
  manifest << '\n';
  manifest << "fold_fingerprints=";
  for (std::size_t i = 0; i < run.seeds.size(); ++i) {
    manifest << (i ? "," : "") << hex64(run.seeds[i].folds.fingerprint());
  }
  manifest << '\n';
  write_file_atomic(join_path(dir, "manifest.txt"), manifest.str());

  std::ostringstream folds;
  folds << "seed,fold,accuracy,f_measure\n";
  for (const auto& s : run.seeds) {
    for (const auto& r : s.records) {
      folds << s.seed << ',' << r.fold << ',' << shortest(r.accuracy) << ',' << shortest(r.f_measure)
            << '\n';
    }
  }
  write_file_atomic(join_path(dir, "folds.csv"), folds.str());

  std::vector<eval::SummaryRow> rows;
  for (const auto& s : run.seeds) rows.push_back({name + "/seed=" + std::to_string(s.seed), s.summary});
  rows.push_back({name, run.aggregate});
  std::ostringstream csv;
  eval::write_summary_csv(csv, rows);
  write_file_atomic(join_path(dir, "summary.csv"), csv.str());
  std::ostringstream txt;
  eval::write_summary_text(txt, rows);
  write_file_atomic(join_path(dir, "summary.txt"), txt.str());

  std::ostringstream searches;
  for (const auto& s : run.seeds) {
    for (const auto& r : s.records) {
      std::vector<std::string> selected;
      for (std::size_t f : r.decoded.features) {
        selected.push_back(f < run.feature_names.size() ? run.feature_names[f] : std::to_string(f));
      }
      const auto& p = r.decoded.params;
      searches << "seed=" << s.seed << " fold=" << r.fold << " nfe=" << r.nfe_used
               << " inner_error=" << eval::format_fixed(r.inner_objective, 4)
               << " learning_rate=" << shortest(p.learning_rate)
               << " min_samples_leaf=" << p.min_samples_leaf
               << " max_leaf_nodes=" << p.max_leaf_nodes << " l2=" << shortest(p.l2)
               << " max_bins=" << p.max_bins << " n_selected=" << selected.size()
               << " selected=" << csv_join(selected) << '\n';
    }
  }
  write_file_atomic(join_path(dir, "searches.txt"), searches.str());
}

StoredRun read_run(const std::string& dir) {
  StoredRun run;
  run.dir = dir;
  const auto kv = read_key_values(join_path(dir, "manifest.txt"));
  const auto get = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError(dir + "/manifest.txt lacks '" + key + "'");
    return it->second;
  };
  run.name = get("name");
  run.dataset_fingerprint = parse_hex(get("dataset_fingerprint"));
  run.outer_k = static_cast<int>(parse_real(get("outer_k")));
  try {
    run.seeds = parse_seed_list(get("seeds"));
  } catch (const ConfigError& e) {
    throw DataError(dir + "/manifest.txt: " + e.what());
  }
  std::istringstream fps(get("fold_fingerprints"));
  for (std::string item; std::getline(fps, item, ',');) run.fold_fingerprints.push_back(parse_hex(item));
  if (run.fold_fingerprints.size() != run.seeds.size()) {
    throw DataError(dir + "/manifest.txt: one fold fingerprint per seed expected");
  }

  std::istringstream folds(read_text_file(join_path(dir, "folds.csv")));
  std::string line;
  std::getline(folds, line);
  if (line != "seed,fold,accuracy,f_measure") throw DataError(dir + "/folds.csv: bad header");
  while (std::getline(folds, line)) {
    if (line.empty()) continue;
    const auto cells = energy::split_csv_line(line);
    if (cells.size() != 4) throw DataError(dir + "/folds.csv: bad row '" + line + "'");
    run.accuracy.push_back(parse_real(cells[2]));
    run.f_measure.push_back(parse_real(cells[3]));
  }
  if (run.accuracy.size() != run.seeds.size() * static_cast<std::size_t>(run.outer_k)) {
    throw DataError(dir + "/folds.csv: expected outer_k rows per seed");
  }
  return run;
}

eval::WtlMatrix compare_runs(const std::vector<StoredRun>& runs, const std::string& out_dir,
                             double alpha, eval::Sidedness sides) {
  if (runs.size() < 2) throw ConfigError("compare needs at least two runs");
  const StoredRun& ref = runs.front();
  for (const auto& r : runs) {
    const auto mismatch = [&](const std::string& what) {
      throw ProtocolError(r.dir + " and " + ref.dir + " differ in " + what);
    };
    if (r.dataset_fingerprint != ref.dataset_fingerprint) mismatch("dataset");
    if (r.seeds != ref.seeds) mismatch("seeds");
    if (r.outer_k != ref.outer_k) mismatch("outer_k");
    if (r.fold_fingerprints != ref.fold_fingerprints) mismatch("fold assignment");
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> scores;
  std::vector<eval::SummaryRow> rows;
  std::map<std::string, int> seen;
  for (const auto& r : runs) {
    // The same run may be listed twice; later copies get a numeric suffix.
    const int copy = ++seen[r.name];
    const std::string label = copy == 1 ? r.name : r.name + "#" + std::to_string(copy);
    labels.push_back(label);
    scores.push_back(r.accuracy);
    rows.push_back({label, eval::CvSummary::from_folds(r.accuracy, r.f_measure)});
  }
  const auto m = eval::wtl_matrix(labels, scores, alpha, sides);

  ensure_dir(out_dir);
  std::ostringstream csv;
  eval::write_wtl_csv(csv, m);
  write_file_atomic(join_path(out_dir, "wtl.csv"), csv.str());
  std::ostringstream txt;
  eval::write_wtl_text(txt, m);
  write_file_atomic(join_path(out_dir, "wtl.txt"), txt.str());
  std::ostringstream scsv;
  eval::write_summary_csv(scsv, rows);
  write_file_atomic(join_path(out_dir, "summary.csv"), scsv.str());
  std::ostringstream stxt;
  eval::write_summary_text(stxt, rows);
  write_file_atomic(join_path(out_dir, "summary.txt"), stxt.str());

  std::ostringstream pv;
  pv << "algorithm_a,algorithm_b,p_value,outcome\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    for (std::size_t j = i + 1; j < m.names.size(); ++j) {
      const char* outcome = m.outcome[i][j] == eval::Outcome::a_wins
                                ? "a_wins"
                                : (m.outcome[i][j] == eval::Outcome::b_wins ? "b_wins" : "tie");
      pv << m.names[i] << ',' << m.names[j] << ',' << eval::format_fixed(m.p_value[i][j], 6) << ','
         << outcome << '\n';
    }
  }
  write_file_atomic(join_path(out_dir, "pvalues.csv"), pv.str());
  return m;
}

// ---------------------------------------------------------------------------

std::vector<FilterRow> run_filter_fs(const energy::Dataset& dataset, const FilterConfig& c) {
  const auto x = dataset.matrix();
  const auto y = dataset.labels();
  const std::size_t n_features = x.cols();
  std::vector<std::size_t> ks = c.ks;
  if (ks.empty()) {
    for (std::size_t k = 1; k <= n_features; ++k) ks.push_back(k);
  }
  for (std::size_t k : ks) {
    if (k < 1 || k > n_features) {
      throw ConfigError("k must lie in [1, " + std::to_string(n_features) + "]");
    }
  }
  const auto folds = eval::stratified_kfold(y, c.outer_k, c.seed);

  std::vector<FilterRow> rows;
  const auto all = all_features(n_features);
  rows.push_back({"all", n_features,
                  fstune::cross_validate(x, y, all, c.params, folds, c.f_average).summary});

  // Per-fold scores do not depend on k.
  std::vector<std::vector<double>> fold_scores;
  for (int f = 0; f < c.outer_k; ++f) {
    const auto train = folds.train_indices(f);
    fold_scores.push_back(fstune::filter_scores(c.method, x.select_rows(train), pick(y, train)));
  }
  for (std::size_t k : ks) {
    std::vector<double> acc;
    std::vector<double> fm;
    for (int f = 0; f < c.outer_k; ++f) {
      const auto train = folds.train_indices(f);
      const auto test = folds.test_indices(f);
      const auto selected = fstune::select_top_k(fold_scores[static_cast<std::size_t>(f)], k);
      const auto model = hgbc::fit(x.select(train, selected), pick(y, train), c.params, c.seed);
      const auto pred = model.predict(x.select(test, selected));
      const auto s = eval::score(pick(y, test), pred, c.f_average);
      acc.push_back(s.accuracy);
      fm.push_back(s.f_measure);
    }
    rows.push_back({std::to_string(k), k, eval::CvSummary::from_folds(std::move(acc), std::move(fm))});
  }
  return rows;
}

void write_filter(const std::vector<FilterRow>& rows, const energy::Dataset& dataset,
                  const FilterConfig& c, const std::string& dir) {
  ensure_dir(dir);
  std::ostringstream csv;
  csv << "method,k,accuracy_mean,accuracy_std,f_mean,f_std\n";
  for (const auto& r : rows) {
    csv << fstune::to_string(c.method) << ',' << r.label << ','
        << eval::format_fixed(r.summary.accuracy_mean, 4) << ','
        << eval::format_fixed(r.summary.accuracy_std, 4) << ','
        << eval::format_fixed(r.summary.f_mean, 4) << ',' << eval::format_fixed(r.summary.f_std, 4)
        << '\n';
  }
  write_file_atomic(join_path(dir, "filter_fs.csv"), csv.str());

  std::vector<eval::SummaryRow> table;
  for (const auto& r : rows) table.push_back({"k=" + r.label, r.summary});
  std::ostringstream txt;
  eval::write_summary_text(txt, table);
  write_file_atomic(join_path(dir, "filter_fs.txt"), txt.str());

  const auto scores = fstune::filter_scores(c.method, dataset.matrix(), dataset.labels());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::ostringstream sc;
  sc << "rank,feature,score\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    sc << i + 1 << ',' << dataset.feature_names()[order[i]] << ','
       << eval::format_fixed(scores[order[i]], 6) << '\n';
  }
  write_file_atomic(join_path(dir, "filter_scores.csv"), sc.str());
}

}  // namespace greentune::cli
