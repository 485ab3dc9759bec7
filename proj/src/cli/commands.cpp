#include "greentune/cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "greentune/cli/config.hpp"
#include "greentune/cli/experiment.hpp"
#include "greentune/common/error.hpp"
#include "greentune/common/io.hpp"
#include "greentune/energy/pipeline.hpp"
#include "greentune/energy/synth.hpp"

namespace greentune::cli {

namespace {

struct Common {
  std::string config;
  std::vector<std::string> seeds;
  std::string out;
};

struct RunFlags {
  std::string optimizer;
  std::string variant;
  std::string protocol;
  std::string dataset;
  std::string name;
};

struct SynthFlags {
  long long n = -1;
  double noise = -1.0;
  std::string proportions;
};

struct CompareFlags {
  std::vector<std::string> dirs;
  double alpha = 0.05;
  bool one_sided = false;
};

struct FilterFlags {
  std::string dataset;
  std::string method = "mutual_info";
  std::vector<std::string> ks;
  int outer_k = 10;
};

std::vector<std::uint64_t> seeds_from(const std::vector<std::string>& items) {
  std::vector<std::uint64_t> seeds;
  for (const auto& s : items) {
    const auto part = parse_seed_list(s);
    seeds.insert(seeds.end(), part.begin(), part.end());
  }
  return seeds;
}

std::uint64_t single_seed(const std::vector<std::string>& items, std::uint64_t fallback) {
  const auto seeds = seeds_from(items);
  if (seeds.empty()) return fallback;
  if (seeds.size() > 1) throw ConfigError("this command takes a single --seed");
  return seeds.front();
}

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig config;
  if (!c.config.empty()) cli::apply(config, read_config_file(c.config));
  return config;
}

std::string sibling(const std::string& path, const std::string& suffix) { return path + suffix; }

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw DataError("cannot create directory " + parent.string());
}

void print_class_counts(std::ostream& out, const energy::Dataset& d) {
  const auto counts = d.class_counts();
  out << "rows=" << d.size();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out << ' ' << energy::class_name(static_cast<energy::EnergyClass>(c)) << '=' << counts[c];
  }
  out << '\n';
}

int cmd_preprocess(const std::string& input, const Common& c, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("preprocess needs --out FILE");
  energy::PreprocessReport report;
  auto dataset = energy::preprocess(energy::ingest_csv_file(input), energy::LabelThresholds{}, &report);
  ensure_parent(c.out);
  dataset.write_file(c.out);
  std::ostringstream text;
  energy::write_report(text, report);
  write_file_atomic(sibling(c.out, ".report.txt"), text.str());
  out << text.str();
  print_class_counts(out, dataset);
  return kExitOk;
}

int cmd_synth(const Common& c, const SynthFlags& f, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("synth needs --out FILE");
  auto config = load_config(c);
  auto spec = config.synth;
  spec.seed = single_seed(c.seeds, spec.seed);
  if (f.n >= 0) spec.n = static_cast<std::size_t>(f.n);
  if (f.noise >= 0.0) spec.noise = f.noise;
  if (!f.proportions.empty()) spec.proportions = parse_proportions(f.proportions);
  const auto result = energy::synthesize(spec);
  ensure_parent(c.out);
  result.dataset.write_file(c.out);
  std::string names;
  for (std::size_t i : result.informative) names += result.dataset.feature_names()[i] + '\n';
  write_file_atomic(sibling(c.out, ".informative.txt"), names);
  print_class_counts(out, result.dataset);
  return kExitOk;
}

int cmd_run(const Common& c, const RunFlags& f, std::ostream& out) {
  auto config = load_config(c);
  KeyValues overrides;
  if (!f.optimizer.empty()) overrides.emplace_back("optimizer", f.optimizer);
  if (!f.variant.empty()) overrides.emplace_back("variant", f.variant);
  if (!f.protocol.empty()) overrides.emplace_back("protocol", f.protocol);
  if (!f.dataset.empty()) overrides.emplace_back("dataset", f.dataset);
  if (!f.name.empty()) overrides.emplace_back("name", f.name);
  if (!c.out.empty()) overrides.emplace_back("out", c.out);
  cli::apply(config, overrides);
  if (!c.seeds.empty()) config.seeds = seeds_from(c.seeds);
  config.validate();

  const auto dataset = load_dataset(config);
  const auto run = run_experiment(config, dataset);
  write_run(run, config.out);
  std::vector<eval::SummaryRow> rows{{config.label(), run.aggregate}};
  eval::write_summary_text(out, rows);
  return kExitOk;
}

int cmd_compare(const Common& c, const CompareFlags& f, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("compare needs --out DIR");
  if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  std::vector<StoredRun> runs;
  for (const auto& d : f.dirs) runs.push_back(read_run(d));
  const auto m = compare_runs(runs, c.out, f.alpha,
                              f.one_sided ? eval::Sidedness::one_sided : eval::Sidedness::two_sided);
  eval::write_wtl_text(out, m);
  return kExitOk;
}

std::vector<std::size_t> parse_ks(const std::vector<std::string>& items) {
  std::vector<std::size_t> ks;
  for (const auto& item : items) {
    for (std::uint64_t k : parse_seed_list(item)) ks.push_back(static_cast<std::size_t>(k));
  }
  return ks;
}

int cmd_filter(const Common& c, const FilterFlags& f, std::ostream& out) {
  auto config = load_config(c);
  if (!f.dataset.empty()) config.dataset = f.dataset;
  if (c.out.empty()) throw ConfigError("filter-fs needs --out DIR");
  FilterConfig fc;
  fc.method = fstune::parse_filter_method(f.method);
  fc.ks = parse_ks(f.ks);
  fc.outer_k = f.outer_k;
  if (fc.outer_k < 2) throw ConfigError("outer_k must be at least 2");
  fc.seed = single_seed(c.seeds, config.seeds.front());
  fc.params = config.defaults;
  fc.f_average = config.f_average;
  const auto dataset = load_dataset(config);
  const auto rows = run_filter_fs(dataset, fc);
  write_filter(rows, dataset, fc, c.out);
  std::vector<eval::SummaryRow> table;
  for (const auto& r : rows) table.push_back({"k=" + r.label, r.summary});
  eval::write_summary_text(out, table);
  return kExitOk;
}

void add_common(CLI::App* app, Common& c, bool seeds) {
  app->add_option("--config", c.config, "Experiment config file (key=value)");
  if (seeds) app->add_option("--seed", c.seeds, "Seed; repeatable, ranges like 1-11 allowed");
  app->add_option("--out", c.out, "Output file or directory");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature selection and hyperparameter tuning of gradient boosting for energy data",
               args.empty() ? "greentune" : args.front()};
  app.require_subcommand(1);

  Common common;
  std::string input;
  auto* pre = app.add_subcommand("preprocess", "Raw telemetry CSV to labeled dataset");
  pre->add_option("input", input, "Raw sample CSV")->required();
  add_common(pre, common, false);

  SynthFlags synth;
  auto* syn = app.add_subcommand("synth", "Write a synthetic labeled dataset");
  add_common(syn, common, true);
  syn->add_option("--n", synth.n, "Rows");
  syn->add_option("--noise", synth.noise, "Label noise scale");
  syn->add_option("--proportions", synth.proportions, "safe,warning,critical shares");

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Outer cross-validation of a search configuration");
  add_common(run_cmd, common, true);
  run_cmd->add_option("--optimizer", run.optimizer, "none, rs, ga, pso, de, jade, shade, lshade");
  run_cmd->add_option("--variant", run.variant, "fs, tune or combined");
  run_cmd->add_option("--protocol", run.protocol, "nested (default) or global");
  run_cmd->add_option("--dataset", run.dataset, "Labeled dataset file");
  run_cmd->add_option("--name", run.name, "Algorithm label in result tables");

  CompareFlags compare;
  auto* cmp = app.add_subcommand("compare", "Pairwise Wilcoxon win/tie/loss over result directories");
  cmp->add_option("runs", compare.dirs, "Result directories written by run")->required()->expected(2, -1);
  add_common(cmp, common, false);
  cmp->add_option("--alpha", compare.alpha, "Significance level");
  cmp->add_flag("--one-sided", compare.one_sided, "One-sided test");

  FilterFlags filter;
  auto* flt = app.add_subcommand("filter-fs", "Filter feature selection sweep");
  add_common(flt, common, true);
  flt->add_option("--dataset", filter.dataset, "Labeled dataset file");
  flt->add_option("--method", filter.method, "chi_square, anova_f or mutual_info");
  flt->add_option("--k", filter.ks, "Features to keep; repeatable, ranges like 1-32 allowed");
  flt->add_option("--outer-k", filter.outer_k, "Outer folds");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("greentune");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(input, common, out);
    if (syn->parsed()) return cmd_synth(common, synth, out);
    if (run_cmd->parsed()) return cmd_run(common, run, out);
    if (cmp->parsed()) return cmd_compare(common, compare, out);
    if (flt->parsed()) return cmd_filter(common, filter, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace greentune::cli
