// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "greentune/cli/experiment.hpp"
#include "greentune/common/io.hpp"
#include "greentune/de/de_family.hpp"
#include "greentune/energy/pipeline.hpp"
#include "greentune/energy/synth.hpp"
#include "greentune/eval/stats.hpp"
#include "greentune/fstune/fstune.hpp"
#include "greentune/hgbc/model.hpp"
#include "greentune/optim/benchmark.hpp"

using namespace greentune;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kFixtures = GREENTUNE_FIXTURES;
const std::string kCli = GREENTUNE_CLI;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// ---------------------------------------------------------------------------

Verdict lshade_sphere() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto space = optim::SearchSpace::box(10, -100.0, 100.0);
  const auto sphere = optim::benchmark_objective(optim::Benchmark::sphere);
  std::vector<double> best;
  bool schedule = true;
  bool endpoints = true;
  for (std::uint64_t seed = 1; seed <= 11; ++seed) {
    optim::RunConfig config;
    config.population_size = 50;
    config.max_nfe = 10000;
    config.seed = seed;
    const auto r = de::run(de::Variant::lshade, sphere, space, config);
    best.push_back(*r.best.fitness);
    const auto& sizes = r.trace.population_size;
    endpoints = endpoints && sizes.front() == 50 && sizes.back() == 4;
    for (std::size_t g = 1; g < sizes.size(); ++g) {
      schedule = schedule && sizes[g] == de::lpsr(r.trace.nfe[g], config);
    }
  }
  const double elapsed = seconds_since(t0);
  const double med = eval::median(best);
  v.require(med < 1e-3, "median=" + fmt("%.3g", med) + " (<1e-3)");
  v.require(schedule, "population matches the reduction schedule every generation");
  v.require(endpoints, "endpoints 50 and 4");
  v.require(elapsed < 10.0, "runtime=" + fmt("%.2f", elapsed) + "s (<10s)");
  return v;
}

Verdict de_family_ordering() {
  Verdict v;
  const auto space = optim::SearchSpace::box(10, -5.12, 5.12);
  const auto rastrigin = optim::benchmark_objective(optim::Benchmark::rastrigin);
  std::map<de::Variant, std::vector<double>> best;
  for (auto variant : {de::Variant::lshade, de::Variant::shade, de::Variant::de}) {
    for (std::uint64_t seed = 1; seed <= 11; ++seed) {
      optim::RunConfig config;
      config.population_size = 50;
      config.max_nfe = 20000;
      config.seed = seed;
      best[variant].push_back(*de::run(variant, rastrigin, space, config).best.fitness);
    }
  }
  const double l = eval::median(best[de::Variant::lshade]);
  const double s = eval::median(best[de::Variant::shade]);
  const double d = eval::median(best[de::Variant::de]);
  v.require(l <= s && s <= d,
            "medians lshade=" + fmt("%.4g", l) + " shade=" + fmt("%.4g", s) + " de=" + fmt("%.4g", d));
  // Minimization: de is superior when its best fitness values are the
  // significantly smaller sample, i.e. lshade holds the larger rank sum.
  const auto w = eval::wilcoxon_signed_rank(best[de::Variant::lshade], best[de::Variant::de], 0.05);
  v.require(w.outcome != eval::Outcome::a_wins, "wilcoxon p=" + fmt("%.4g", w.p) + " does not favor de");
  return v;
}

Verdict memory_means() {
  Verdict v;
  de::SuccessLog log;
  log.record(0.2, 0.2, 1.0);
  log.record(0.8, 0.8, 1.0);
  const auto m = de::update_memory(de::HistoryMemory(5), log);
  v.require(std::abs(m.m_f[0] - 0.68) <= 1e-12, "lehmer=" + fmt("%.15g", m.m_f[0]) + " (0.68)");
  v.require(std::abs(m.m_cr[0] - 0.5) <= 1e-12, "arithmetic=" + fmt("%.15g", m.m_cr[0]) + " (0.5)");

  // Improvements 1 and 3: Lehmer (0.04 + 1.92) / (0.2 + 2.4), arithmetic 2.6 / 4.
  de::SuccessLog weighted;
  weighted.record(0.2, 0.2, 1.0);
  weighted.record(0.8, 0.8, 3.0);
  const auto w = de::update_memory(de::HistoryMemory(5), weighted);
  v.require(std::abs(w.m_f[0] - 1.96 / 2.6) <= 1e-12, "weighted lehmer=" + fmt("%.15g", w.m_f[0]));
  v.require(std::abs(w.m_cr[0] - 0.65) <= 1e-12, "weighted arithmetic=" + fmt("%.15g", w.m_cr[0]));
  v.require(w.k == 1 && w.m_f[1] == 0.5, "slot advanced, others untouched");
  return v;
}

// Three Gaussian blobs, six standard deviations apart.
struct Blobs {
  hgbc::FeatureMatrix x;
  std::vector<int> y;
};

Blobs blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double centers[3][4] = {{0, 0, 0, 0}, {6, 6, 0, 0}, {0, 6, 6, 0}};
  Blobs b;
  b.x = hgbc::FeatureMatrix(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    for (std::size_t d = 0; d < 4; ++d) b.x(i, d) = centers[c][d] + noise(rng);
    b.y.push_back(c);
  }
  return b;
}

Verdict hgbc_quality() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto data = blobs(600, 11);
  const hgbc::HgbcParams params;  // defaults, 100 rounds
  const auto folds = eval::stratified_kfold(data.y, 10, 1);
  const auto cv = fstune::cross_validate(data.x, data.y, iota(4), params, folds);
  const double accuracy = 100.0 - cv.error_percent();
  v.require(accuracy >= 95.0, "10cv accuracy=" + fmt("%.2f", accuracy) + "% (>=95)");

  std::vector<double> loss;
  hgbc::FitOptions options;
  options.training_loss = &loss;
  hgbc::fit(data.x, data.y, params, 0, options);
  bool monotone = loss.size() == 101;
  for (std::size_t i = 1; i < loss.size(); ++i) monotone = monotone && loss[i] <= loss[i - 1];
  v.require(monotone, "training cross-entropy non-increasing over " +
                          std::to_string(loss.size() - 1) + " rounds");
  const double elapsed = seconds_since(t0);

  const auto fixture = blobs(200, 5);
  hgbc::HgbcParams small;
  small.n_trees = 30;
  small.min_samples_leaf = 5;
  hgbc::FitOptions direct;
  direct.histogram_subtraction = false;
  const auto with_subtraction = hgbc::fit(fixture.x, fixture.y, small);
  const auto without = hgbc::fit(fixture.x, fixture.y, small, 0, direct);
  std::ostringstream a;
  std::ostringstream b;
  with_subtraction.save(a);
  without.save(b);
  v.require(with_subtraction == without && a.str() == b.str(),
            "subtraction trees bit-identical on 200 rows");
  v.require(elapsed < 5.0, "runtime=" + fmt("%.2f", elapsed) + "s (<5s)");
  return v;
}

Verdict objective_oracle() {
  Verdict v;
  hgbc::FeatureMatrix x(30, 5);
  std::vector<int> y;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < 30; ++i) {
    const int c = static_cast<int>(i % 3);
    x(i, 0) = c + 1.5 * u(rng);
    x(i, 1) = u(rng);
    x(i, 2) = (c == 2 ? 1.0 : 0.0) + 0.8 * u(rng);
    x(i, 3) = 3.0;
    x(i, 4) = std::round(10 * u(rng));
    y.push_back(c);
  }
  fstune::ObjectiveConfig config;
  config.inner_k = 3;
  config.seed = 4;
  config.defaults.n_trees = 15;
  config.defaults.min_samples_leaf = 4;

  // Folds rebuilt from scratch: every class contributes one member per fold
  // per round of the deal.
  const auto folds = eval::stratified_kfold(y, 3, 4);
  std::size_t checked = 0;
  std::size_t matched = 0;
  const auto recount = [&](const std::vector<std::size_t>& features, const hgbc::HgbcParams& p) {
    std::size_t wrong = 0;
    for (int k = 0; k < 3; ++k) {
      std::vector<std::size_t> train;
      std::vector<std::size_t> test;
      for (std::size_t i = 0; i < 30; ++i) (folds.fold[i] == k ? test : train).push_back(i);
      std::vector<int> y_train;
      for (auto r : train) y_train.push_back(y[r]);
      const auto model = hgbc::fit(x.select(train, features), y_train, p);
      for (auto r : test) {
        std::vector<double> row;
        for (auto f : features) row.push_back(x(r, f));
        wrong += model.predict(row) != y[r];
      }
    }
    return 100.0 * static_cast<double>(wrong) / 30.0;
  };

  std::mt19937_64 genomes(8);
  for (auto variant : {fstune::Variant::fs_only, fstune::Variant::tune_only, fstune::Variant::combined}) {
    const fstune::FsObjective objective(x, y, variant, config);
    v.require(objective.folds().fold == folds.fold, std::string("folds ") +
                                                        std::string(fstune::to_string(variant)));
    const auto space = fstune::genome_space(variant, 5);
    for (int trial = 0; trial < 6; ++trial) {
      auto g = optim::sample_uniform(space, genomes);
      // Keep min_samples_leaf small enough for 20 training rows.
      if (variant != fstune::Variant::fs_only) {
        const std::size_t msl = fstune::genome_length(variant, 5) - 4;
        g[msl] = 1 + trial;
      }
      const auto d = fstune::decode(variant, g, 5, config.defaults);
      ++checked;
      matched += objective(g) == recount(d.features, d.params);
    }
  }
  v.require(matched == checked,
            std::to_string(matched) + "/" + std::to_string(checked) + " genomes equal the recount");
  return v;
}

// The synthetic benchmark shared by the feature-recovery and variant checks:
// 300 training rows, labels a noise-free function of the 8 informative
// features, evaluated on 3000 independently drawn rows.
struct Benchmark {
  energy::SynthResult train;
  hgbc::FeatureMatrix test_x;
  std::vector<int> test_y;
};

Benchmark benchmark(std::uint64_t seed) {
  energy::SynthSpec spec;
  spec.n = 300;
  spec.seed = 100 + seed;
  spec.noise = 0.0;
  Benchmark b{energy::synthesize(spec), {}, {}};
  spec.n = 3000;
  spec.seed = 9000 + seed;
  const auto test = energy::synthesize(spec);
  b.test_x = test.dataset.matrix();
  b.test_y = test.dataset.labels();
  return b;
}

double held_out_accuracy(const Benchmark& b, const fstune::Decoded& d) {
  const auto& train = b.train.dataset;
  const auto model = hgbc::fit(train.matrix().select(iota(train.size()), d.features), train.labels(),
                               d.params);
  const auto predictions = model.predict(b.test_x.select(iota(b.test_y.size()), d.features));
  return eval::score(b.test_y, predictions).accuracy;
}

Verdict feature_recovery() {
  Verdict v;
  std::vector<double> recovered;
  std::vector<double> pruned;
  std::vector<double> acc_selected;
  std::vector<double> acc_all;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    const auto b = benchmark(seed);
    fstune::OptimizeConfig config;
    config.run.population_size = 50;
    config.run.max_nfe = 800;
    config.run.seed = seed;
    config.objective.inner_k = 3;
    config.objective.seed = seed;
    config.objective.defaults.n_trees = 10;
    const auto r = fstune::optimize(fstune::Variant::fs_only, b.train.dataset.matrix(),
                                    b.train.dataset.labels(), config);
    const std::set<std::size_t> informative(b.train.informative.begin(), b.train.informative.end());
    std::size_t hit = 0;
    for (auto f : r.decoded.features) hit += informative.count(f);
    const std::size_t noise_kept = r.decoded.features.size() - hit;
    recovered.push_back(100.0 * static_cast<double>(hit) / 8.0);
    pruned.push_back(100.0 * static_cast<double>(24 - noise_kept) / 24.0);
    acc_selected.push_back(held_out_accuracy(b, r.decoded));
    acc_all.push_back(held_out_accuracy(b, {iota(32), config.objective.defaults}));
  }
  const double rec = eval::median(recovered);
  const double pru = eval::median(pruned);
  const double sel = eval::median(acc_selected);
  const double all = eval::median(acc_all);
  v.require(rec >= 80.0, "informative recovered median=" + fmt("%.1f", rec) + "% (>=80)");
  v.require(pru >= 50.0, "noise pruned median=" + fmt("%.1f", pru) + "% (>=50)");
  v.require(std::abs(sel - all) <= 1.0, "held-out median selected=" + fmt("%.2f", sel) +
                                            " all=" + fmt("%.2f", all) + " (within 1pp)");
  return v;
}

Verdict variant_ordering() {
  Verdict v;
  std::vector<double> acc_default;
  std::vector<double> acc_tune;
  std::vector<double> acc_combined;
  hgbc::HgbcParams defaults;
  defaults.n_trees = 20;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    const auto b = benchmark(seed);
    acc_default.push_back(held_out_accuracy(b, {iota(32), defaults}));
    for (auto variant : {fstune::Variant::tune_only, fstune::Variant::combined}) {
      fstune::OptimizeConfig config;
      config.run.population_size = 10;
      config.run.max_nfe = 200;
      config.run.seed = seed;
      config.objective.inner_k = 3;
      config.objective.seed = seed;
      config.objective.defaults = defaults;
      const auto r = fstune::optimize(variant, b.train.dataset.matrix(), b.train.dataset.labels(),
                                      config);
      (variant == fstune::Variant::combined ? acc_combined : acc_tune)
          .push_back(held_out_accuracy(b, r.decoded));
    }
  }
  const double c = eval::median(acc_combined);
  const double t = eval::median(acc_tune);
  const double d = eval::median(acc_default);
  int not_worse = 0;
  for (std::size_t i = 0; i < acc_default.size(); ++i) not_worse += acc_combined[i] >= acc_default[i];
  v.require(c >= t && t >= d, "medians combined=" + fmt("%.2f", c) + " tune_only=" + fmt("%.2f", t) +
                                  " default=" + fmt("%.2f", d));
  v.require(not_worse >= 8, "combined >= default in " + std::to_string(not_worse) + "/11 seeds (>=8)");
  return v;
}

// Two-sided exact p by enumerating all 2^n sign patterns of ranks 1..n.
double enumerated_p(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  std::vector<double> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<double>(r + 1);
  double w_plus = 0;
  for (std::size_t i = 0; i < n; ++i) w_plus += d[i] > 0 ? rank[i] : 0.0;
  const double total = n * (n + 1) / 2.0;
  const double observed = std::min(w_plus, total - w_plus);
  std::size_t extreme = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i) w += (mask >> i & 1) ? rank[i] : 0.0;
    extreme += std::min(w, total - w) <= observed;
  }
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(std::size_t{1} << n));
}

Verdict wilcoxon_exactness() {
  Verdict v;
  std::mt19937_64 rng(3);
  std::size_t cases = 0;
  std::size_t matched = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      // Distinct magnitudes 1..n with random signs, shuffled: no ties.
      std::vector<double> a(n);
      std::vector<double> b(n, 0.0);
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = static_cast<double>(i + 1) * (rng() % 2 ? 1 : -1);
      std::shuffle(d.begin(), d.end(), rng);
      for (std::size_t i = 0; i < n; ++i) a[i] = d[i];
      ++cases;
      matched += eval::wilcoxon_signed_rank(a, b).p == enumerated_p(d);
    }
  }
  v.require(matched == cases, std::to_string(matched) + "/" + std::to_string(cases) +
                                  " p-values equal the enumeration for n<=10");
  const std::vector<double> a{2, 3, 4, 5, 6};
  const std::vector<double> b{1, 1, 1, 1, 1};
  const double p = eval::wilcoxon_signed_rank(a, b).p;
  v.require(p == 0.0625, "n=5 all positive p=" + fmt("%.6g", p) + " (0.0625)");
  return v;
}

Verdict ecpm_pipeline() {
  Verdict v;
  energy::PreprocessReport report;
  const auto d =
      energy::preprocess(energy::ingest_csv_file(kFixtures + "/six_rows.csv"), {}, &report);
  const bool two = d.size() == 2;
  v.require(two, std::to_string(d.size()) + " labeled rows (2)");
  if (two) {
    v.require(std::abs(*d[0].ecpm - 0.5) <= 1e-12 && d[0].label == energy::EnergyClass::warning,
              "80->78 over 240s: ecpm=" + fmt("%.12g", *d[0].ecpm) + " warning");
    v.require(std::abs(*d[1].ecpm - 0.3) <= 1e-9 && d[1].label == energy::EnergyClass::safe,
              "50->49.7 over 60s: ecpm=" + fmt("%.12g", *d[1].ecpm) + " safe");
  }
  v.require(energy::label(0.3) == energy::EnergyClass::safe &&
                energy::label(1.0) == energy::EnergyClass::warning &&
                energy::label(1.6) == energy::EnergyClass::critical,
            "labels 0.3/1.0/1.6");
  v.require(report.ecpm.skipped_charging == 1, "charging-spanning pair skipped");
  return v;
}

Verdict filter_oracle() {
  Verdict v;
  const double chi = fstune::chi_square_statistic(std::vector<double>{30, 10, 10, 30}, 2, 2);
  v.require(std::abs(chi - 20.0) <= 1e-9, "chi2=" + fmt("%.12g", chi) + " (20.0)");

  energy::SynthSpec spec;
  spec.n = 300;
  spec.seed = 5;
  auto data = energy::synthesize(spec).dataset;
  auto x = data.matrix();
  for (std::size_t r = 0; r < x.rows(); ++r) x(r, 3) = 7.0;
  bool zero = true;
  for (auto m : {fstune::FilterMethod::chi_square, fstune::FilterMethod::anova_f,
                 fstune::FilterMethod::mutual_info}) {
    zero = zero && fstune::filter_scores(m, x, data.labels())[3] == 0.0;
  }
  v.require(zero, "constant feature scores 0 under all three methods");

  cli::FilterConfig config;
  config.ks = {32};
  config.params.n_trees = 20;
  const auto rows = cli::run_filter_fs(data, config);
  v.require(rows.size() == 2 && rows[1].summary.accuracy == rows[0].summary.accuracy &&
                rows[1].summary.f_measure == rows[0].summary.f_measure,
            "k=32 reproduces the baseline fold scores bit-exactly");
  return v;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_text_file(e.path().string());
  }
  return files;
}

int shell(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + kCli + "' " + args + " > cli.log 2>&1";
  return std::system(cmd.c_str());
}

Verdict end_to_end(Clock::time_point suite_start) {
  Verdict v;
  const auto base = fs::temp_directory_path() / "greentune_acceptance";
  fs::remove_all(base);
  bool commands_ok = true;
  for (const char* rep : {"first", "second"}) {
    const auto dir = base / rep;
    fs::create_directories(dir);
    write_file_atomic((dir / "tiny.cfg").string(),
                      "synth_n=150\npopulation_size=10\nmax_nfe=30\nouter_k=3\ninner_k=3\nn_trees=5\n");
    for (const char* args :
         {"synth --config tiny.cfg --seed 3 --out data.csv",
          "run --config tiny.cfg --dataset data.csv --seed 1 --variant combined --out runs/combined",
          "run --config tiny.cfg --dataset data.csv --seed 1 --optimizer none --out runs/default",
          "compare runs/combined runs/default --out cmp"}) {
      commands_ok = commands_ok && shell(dir, args) == 0;
    }
  }
  const auto first = read_tree(base / "first");
  const auto second = read_tree(base / "second");
  v.require(commands_ok, "synth, run and compare exit 0");
  v.require(first.size() > 10 && first == second,
            std::to_string(first.size()) + " files byte-identical across repetitions");
  fs::remove_all(base);
  const double elapsed = seconds_since(suite_start);
  v.require(elapsed < 300.0, "acceptance runtime=" + fmt("%.1f", elapsed) + "s (<300s)");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = Clock::now();
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"lshade sphere 10-D", lshade_sphere},
      {"de family ordering on rastrigin", de_family_ordering},
      {"memory adaptation means", memory_means},
      {"hgbc quality", hgbc_quality},
      {"objective recount oracle", objective_oracle},
      {"feature recovery", feature_recovery},
      {"variant ordering", variant_ordering},
      {"wilcoxon exactness", wilcoxon_exactness},
      {"ecpm pipeline", ecpm_pipeline},
      {"filter selection oracle", filter_oracle},
      {"end-to-end determinism", [start] { return end_to_end(start); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s %2d %-32s %6.1fs  %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, only.empty() ? criteria.size() : only.size());
  return failed == 0 ? 0 : 1;
}
