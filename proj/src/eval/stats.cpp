#include "greentune/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "greentune/common/error.hpp"

namespace greentune::eval {

// ---------------------------------------------------------------------------
// Folds

std::vector<std::size_t> FoldAssignment::train_indices(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] != f) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_indices(int f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == f) out.push_back(i);
  }
  return out;
}

std::uint64_t FoldAssignment::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(k));
  for (int f : fold) mix(static_cast<std::uint64_t>(f));
  return h;
}

FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold requires k >= 2");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members) {
    if (idx.size() < static_cast<std::size_t>(k)) {
      throw StratificationError("class " + std::to_string(label) + " has " +
                                std::to_string(idx.size()) + " members, fewer than k = " +
                                std::to_string(k));
    }
  }
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold.assign(labels.size(), -1);
  std::mt19937_64 rng(seed);
  std::size_t deal = 0;
  for (auto& [label, idx] : members) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) out.fold[i] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scores

Scores score(std::span<const int> truth, std::span<const int> predictions, FAverage average) {
  if (truth.empty() || truth.size() != predictions.size()) {
    throw ContractError("score requires equal-length, non-empty truth and predictions");
  }
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predictions.begin(), predictions.end());

  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predictions[i];

  double f_sum = 0.0;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool t = truth[i] == c;
      const bool p = predictions[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double f = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    f_sum += average == FAverage::macro ? f : f * static_cast<double>(tp + fn);
  }
  const double n = static_cast<double>(truth.size());
  Scores s;
  s.accuracy = 100.0 * static_cast<double>(correct) / n;
  s.f_measure = 100.0 * (average == FAverage::macro ? f_sum / static_cast<double>(classes.size())
                                                    : f_sum / n);
  return s;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) throw ContractError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CvSummary CvSummary::from_folds(std::vector<double> accuracy, std::vector<double> f_measure) {
  CvSummary s;
  s.accuracy = std::move(accuracy);
  s.f_measure = std::move(f_measure);
  s.accuracy_mean = mean(s.accuracy);
  s.accuracy_std = population_std(s.accuracy);
  s.f_mean = mean(s.f_measure);
  s.f_std = population_std(s.f_measure);
  return s;
}

// ---------------------------------------------------------------------------
// Wilcoxon

namespace {

struct RankedDifferences {
  std::vector<double> ranks;  // average ranks of |d|
  std::vector<bool> positive;
  std::vector<std::size_t> tie_sizes;
  double w_plus = 0.0;
  double w_minus = 0.0;
};

RankedDifferences rank_differences(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("wilcoxon: samples differ in length");
  if (a.empty()) throw ContractError("wilcoxon: empty samples");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    if (diff != 0.0) d.push_back(diff);
  }
  RankedDifferences out;
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });
  out.ranks.resize(n);
  out.positive.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) out.ranks[order[t]] = avg;
    out.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.positive[i] = d[i] > 0.0;
    (d[i] > 0.0 ? out.w_plus : out.w_minus) += out.ranks[i];
  }
  return out;
}

// Probability that the positive rank sum is <= `observed` when every sign is
// equally likely. Ranks are doubled so average ranks become integers.
double exact_lower_tail(const std::vector<double>& ranks, double observed) {
  std::vector<std::size_t> doubled;
  std::size_t total = 0;
  for (double r : ranks) {
    doubled.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
    total += doubled.back();
  }
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  std::size_t reach = 0;
  for (std::size_t r : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (ways[s]) ways[s + r] += ways[s];
    }
    reach += r;
  }
  const auto limit = static_cast<std::size_t>(std::llround(2.0 * observed));
  std::uint64_t below = 0;
  for (std::size_t s = 0; s <= std::min(limit, total); ++s) below += ways[s];
  return static_cast<double>(below) / std::ldexp(1.0, static_cast<int>(ranks.size()));
}

double normal_p(const RankedDifferences& rd, Sidedness sides) {
  const double n = static_cast<double>(rd.ranks.size());
  if (rd.ranks.empty()) return 1.0;
  double tie_term = 0.0;
  for (std::size_t t : rd.tie_sizes) {
    const double tt = static_cast<double>(t);
    tie_term += tt * tt * tt - tt;
  }
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return 1.0;
  const double z = (rd.w_plus - n * (n + 1.0) / 4.0) / std::sqrt(var);
  const double two = std::erfc(std::abs(z) / std::sqrt(2.0));
  return sides == Sidedness::two_sided ? std::min(1.0, two) : 0.5 * two;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha, Sidedness sides) {
  const RankedDifferences rd = rank_differences(a, b);
  WilcoxonResult res;
  res.w_plus = rd.w_plus;
  res.w_minus = rd.w_minus;
  res.n_effective = rd.ranks.size();
  if (rd.ranks.empty()) return res;  // p = 1, tie

  if (rd.ranks.size() <= 25) {
    const double tail = exact_lower_tail(rd.ranks, std::min(rd.w_plus, rd.w_minus));
    res.p = sides == Sidedness::two_sided ? std::min(1.0, 2.0 * tail) : tail;
    res.exact = true;
  } else {
    res.p = normal_p(rd, sides);
    res.exact = false;
  }
  if (res.p < alpha) {
    if (rd.w_plus > rd.w_minus) res.outcome = Outcome::a_wins;
    else if (rd.w_plus < rd.w_minus) res.outcome = Outcome::b_wins;
  }
  return res;
}

double wilcoxon_normal_p(std::span<const double> a, std::span<const double> b, Sidedness sides) {
  return normal_p(rank_differences(a, b), sides);
}

// ---------------------------------------------------------------------------
// Win/tie/loss

WtlMatrix wtl_matrix(const std::vector<std::string>& names,
                     const std::vector<std::vector<double>>& fold_scores, double alpha,
                     Sidedness sides) {
  if (names.size() != fold_scores.size()) {
    throw ContractError("wtl_matrix: one score vector per algorithm required");
  }
  const std::size_t n = names.size();
  for (const auto& s : fold_scores) {
    if (s.size() != fold_scores.front().size() || s.empty()) {
      throw ProtocolError("algorithms were not evaluated on the same folds");
    }
  }
  WtlMatrix m;
  m.names = names;
  m.outcome.assign(n, std::vector<Outcome>(n, Outcome::tie));
  m.p_value.assign(n, std::vector<double>(n, 1.0));
  m.totals.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const WilcoxonResult r = wilcoxon_signed_rank(fold_scores[i], fold_scores[j], alpha, sides);
      m.p_value[i][j] = m.p_value[j][i] = r.p;
      m.outcome[i][j] = r.outcome;
      m.outcome[j][i] = r.outcome == Outcome::a_wins   ? Outcome::b_wins
                        : r.outcome == Outcome::b_wins ? Outcome::a_wins
                                                       : Outcome::tie;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      switch (m.outcome[i][j]) {
        case Outcome::a_wins: ++m.totals[i].wins; break;
        case Outcome::tie: ++m.totals[i].ties; break;
        case Outcome::b_wins: ++m.totals[i].losses; break;
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Tables

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string out = buf;
  // Values that round to zero print without a sign.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

namespace {

const char* symbol(Outcome o) {
  switch (o) {
    case Outcome::a_wins: return "+";
    case Outcome::b_wins: return "-";
    case Outcome::tie: return "=";
  }
  return "?";
}

std::string wtl_string(const WtlTotals& t) {
  return std::to_string(t.wins) + "/" + std::to_string(t.ties) + "/" + std::to_string(t.losses);
}

std::size_t widest(const std::vector<std::string>& cells, std::size_t floor) {
  std::size_t w = floor;
  for (const auto& c : cells) w = std::max(w, c.size());
  return w;
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "algorithm,accuracy_mean,accuracy_std,f_mean,f_std\n";
  for (const auto& r : rows) {
    out << r.algorithm << ',' << format_fixed(r.summary.accuracy_mean, 4) << ','
        << format_fixed(r.summary.accuracy_std, 4) << ',' << format_fixed(r.summary.f_mean, 4) << ','
        << format_fixed(r.summary.f_std, 4) << '\n';
  }
}

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows) names.push_back(r.algorithm);
  const auto w = static_cast<int>(widest(names, 9));
  out << std::left << std::setw(w) << "Algorithm" << std::right << std::setw(10) << "Acc mean"
      << std::setw(9) << "Acc std" << std::setw(10) << "F mean" << std::setw(9) << "F std" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(w) << r.algorithm << std::right << std::setw(10)
        << format_fixed(r.summary.accuracy_mean) << std::setw(9)
        << format_fixed(r.summary.accuracy_std) << std::setw(10) << format_fixed(r.summary.f_mean)
        << std::setw(9) << format_fixed(r.summary.f_std) << '\n';
  }
}

void write_wtl_csv(std::ostream& out, const WtlMatrix& m) {
  out << "algorithm";
  for (const auto& n : m.names) out << ',' << n;
  out << ",w/t/l\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out << m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      out << ',' << (i == j ? "" : symbol(m.outcome[i][j]));
    }
    out << ',' << wtl_string(m.totals[i]) << '\n';
  }
}

void write_wtl_text(std::ostream& out, const WtlMatrix& m) {
  const auto w = static_cast<int>(widest(m.names, 9));
  out << std::left << std::setw(w) << "";
  for (const auto& n : m.names) out << ' ' << std::setw(w) << n;
  out << " w/t/l\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out << std::setw(w) << m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      out << ' ' << std::setw(w) << (i == j ? "" : symbol(m.outcome[i][j]));
    }
    out << ' ' << wtl_string(m.totals[i]) << '\n';
  }
  out << std::right;
}

}  // namespace greentune::eval
