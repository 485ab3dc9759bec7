#include "greentune/energy/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "greentune/common/error.hpp"
#include "greentune/energy/schema.hpp"

namespace greentune::energy {

namespace {

using Rng = std::mt19937_64;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

double normal(Rng& rng, double mean, double sd, double lo, double hi) {
  std::normal_distribution<double> d(mean, sd);
  return std::clamp(d(rng), lo, hi);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double bernoulli(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng) ? 1.0 : 0.0; }

double code(Rng& rng, int n_codes) {
  return static_cast<double>(std::uniform_int_distribution<int>(0, n_codes - 1)(rng));
}

// Latent consumption score of one row. The screen state selects which
// feature decides the second level, that outcome selects the third-level
// feature, and a lit flashlight adds one more level; cpu_usage orders rows
// inside a level. The result is a step function of the informative features.
double consumption_score(const std::vector<double>& x) {
  namespace ft = feature;
  const bool screen = x[ft::screen_on] > 0.5;
  const bool second = screen ? x[ft::screen_brightness] > 127.5 : x[ft::cpu_usage] > 45.0;
  bool third = false;
  if (screen) {
    third = second ? x[ft::wifi_signal_strength] < -60.0 : x[ft::temperature] > 30.0;
  } else {
    third = second ? x[ft::location_enabled] > 0.5 : x[ft::memory_used] > 2400.0;
  }
  const double level = (second ? 1.0 : 0.0) + (third ? 1.0 : 0.0) +
                       (x[ft::flashlight_enabled] > 0.5 ? 1.0 : 0.0);
  return level + 0.45 * std::clamp((x[ft::cpu_usage] - 45.0) / 18.0, -1.0, 1.0);
}

double draw_feature(std::size_t f, Rng& rng) {
  namespace ft = feature;
  switch (f) {
    case ft::cpu_usage: return normal(rng, 45.0, 18.0, 0.0, 100.0);
    case ft::temperature: return normal(rng, 30.0, 4.0, 10.0, 55.0);
    case ft::wifi_signal_strength: return normal(rng, -60.0, 12.0, -100.0, 0.0);
    case ft::memory_used: return normal(rng, 2400.0, 800.0, 100.0, 8000.0);
    case ft::screen_brightness: return uniform(rng, 0.0, 255.0);
    case ft::screen_on: return bernoulli(rng, 0.5);
    case ft::location_enabled: return bernoulli(rng, 0.5);
    case ft::flashlight_enabled: return bernoulli(rng, 0.3);
    case ft::charger: return 0.0;        // unplugged while discharging
    case ft::battery_state: return 0.0;  // discharging
    case ft::health: {
      const double u = uniform(rng, 0.0, 1.0);
      return u < 0.9 ? 1.0 : (u < 0.94 ? 2.0 : (u < 0.97 ? 6.0 : 0.0));
    }
    case ft::voltage: return normal(rng, 3.85, 0.15, 3.3, 4.4);
    case ft::up_time: return uniform(rng, 0.0, 500000.0);
    case ft::sleep_time: return uniform(rng, 0.0, 300000.0);
    case ft::network_type: return code(rng, 3);
    case ft::mobile_network_type: return code(rng, 7);
    case ft::mobile_data_status: return code(rng, 4);
    case ft::mobile_data_activity: return code(rng, 5);
    case ft::roaming_enabled: return bernoulli(rng, 0.05);
    case ft::wifi_status: return code(rng, 5);
    case ft::wifi_link_speed: return uniform(rng, 0.0, 866.0);
    case ft::battery_level: return uniform(rng, 5.0, 100.0);
    case ft::memory_free: return uniform(rng, 200.0, 4000.0);
    case ft::network_status: return bernoulli(rng, 0.85);
    case ft::bluetooth_enabled: return bernoulli(rng, 0.4);
    case ft::power_saver_enabled: return bernoulli(rng, 0.2);
    case ft::nfc_enabled: return bernoulli(rng, 0.3);
    case ft::developer_mode: return bernoulli(rng, 0.1);
    case ft::storage_free: return uniform(rng, 1000.0, 64000.0);
    case ft::storage_total: return 32000.0 * std::pow(2.0, code(rng, 3));
    case ft::memory_active: return uniform(rng, 500.0, 3000.0);
    case ft::memory_inactive: return uniform(rng, 200.0, 2000.0);
    default: throw ContractError("feature index out of range");
  }
}

// Maps position `rank` of `count` rows inside a class onto that class's ECPM
// interval, so label(ecpm) reproduces the class.
double ecpm_for_rank(int c, std::size_t rank, std::size_t count) {
  const double u = (static_cast<double>(rank) + 0.5) / static_cast<double>(count);
  switch (c) {
    case 0: return 0.5 * u;
    case 1: return 0.5 + u;
    default: return 1.5 + 1.5 * u;
  }
}

}  // namespace

const std::vector<std::size_t>& informative_features() {
  static const std::vector<std::size_t> idx{
      feature::cpu_usage,         feature::temperature, feature::wifi_signal_strength,
      feature::memory_used,       feature::screen_brightness, feature::screen_on,
      feature::location_enabled,  feature::flashlight_enabled};
  return idx;
}

std::array<std::size_t, kClassCount> apportion(const std::array<double, kClassCount>& p,
                                               std::size_t n) {
  std::array<std::size_t, kClassCount> counts{};
  std::array<double, kClassCount> frac{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const double exact = p[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - std::floor(exact);
    assigned += counts[c];
  }
  std::array<std::size_t, kClassCount> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % kClassCount]];
  return counts;
}

SynthResult synthesize(const SynthSpec& spec) {
  if (spec.n < 30) throw ConfigError("synthetic dataset needs n >= 30");
  double total = 0.0;
  for (double p : spec.proportions) {
    if (!(p >= 0.0)) throw ConfigError("class proportions must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("class proportions must sum to 1");
  if (!(spec.noise >= 0.0)) throw ConfigError("noise scale must be non-negative");

  Rng rng(spec.seed);
  const auto names = feature_names();
  std::vector<std::vector<double>> rows(spec.n, std::vector<double>(kFeatureCount));
  std::vector<double> score(spec.n, 0.0);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (std::size_t r = 0; r < spec.n; ++r) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) rows[r][f] = round2(draw_feature(f, rng));
    score[r] = consumption_score(rows[r]) + 0.15 * spec.noise * jitter(rng);
  }

  // Ground truth: the lowest-scoring rows are safe, the highest critical,
  // with class sizes apportioned from the proportions.
  std::vector<std::size_t> order(spec.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  const auto counts = apportion(spec.proportions, spec.n);
  std::vector<int> cls(spec.n);
  std::vector<double> ecpm(spec.n);
  std::size_t pos = 0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i, ++pos) {
      cls[order[pos]] = static_cast<int>(c);
      ecpm[order[pos]] = ecpm_for_rank(static_cast<int>(c), i, counts[c]);
    }
  }

  SynthResult out{Dataset(std::vector<std::string>(names.begin(), names.end())), informative_features()};
  for (std::size_t r = 0; r < spec.n; ++r) {
    LabeledInstance inst;
    inst.features = std::move(rows[r]);
    inst.ecpm = ecpm[r];
    inst.label = static_cast<EnergyClass>(cls[r]);
    out.dataset.add(std::move(inst));
  }
  return out;
}

}  // namespace greentune::energy
