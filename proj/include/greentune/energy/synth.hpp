#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "greentune/energy/dataset.hpp"

namespace greentune::energy {

struct SynthSpec {
  std::array<double, kClassCount> proportions{0.4, 0.35, 0.25};
  std::size_t n = 600;
  std::uint64_t seed = 1;
  // Scale of the Gaussian term added to the latent consumption score
  // (standard deviation 0.15 * noise); 0 makes the labels a function of the
  // informative features.
  double noise = 1.0;
};

struct SynthResult {
  Dataset dataset;
  std::vector<std::size_t> informative;  // feature indices carrying class signal
};

/// Feature indices that carry class signal in synthesized data: cpu_usage,
/// temperature, wifi_signal_strength, memory_used, screen_brightness,
/// screen_on, location_enabled, flashlight_enabled.
const std::vector<std::size_t>& informative_features();

/// Draws all 32 features from class-independent distributions within their
/// schema ranges (values rounded to two decimals). A latent consumption score,
/// a step function of the informative features (a depth-three rule over
/// screen_on, screen_brightness, cpu_usage, temperature, wifi_signal_strength,
/// memory_used and location_enabled, plus one step for flashlight_enabled, with
/// cpu_usage breaking ties) plus Gaussian noise, ranks the rows: the lowest go
/// to safe and the highest to critical, with class sizes given by the
/// largest-remainder rounding of proportions * n. ECPM is filled in
/// monotonically inside each class's interval. Throws ConfigError when n < 30
/// or the proportions are negative or do not sum to 1.
SynthResult synthesize(const SynthSpec& spec);

/// Largest-remainder apportionment (ties to the lower class index).
std::array<std::size_t, kClassCount> apportion(const std::array<double, kClassCount>& proportions,
                                               std::size_t n);

}  // namespace greentune::energy
