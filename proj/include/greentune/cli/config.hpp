#pragma once

// Experiment configuration: a flat key=value text file ('#' starts a comment)
// whose keys are listed in docs/config.md. Command-line flags override file
// values.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greentune/energy/synth.hpp"
#include "greentune/eval/stats.hpp"
#include "greentune/fstune/fstune.hpp"
#include "greentune/hgbc/model.hpp"
#include "greentune/search/optimizer.hpp"

namespace greentune::cli {

enum class Protocol {
  nested,  // search sees only the outer training split
  global,  // one search on the whole dataset, then outer CV of its result
};

struct ExperimentConfig {
  std::string name;  // algorithm label in result tables; derived when empty

  // Data: a labeled dataset file, or a synthesis spec when `dataset` is empty.
  std::string dataset;
  energy::SynthSpec synth;

  fstune::Variant variant = fstune::Variant::combined;
  // Absent means no search: HGBC with default parameters on every feature.
  std::optional<search::OptimizerKind> optimizer = search::OptimizerKind::lshade;
  search::OptimizerSettings settings;

  int population_size = 50;
  int max_nfe = 800;
  int inner_k = 5;
  int outer_k = 10;
  std::vector<std::uint64_t> seeds{1};
  hgbc::HgbcParams defaults;  // parameters outside the search (n_trees always)
  Protocol protocol = Protocol::nested;
  eval::FAverage f_average = eval::FAverage::macro;
  bool cache = true;
  unsigned workers = 1;
  std::string out = "results";

  /// Throws ConfigError for inconsistent settings.
  void validate() const;
  std::string label() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses key=value lines. Throws ConfigError naming the line on malformed
/// input.
KeyValues parse_key_values(const std::string& text);
KeyValues read_config_file(const std::string& path);

/// Applies settings in order; later keys win. Throws ConfigError on an
/// unknown key or an unparsable value.
void apply(ExperimentConfig& config, const KeyValues& values);

/// Canonical key=value form of every setting (stable order).
std::string to_key_values(const ExperimentConfig& config);

std::optional<search::OptimizerKind> parse_optimizer_or_none(const std::string& name);
std::string optimizer_name(const std::optional<search::OptimizerKind>& kind);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::array<double, energy::kClassCount> parse_proportions(const std::string& text);

}  // namespace greentune::cli
