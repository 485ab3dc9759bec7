#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greentune/hgbc/matrix.hpp"

namespace greentune::energy {

enum class EnergyClass { safe = 0, warning = 1, critical = 2 };
inline constexpr std::size_t kClassCount = 3;

std::string_view class_name(EnergyClass c);
/// Throws DataError for names other than safe/warning/critical.
EnergyClass parse_class(std::string_view name);

struct LabeledInstance {
  std::vector<double> features;
  std::optional<double> ecpm;  // not persisted
  EnergyClass label = EnergyClass::safe;

  friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

/// Labeled instances with named feature columns. The file form is a CSV with
/// the feature names followed by a `label` column.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<std::string> feature_names)
      : feature_names_(std::move(feature_names)) {}

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t n_features() const { return feature_names_.size(); }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }

  const std::vector<LabeledInstance>& instances() const { return instances_; }
  const LabeledInstance& operator[](std::size_t i) const { return instances_[i]; }
  /// Throws ContractError when the width differs from the feature names.
  void add(LabeledInstance instance);

  std::array<std::size_t, kClassCount> class_counts() const;
  std::vector<int> labels() const;
  hgbc::FeatureMatrix matrix() const;
  Dataset subset(std::span<const std::size_t> rows) const;

  void write_csv(std::ostream& out) const;
  /// Throws DataError on malformed content (line number in the message).
  static Dataset read_csv(std::istream& in);
  void write_file(const std::string& path) const;
  static Dataset read_file(const std::string& path);

  /// FNV-1a digest of the file form; identifies a dataset in result manifests.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> feature_names_;
  std::vector<LabeledInstance> instances_;
};

std::vector<std::string> split_csv_line(std::string_view line);
std::string format_number(double v);

}  // namespace greentune::energy
