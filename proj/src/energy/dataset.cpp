#include "greentune/energy/dataset.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "greentune/common/error.hpp"
#include "greentune/common/io.hpp"

namespace greentune::energy {

namespace {

constexpr std::array<std::string_view, kClassCount> kClassNames{"safe", "warning", "critical"};

}  // namespace

std::string_view class_name(EnergyClass c) { return kClassNames.at(static_cast<std::size_t>(c)); }

EnergyClass parse_class(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == name) return static_cast<EnergyClass>(i);
  }
  throw DataError("unknown class label '" + std::string(name) + "'");
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void Dataset::add(LabeledInstance instance) {
  if (instance.features.size() != feature_names_.size()) {
    throw ContractError("instance width does not match dataset feature count");
  }
  instances_.push_back(std::move(instance));
}

std::array<std::size_t, kClassCount> Dataset::class_counts() const {
  std::array<std::size_t, kClassCount> counts{};
  for (const auto& inst : instances_) ++counts[static_cast<std::size_t>(inst.label)];
  return counts;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) out.push_back(static_cast<int>(inst.label));
  return out;
}

hgbc::FeatureMatrix Dataset::matrix() const {
  hgbc::FeatureMatrix m(instances_.size(), feature_names_.size());
  for (std::size_t r = 0; r < instances_.size(); ++r) {
    for (std::size_t c = 0; c < feature_names_.size(); ++c) m(r, c) = instances_[r].features[c];
  }
  return m;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out(feature_names_);
  out.instances_.reserve(rows.size());
  for (std::size_t r : rows) out.instances_.push_back(instances_.at(r));
  return out;
}

void Dataset::write_csv(std::ostream& out) const {
  for (const auto& name : feature_names_) out << name << ',';
  out << "label\n";
  for (const auto& inst : instances_) {
    for (double v : inst.features) out << format_number(v) << ',';
    out << class_name(inst.label) << '\n';
  }
}

Dataset Dataset::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file is empty");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "label") {
    throw SchemaError("dataset header must end with a 'label' column");
  }
  header.pop_back();
  Dataset ds(std::move(header));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (cells.size() != ds.n_features() + 1) throw DataError("wrong column count" + where);
    LabeledInstance inst;
    inst.features.resize(ds.n_features());
    for (std::size_t c = 0; c < ds.n_features(); ++c) {
      const std::string& s = cells[c];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), inst.features[c]);
      if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() ||
          !std::isfinite(inst.features[c])) {
        throw DataError("bad value '" + s + "' in column " + ds.feature_names_[c] + where);
      }
    }
    try {
      inst.label = parse_class(cells.back());
    } catch (const DataError& e) {
      throw DataError(e.what() + where);
    }
    ds.instances_.push_back(std::move(inst));
  }
  return ds;
}

void Dataset::write_file(const std::string& path) const {
  std::ostringstream ss;
  write_csv(ss);
  write_file_atomic(path, ss.str());
}

Dataset Dataset::read_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return read_csv(in);
}

std::uint64_t Dataset::fingerprint() const {
  std::ostringstream ss;
  write_csv(ss);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : ss.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace greentune::energy
