#include "greentune/energy/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "greentune/common/error.hpp"

namespace greentune::energy {

namespace {

bool parse_timestamp(const std::string& text, double& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

std::string header_mismatch(const std::vector<std::string>& got) {
  const auto want = raw_header();
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (i >= got.size()) return "missing column '" + want[i] + "'";
    if (got[i] != want[i]) {
      return "column " + std::to_string(i + 1) + " is '" + got[i] + "', expected '" + want[i] + "'";
    }
  }
  return "unknown column '" + got[want.size()] + "'";
}

}  // namespace

IngestResult ingest_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("input has no header row");
  const auto header = split_csv_line(line);
  const auto want = raw_header();
  if (!std::equal(header.begin(), header.end(), want.begin(), want.end())) {
    throw SchemaError("header mismatch: " + header_mismatch(header));
  }

  IngestResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != kRawColumnCount) {
      result.errors.push_back({line_no, "expected " + std::to_string(kRawColumnCount) +
                                            " cells, got " + std::to_string(cells.size())});
      continue;
    }
    SampleRecord rec;
    rec.device_id = cells[0];
    std::string error;
    if (!cells[1].empty()) {
      double ts = 0.0;
      if (!parse_timestamp(cells[1], ts)) {
        result.errors.push_back({line_no, "timestamp: not a number: '" + cells[1] + "'"});
        continue;
      }
      rec.timestamp = ts;
    }
    for (std::size_t f = 0; f < kFeatureCount && error.empty(); ++f) {
      rec.features[f] = decode_cell(f, cells[f + 2], &error);
    }
    if (!error.empty()) {
      result.errors.push_back({line_no, error});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

IngestResult ingest_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  return ingest_csv(in);
}

void write_raw_csv(std::ostream& out, std::span<const SampleRecord> records) {
  const auto header = raw_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& rec : records) {
    out << rec.device_id << ',';
    if (rec.timestamp) out << format_number(*rec.timestamp);
    for (std::size_t f = 0; f < kFeatureCount; ++f) out << ',' << encode_cell(f, rec.features[f]);
    out << '\n';
  }
}

std::vector<SampleRecord> eliminate(std::span<const SampleRecord> records,
                                    EliminationCounts* counts) {
  EliminationCounts local;
  std::vector<SampleRecord> kept;
  for (const auto& rec : records) {
    if (rec.battery_state() == BatteryState::charging) {
      ++local.charging;
    } else if (!rec.complete()) {
      ++local.missing;
    } else {
      kept.push_back(rec);
    }
  }
  if (counts) *counts = local;
  return kept;
}

void sort_records(std::vector<SampleRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const SampleRecord& a, const SampleRecord& b) {
    if (a.device_id != b.device_id) return a.device_id < b.device_id;
    if (a.timestamp.has_value() != b.timestamp.has_value()) return a.timestamp.has_value();
    return a.timestamp.value_or(0.0) < b.timestamp.value_or(0.0);
  });
}

std::vector<EcpmPair> compute_ecpm(std::span<const SampleRecord> sorted, EcpmReport* report) {
  EcpmReport local;
  std::vector<EcpmPair> pairs;
  const SampleRecord* prev = nullptr;
  bool interrupted = false;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const SampleRecord& rec = sorted[i];
    if (i > 0 && rec.device_id != sorted[i - 1].device_id) {
      prev = nullptr;
      interrupted = false;
    }
    if (rec.battery_state() == BatteryState::charging) {
      if (prev) interrupted = true;
      continue;
    }
    if (!rec.complete()) continue;
    if (prev && interrupted) {
      ++local.skipped_charging;
    } else if (prev) {
      const double dt = *rec.timestamp - *prev->timestamp;
      const double drop = *prev->battery_level() - *rec.battery_level();
      if (dt <= 0.0) {
        ++local.skipped_nonpositive_dt;
      } else if (drop < 0.0) {
        ++local.skipped_negative;
      } else {
        pairs.push_back({*prev, drop / dt * 60.0});
      }
    }
    prev = &rec;
    interrupted = false;
  }
  local.pairs = pairs.size();
  if (report) *report = local;
  return pairs;
}

EnergyClass label(double ecpm, const LabelThresholds& thresholds) {
  if (!(ecpm >= 0.0) || !std::isfinite(ecpm)) {
    throw ContractError("ecpm must be finite and non-negative");
  }
  if (ecpm < thresholds.low) return EnergyClass::safe;
  if (ecpm > thresholds.high) return EnergyClass::critical;
  return EnergyClass::warning;
}

Dataset preprocess(IngestResult ingested, const LabelThresholds& thresholds,
                   PreprocessReport* report) {
  PreprocessReport local;
  local.rows_read = ingested.records.size() + ingested.errors.size();
  local.row_errors = std::move(ingested.errors);
  eliminate(ingested.records, &local.eliminated);
  sort_records(ingested.records);
  const auto pairs = compute_ecpm(ingested.records, &local.ecpm);

  const auto names = feature_names();
  Dataset ds(std::vector<std::string>(names.begin(), names.end()));
  for (const auto& p : pairs) {
    LabeledInstance inst;
    inst.features.reserve(kFeatureCount);
    for (const auto& v : p.state.features) inst.features.push_back(*v);
    inst.ecpm = p.ecpm;
    inst.label = label(p.ecpm, thresholds);
    ds.add(std::move(inst));
  }
  local.class_counts = ds.class_counts();
  if (report) *report = std::move(local);
  return ds;
}

void write_report(std::ostream& out, const PreprocessReport& r) {
  out << "rows_read=" << r.rows_read << '\n';
  out << "rows_rejected=" << r.row_errors.size() << '\n';
  out << "eliminated_charging=" << r.eliminated.charging << '\n';
  out << "eliminated_missing=" << r.eliminated.missing << '\n';
  out << "pairs=" << r.ecpm.pairs << '\n';
  out << "skipped_charging_between=" << r.ecpm.skipped_charging << '\n';
  out << "skipped_nonpositive_dt=" << r.ecpm.skipped_nonpositive_dt << '\n';
  out << "skipped_negative_ecpm=" << r.ecpm.skipped_negative << '\n';
  for (std::size_t c = 0; c < kClassCount; ++c) {
    out << "class_" << class_name(static_cast<EnergyClass>(c)) << '=' << r.class_counts[c] << '\n';
  }
  for (const auto& e : r.row_errors) out << "row_error line " << e.line << ": " << e.message << '\n';
}

}  // namespace greentune::energy
