#pragma once

// Raw telemetry ingestion, instance elimination, ECPM pairing and labeling.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "greentune/energy/dataset.hpp"
#include "greentune/energy/schema.hpp"

namespace greentune::energy {

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct IngestResult {
  std::vector<SampleRecord> records;  // file order
  std::vector<RowError> errors;       // rejected rows
};

/// Parses a raw sample CSV. A header that differs from raw_header() throws
/// SchemaError; malformed rows are rejected individually.
IngestResult ingest_csv(std::istream& in);
IngestResult ingest_csv_file(const std::string& path);

void write_raw_csv(std::ostream& out, std::span<const SampleRecord> records);

struct EliminationCounts {
  std::size_t charging = 0;
  std::size_t missing = 0;  // non-charging records with a missing field
};

/// Drops charging records and records with any missing field, keeping order.
std::vector<SampleRecord> eliminate(std::span<const SampleRecord> records,
                                    EliminationCounts* counts = nullptr);

/// Stable sort by (device_id, timestamp); records without a timestamp go last
/// within their device.
void sort_records(std::vector<SampleRecord>& records);

struct EcpmPair {
  SampleRecord state;  // the earlier record of the pair
  double ecpm = 0.0;   // battery percent per minute
};

struct EcpmReport {
  std::size_t pairs = 0;
  std::size_t skipped_charging = 0;     // pairs interrupted by a charging record
  std::size_t skipped_nonpositive_dt = 0;
  std::size_t skipped_negative = 0;     // battery level rose while discharging
};

/// Pairs consecutive complete discharging records of the same device.
/// Expects the raw stream sorted by sort_records, charging records included:
/// a charging record between two discharging records breaks the pair.
/// Incomplete records are ignored.
std::vector<EcpmPair> compute_ecpm(std::span<const SampleRecord> sorted,
                                   EcpmReport* report = nullptr);

struct LabelThresholds {
  double low = 0.5;   // ecpm below this is safe
  double high = 1.5;  // ecpm above this is critical
};

/// Throws ContractError on negative or non-finite ecpm.
EnergyClass label(double ecpm, const LabelThresholds& thresholds = {});

struct PreprocessReport {
  std::size_t rows_read = 0;
  std::vector<RowError> row_errors;
  EliminationCounts eliminated;
  EcpmReport ecpm;
  std::array<std::size_t, kClassCount> class_counts{};
};

/// ingest result -> sorted stream -> ECPM pairs -> labeled dataset.
Dataset preprocess(IngestResult ingested, const LabelThresholds& thresholds,
                   PreprocessReport* report = nullptr);

void write_report(std::ostream& out, const PreprocessReport& report);

}  // namespace greentune::energy
