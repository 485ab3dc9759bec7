#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "greentune/common/error.hpp"
#include "greentune/energy/pipeline.hpp"
#include "greentune/energy/synth.hpp"

using namespace greentune;
using namespace greentune::energy;

namespace {

const std::string kFixtures = GREENTUNE_FIXTURES;

std::string header_line() {
  std::string h;
  for (const auto& c : raw_header()) h += (h.empty() ? "" : ",") + c;
  return h;
}

SampleRecord record(const std::string& device, double ts, double level, bool charging = false) {
  SampleRecord r;
  r.device_id = device;
  r.timestamp = ts;
  for (std::size_t f = 0; f < kFeatureCount; ++f) r.features[f] = 1.0;
  r.features[feature::battery_state] = charging ? 1.0 : 0.0;
  r.features[feature::battery_level] = level;
  r.features[feature::wifi_signal_strength] = -50.0;
  return r;
}

std::string raw_csv(const std::vector<SampleRecord>& records) {
  std::ostringstream out;
  write_raw_csv(out, records);
  return out.str();
}

IngestResult ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv(in);
}

}  // namespace

TEST_CASE("schema") {
  CHECK(feature_schema().size() == 32);
  CHECK(raw_header().size() == 34);
  CHECK(raw_header()[0] == "device_id");
  CHECK(feature_index("wifi_link_speed") == feature::wifi_link_speed);
  CHECK_THROWS_AS(feature_index("gps"), ContractError);

  std::string err;
  CHECK(decode_cell(feature::charger, "usb", &err) == 2.0);
  CHECK(decode_cell(feature::screen_on, "true", &err) == 1.0);
  CHECK_FALSE(decode_cell(feature::battery_level, "", &err).has_value());
  CHECK(err.empty());
  CHECK_FALSE(decode_cell(feature::battery_level, "abc", &err).has_value());
  CHECK_FALSE(err.empty());
  err.clear();
  CHECK_FALSE(decode_cell(feature::charger, "solar", &err).has_value());
  CHECK_FALSE(err.empty());
  CHECK(encode_cell(feature::health, 1.0) == "good");
  CHECK(encode_cell(feature::voltage, 3.85) == "3.85");
  CHECK(encode_cell(feature::voltage, std::nullopt).empty());
}

TEST_CASE("ingestion") {
  SUBCASE("empty data section") {
    const auto r = ingest_text(header_line() + "\n");
    CHECK(r.records.empty());
    CHECK(r.errors.empty());
  }
  SUBCASE("fixture fields are read literally") {
    const auto r = ingest_csv_file(kFixtures + "/six_rows.csv");
    REQUIRE(r.records.size() == 6);
    const auto& first = r.records[0];
    CHECK(first.device_id == "dev-a");
    CHECK(first.timestamp == 0.0);
    CHECK(first.features[feature::battery_level] == 80.0);
    CHECK(first.features[feature::voltage] == 3.85);
    CHECK(first.features[feature::health] == 1.0);  // good
    CHECK(first.features[feature::mobile_network_type] == 5.0);  // lte
    CHECK(first.features[feature::wifi_signal_strength] == -55.0);
    CHECK(r.records[2].battery_state() == BatteryState::charging);
    CHECK(r.records[5].features[feature::battery_level] == 49.7);
  }
  SUBCASE("round trip through the raw writer") {
    const auto r = ingest_csv_file(kFixtures + "/six_rows.csv");
    CHECK(ingest_text(raw_csv(r.records)).records == r.records);
  }
  SUBCASE("malformed cell rejects the row with its line number") {
    auto rows = std::vector<SampleRecord>{record("d", 0, 50), record("d", 60, 49)};
    std::string text = raw_csv(rows);
    const auto pos = text.find(",49,");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, ",abc,");
    const auto r = ingest_text(text);
    CHECK(r.records.size() == 1);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 3);
    CHECK(r.errors[0].message.find("battery_level") != std::string::npos);
  }
  SUBCASE("wrong cell count") {
    const auto r = ingest_text(header_line() + "\nd,0,1,2\n");
    CHECK(r.errors.size() == 1);
  }
  SUBCASE("missing header column") {
    CHECK_THROWS_AS(ingest_csv_file(kFixtures + "/missing_column.csv"), SchemaError);
  }
}

TEST_CASE("elimination") {
  std::vector<SampleRecord> rows{record("a", 0, 90), record("a", 60, 89, true),
                                 record("a", 120, 88), record("a", 180, 87, true),
                                 record("a", 240, 86)};
  rows[2].features[feature::wifi_link_speed].reset();
  EliminationCounts counts;
  const auto kept = eliminate(rows, &counts);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == rows[0]);
  CHECK(kept[1] == rows[4]);
  CHECK(counts.charging == 2);
  CHECK(counts.missing == 1);

  std::vector<SampleRecord> charging{record("a", 0, 10, true), record("a", 60, 11, true)};
  CHECK(eliminate(charging).empty());
}

TEST_CASE("ECPM pairing") {
  SUBCASE("two discharging samples") {
    std::vector<SampleRecord> s{record("a", 0, 80), record("a", 240, 78)};
    const auto pairs = compute_ecpm(s);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].ecpm == doctest::Approx(2.0 / 240.0 * 60.0).epsilon(1e-12));
    CHECK(pairs[0].state == s[0]);
  }
  SUBCASE("equal levels") {
    std::vector<SampleRecord> s{record("a", 0, 80), record("a", 600, 80)};
    CHECK(compute_ecpm(s)[0].ecpm == 0.0);
  }
  SUBCASE("a charging sample breaks the pair") {
    std::vector<SampleRecord> s{record("a", 0, 80), record("a", 60, 81, true), record("a", 120, 79)};
    EcpmReport report;
    CHECK(compute_ecpm(s, &report).empty());
    CHECK(report.skipped_charging == 1);
  }
  SUBCASE("pairs never cross devices") {
    std::vector<SampleRecord> s{record("a", 0, 80), record("b", 60, 70)};
    CHECK(compute_ecpm(s).empty());
  }
  SUBCASE("non-positive time step and rising level") {
    std::vector<SampleRecord> s{record("a", 0, 80), record("a", 0, 79), record("a", 60, 85)};
    EcpmReport report;
    CHECK(compute_ecpm(s, &report).empty());
    CHECK(report.skipped_nonpositive_dt == 1);
    CHECK(report.skipped_negative == 1);
  }
}

TEST_CASE("labels") {
  CHECK(label(0.3) == EnergyClass::safe);
  CHECK(label(0.5) == EnergyClass::warning);
  CHECK(label(1.0) == EnergyClass::warning);
  CHECK(label(1.5) == EnergyClass::warning);
  CHECK(label(1.6) == EnergyClass::critical);
  CHECK_THROWS_AS(label(-0.1), ContractError);
  CHECK_THROWS_AS(label(std::nan("")), ContractError);
  CHECK(parse_class("critical") == EnergyClass::critical);
  CHECK_THROWS_AS(parse_class("high"), DataError);
}

TEST_CASE("preprocessing the six-row fixture") {
  PreprocessReport report;
  const auto d = preprocess(ingest_csv_file(kFixtures + "/six_rows.csv"), {}, &report);
  REQUIRE(d.size() == 2);
  // dev-a: 80 -> 78 over 240 s; dev-b: 50 -> 49.7 over 60 s.
  CHECK(d[0].ecpm == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d[0].label == EnergyClass::warning);
  CHECK(d[0].features[feature::cpu_usage] == 42.0);
  CHECK(d[1].ecpm == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(d[1].label == EnergyClass::safe);
  CHECK(report.rows_read == 6);
  CHECK(report.eliminated.charging == 1);
  CHECK(report.ecpm.skipped_charging == 1);
  CHECK(report.class_counts[0] == 1);
  CHECK(report.class_counts[1] == 1);
}

TEST_CASE("dataset files") {
  const auto synth = synthesize(SynthSpec{{0.4, 0.35, 0.25}, 60, 5, 1.0}).dataset;
  std::stringstream ss;
  synth.write_csv(ss);
  const auto back = Dataset::read_csv(ss);
  CHECK(back.size() == synth.size());
  CHECK(back.labels() == synth.labels());
  CHECK(back.matrix().row(7)[3] == synth.matrix().row(7)[3]);
  CHECK(back.fingerprint() == synth.fingerprint());

  std::istringstream bad("a,b,label\n1,2,hot\n");
  CHECK_THROWS_AS(Dataset::read_csv(bad), DataError);
  std::istringstream no_label("a,b\n1,2\n");
  CHECK_THROWS_AS(Dataset::read_csv(no_label), SchemaError);

  const auto dir = std::filesystem::temp_directory_path() / "greentune_dataset_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "d.csv").string();
  synth.write_file(path);
  CHECK(Dataset::read_file(path).fingerprint() == synth.fingerprint());
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic generator") {
  SUBCASE("class counts follow the proportions") {
    const auto r = synthesize(SynthSpec{{0.4, 0.35, 0.25}, 300, 3, 1.0});
    const auto counts = r.dataset.class_counts();
    CHECK(counts[0] == 120);
    CHECK(counts[1] == 105);
    CHECK(counts[2] == 75);
    CHECK(r.dataset.n_features() == 32);
    CHECK(r.informative.size() == 8);
  }
  SUBCASE("single class") {
    const auto r = synthesize(SynthSpec{{1.0, 0.0, 0.0}, 50, 3, 1.0});
    CHECK(r.dataset.class_counts()[0] == 50);
  }
  SUBCASE("deterministic per seed") {
    const SynthSpec spec{{0.4, 0.35, 0.25}, 100, 9, 1.0};
    CHECK(synthesize(spec).dataset == synthesize(spec).dataset);
    SynthSpec other = spec;
    other.seed = 10;
    CHECK_FALSE(synthesize(other).dataset == synthesize(spec).dataset);
  }
  SUBCASE("ECPM matches the label") {
    const auto r = synthesize(SynthSpec{{0.3, 0.4, 0.3}, 200, 1, 1.0});
    for (const auto& inst : r.dataset.instances()) {
      REQUIRE(inst.ecpm.has_value());
      CHECK(label(*inst.ecpm) == inst.label);
    }
  }
  SUBCASE("apportionment") {
    const auto a = apportion({1.0 / 3, 1.0 / 3, 1.0 / 3}, 100);
    CHECK(a[0] == 34);
    CHECK(a[1] == 33);
    CHECK(a[2] == 33);
  }
  SUBCASE("invalid specs") {
    CHECK_THROWS_AS(synthesize(SynthSpec{{0.5, 0.5, 0.5}, 100, 1, 1.0}), ConfigError);
    CHECK_THROWS_AS(synthesize(SynthSpec{{0.4, 0.35, 0.25}, 10, 1, 1.0}), ConfigError);
  }
}
