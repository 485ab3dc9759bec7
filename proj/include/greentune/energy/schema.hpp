#pragma once

// Telemetry sample schema. The ordinal code tables below are frozen; the same
// tables are listed in docs/code_tables.md.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace greentune::energy {

inline constexpr std::size_t kFeatureCount = 32;

enum class FieldKind { numeric, enumeration, boolean };

struct FieldSpec {
  std::string_view name;
  FieldKind kind;
  std::span<const std::string_view> codes;  // enumeration only; code = position
};

/// The 32 state features in column order.
const std::array<FieldSpec, kFeatureCount>& feature_schema();
std::array<std::string, kFeatureCount> feature_names();

/// Index of a feature by name; throws ContractError when unknown.
std::size_t feature_index(std::string_view name);

namespace feature {
inline constexpr std::size_t charger = 0;
inline constexpr std::size_t health = 1;
inline constexpr std::size_t voltage = 2;
inline constexpr std::size_t temperature = 3;
inline constexpr std::size_t cpu_usage = 4;
inline constexpr std::size_t up_time = 5;
inline constexpr std::size_t sleep_time = 6;
inline constexpr std::size_t network_type = 7;
inline constexpr std::size_t mobile_network_type = 8;
inline constexpr std::size_t mobile_data_status = 9;
inline constexpr std::size_t mobile_data_activity = 10;
inline constexpr std::size_t roaming_enabled = 11;
inline constexpr std::size_t wifi_status = 12;
inline constexpr std::size_t wifi_signal_strength = 13;
inline constexpr std::size_t wifi_link_speed = 14;
inline constexpr std::size_t battery_state = 15;
inline constexpr std::size_t battery_level = 16;
inline constexpr std::size_t memory_free = 17;
inline constexpr std::size_t memory_used = 18;
inline constexpr std::size_t network_status = 19;
inline constexpr std::size_t screen_brightness = 20;
inline constexpr std::size_t screen_on = 21;
inline constexpr std::size_t bluetooth_enabled = 22;
inline constexpr std::size_t location_enabled = 23;
inline constexpr std::size_t power_saver_enabled = 24;
inline constexpr std::size_t flashlight_enabled = 25;
inline constexpr std::size_t nfc_enabled = 26;
inline constexpr std::size_t developer_mode = 27;
inline constexpr std::size_t storage_free = 28;
inline constexpr std::size_t storage_total = 29;
inline constexpr std::size_t memory_active = 30;
inline constexpr std::size_t memory_inactive = 31;
}  // namespace feature

enum class BatteryState { discharging = 0, charging = 1 };

/// Raw CSV columns: device_id, timestamp, then the 32 features.
inline constexpr std::size_t kRawColumnCount = kFeatureCount + 2;
std::array<std::string, kRawColumnCount> raw_header();

/// One telemetry sample. Missing cells are empty optionals.
struct SampleRecord {
  std::string device_id;
  std::optional<double> timestamp;  // seconds since epoch
  std::array<std::optional<double>, kFeatureCount> features{};

  bool complete() const;
  std::optional<BatteryState> battery_state() const;
  std::optional<double> battery_level() const { return features[feature::battery_level]; }

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Decodes one cell of the given feature. Empty text means missing; returns
/// an error message via `error` (and nullopt) when the cell cannot be parsed.
std::optional<double> decode_cell(std::size_t feature_idx, std::string_view text,
                                  std::string* error);
/// Inverse of decode_cell (code names for enumerations, true/false for
/// booleans, shortest round-trip text for numbers, "" for missing).
std::string encode_cell(std::size_t feature_idx, std::optional<double> value);

}  // namespace greentune::energy
