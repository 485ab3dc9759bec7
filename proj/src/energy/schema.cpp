#include "greentune/energy/schema.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "greentune/common/error.hpp"

namespace greentune::energy {

namespace {

using namespace std::string_view_literals;

constexpr std::array kCharger{"unplugged"sv, "ac"sv, "usb"sv, "wireless"sv};
constexpr std::array kHealth{"unknown"sv, "good"sv,          "overheat"sv,
                             "dead"sv,    "over_voltage"sv,  "unspecified_failure"sv,
                             "cold"sv};
constexpr std::array kNetworkType{"none"sv, "wifi"sv, "mobile"sv, "ethernet"sv, "other"sv};
constexpr std::array kMobileNetworkType{"unknown"sv, "gprs"sv, "edge"sv, "umts"sv,
                                        "hspa"sv,    "lte"sv,  "nr"sv};
constexpr std::array kMobileDataStatus{"disconnected"sv, "connecting"sv, "connected"sv,
                                       "suspended"sv};
constexpr std::array kMobileDataActivity{"none"sv, "in"sv, "out"sv, "inout"sv, "dormant"sv};
constexpr std::array kWifiStatus{"disabled"sv, "disabling"sv, "enabled"sv, "enabling"sv,
                                 "unknown"sv};
constexpr std::array kBatteryState{"discharging"sv, "charging"sv};
constexpr std::array kNetworkStatus{"disconnected"sv, "connected"sv};

constexpr std::span<const std::string_view> kNone{};

FieldSpec numeric(std::string_view n) { return {n, FieldKind::numeric, kNone}; }
FieldSpec boolean(std::string_view n) { return {n, FieldKind::boolean, kNone}; }
template <std::size_t N>
FieldSpec enumeration(std::string_view n, const std::array<std::string_view, N>& codes) {
  return {n, FieldKind::enumeration, std::span<const std::string_view>(codes)};
}

}  // namespace

const std::array<FieldSpec, kFeatureCount>& feature_schema() {
  static const std::array<FieldSpec, kFeatureCount> schema{
      enumeration("charger", kCharger),
      enumeration("health", kHealth),
      numeric("voltage"),
      numeric("temperature"),
      numeric("cpu_usage"),
      numeric("up_time"),
      numeric("sleep_time"),
      enumeration("network_type", kNetworkType),
      enumeration("mobile_network_type", kMobileNetworkType),
      enumeration("mobile_data_status", kMobileDataStatus),
      enumeration("mobile_data_activity", kMobileDataActivity),
      boolean("roaming_enabled"),
      enumeration("wifi_status", kWifiStatus),
      numeric("wifi_signal_strength"),
      numeric("wifi_link_speed"),
      enumeration("battery_state", kBatteryState),
      numeric("battery_level"),
      numeric("memory_free"),
      numeric("memory_used"),
      enumeration("network_status", kNetworkStatus),
      numeric("screen_brightness"),
      boolean("screen_on"),
      boolean("bluetooth_enabled"),
      boolean("location_enabled"),
      boolean("power_saver_enabled"),
      boolean("flashlight_enabled"),
      boolean("nfc_enabled"),
      boolean("developer_mode"),
      numeric("storage_free"),
      numeric("storage_total"),
      numeric("memory_active"),
      numeric("memory_inactive"),
  };
  return schema;
}

std::array<std::string, kFeatureCount> feature_names() {
  std::array<std::string, kFeatureCount> names;
  for (std::size_t i = 0; i < kFeatureCount; ++i) names[i] = feature_schema()[i].name;
  return names;
}

std::size_t feature_index(std::string_view name) {
  const auto& s = feature_schema();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].name == name) return i;
  }
  throw ContractError("unknown feature '" + std::string(name) + "'");
}

std::array<std::string, kRawColumnCount> raw_header() {
  std::array<std::string, kRawColumnCount> h;
  h[0] = "device_id";
  h[1] = "timestamp";
  for (std::size_t i = 0; i < kFeatureCount; ++i) h[i + 2] = feature_schema()[i].name;
  return h;
}

bool SampleRecord::complete() const {
  if (device_id.empty() || !timestamp) return false;
  for (const auto& f : features) {
    if (!f) return false;
  }
  return true;
}

std::optional<BatteryState> SampleRecord::battery_state() const {
  const auto& v = features[feature::battery_state];
  if (!v) return std::nullopt;
  return static_cast<BatteryState>(static_cast<int>(*v));
}

std::optional<double> decode_cell(std::size_t feature_idx, std::string_view text,
                                  std::string* error) {
  const FieldSpec& spec = feature_schema().at(feature_idx);
  const auto fail = [&](const std::string& why) -> std::optional<double> {
    if (error) *error = std::string(spec.name) + ": " + why;
    return std::nullopt;
  };
  if (error) error->clear();
  if (text.empty()) return std::nullopt;
  switch (spec.kind) {
    case FieldKind::enumeration:
      for (std::size_t c = 0; c < spec.codes.size(); ++c) {
        if (spec.codes[c] == text) return static_cast<double>(c);
      }
      return fail("unknown code '" + std::string(text) + "'");
    case FieldKind::boolean:
      if (text == "true" || text == "1") return 1.0;
      if (text == "false" || text == "0") return 0.0;
      return fail("expected true/false, got '" + std::string(text) + "'");
    case FieldKind::numeric: {
      double v = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        return fail("not a number: '" + std::string(text) + "'");
      }
      if (feature_idx == feature::battery_level && (v < 0.0 || v > 100.0)) {
        return fail("battery level outside [0, 100]");
      }
      return v;
    }
  }
  return fail("unsupported field kind");
}

std::string encode_cell(std::size_t feature_idx, std::optional<double> value) {
  if (!value) return {};
  const FieldSpec& spec = feature_schema().at(feature_idx);
  switch (spec.kind) {
    case FieldKind::enumeration:
      return std::string(spec.codes[static_cast<std::size_t>(*value)]);
    case FieldKind::boolean:
      return *value != 0.0 ? "true" : "false";
    case FieldKind::numeric: {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, *value);
      return std::string(buf, res.ptr);
    }
  }
  return {};
}

}  // namespace greentune::energy
