// Flat key-value configuration schema and the preset catalogue.
//
// Keys carry their units where they have one. Unknown keys are rejected.
//
//   scheme                       classical_hd | single_beam_sui | dual_beam_sui |
//                                truncated_dual | squeezed_benchmark
//   label                        free text (e.g. the optical power of a preset)
//   g1_power_gain                OPA1 power gain G1^2 (>= 1)
//   g2_power_gain                OPA2 power gain G2^2 (>= 1)
//   pump_phase_2_rad             OPA2 pump phase relative to OPA1
//   photon_number                photon number of the phase-sensing field(s)
//   delta_rad                    phase modulation depth
//   epsilon                      amplitude modulation depth
//   eta_transmission             loss between OPA1 and OPA2, per beam
//   eta_det_s, eta_det_i         detection losses at HD1 / HD2
//   eta_mismatch                 coupling loss at the OPA2 input (SUI only)
//   mixer_gain                   electronic gain k_i of the joint readout
//   calibrate_classical_snr_db   derive delta from a classical SNR target
//   modulation_frequency_hz      tone frequency for synthesized spectra

#pragma once

#include "su11/schemes.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace su11 {

inline constexpr int kConfigSchemaVersion = 1;

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace config {

using Json = nlohmann::ordered_json;

struct NumericField {
  std::string_view key;
  std::function<double&(SchemeConfig&)> ref;
};

inline const std::vector<NumericField>& numeric_fields() {
  static const std::vector<NumericField> fields = {
      {"g1_power_gain", [](SchemeConfig& c) -> double& { return c.g1_power_gain; }},
      {"g2_power_gain", [](SchemeConfig& c) -> double& { return c.g2_power_gain; }},
      {"pump_phase_2_rad", [](SchemeConfig& c) -> double& { return c.pump_phase_2; }},
      {"photon_number", [](SchemeConfig& c) -> double& { return c.photon_number; }},
      {"delta_rad", [](SchemeConfig& c) -> double& { return c.delta; }},
      {"epsilon", [](SchemeConfig& c) -> double& { return c.epsilon; }},
      {"eta_transmission", [](SchemeConfig& c) -> double& { return c.eta_transmission; }},
      {"eta_det_s", [](SchemeConfig& c) -> double& { return c.eta_det_s; }},
      {"eta_det_i", [](SchemeConfig& c) -> double& { return c.eta_det_i; }},
      {"eta_mismatch", [](SchemeConfig& c) -> double& { return c.eta_mismatch; }},
      {"mixer_gain", [](SchemeConfig& c) -> double& { return c.mixer_gain; }},
      {"modulation_frequency_hz", [](SchemeConfig& c) -> double& { return c.modulation_frequency_hz; }},
  };
  return fields;
}

inline bool is_numeric_field(std::string_view key) {
  for (const auto& f : numeric_fields()) {
    if (f.key == key) return true;
  }
  return key == "calibrate_classical_snr_db";
}

/// Locale-independent number parsing; the whole string must be consumed.
inline double parse_number(std::string_view text, std::string_view field) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError(std::string(field), "not a number: '" + std::string(text) + "'");
  }
  return value;
}

inline void set_numeric(SchemeConfig& cfg, std::string_view key, double value) {
  if (key == "calibrate_classical_snr_db") {
    cfg.calibrate_classical_snr_db = value;
    return;
  }
  for (const auto& f : numeric_fields()) {
    if (f.key == key) {
      f.ref(cfg) = value;
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown numeric config key");
}

inline double get_numeric(const SchemeConfig& cfg, std::string_view key) {
  if (key == "calibrate_classical_snr_db") {
    if (!cfg.calibrate_classical_snr_db) throw ConfigError(std::string(key), "not set");
    return *cfg.calibrate_classical_snr_db;
  }
  SchemeConfig copy = cfg;
  for (const auto& f : numeric_fields()) {
    if (f.key == key) return f.ref(copy);
  }
  throw ConfigError(std::string(key), "unknown numeric config key");
}

/// Sets one key from its textual value (as given to --set key=value).
inline void set_field(SchemeConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "scheme") {
    cfg.kind = parse_scheme_kind(value);
  } else if (key == "label") {
    cfg.label = std::string(value);
  } else if (is_numeric_field(key)) {
    set_numeric(cfg, key, parse_number(value, key));
  } else {
    throw ConfigError(std::string(key), "unknown config key");
  }
}

inline void apply_override(SchemeConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must have the form key=value");
  }
  set_field(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

/// Applies every key of a flat JSON object on top of `base`.
inline SchemeConfig from_json(const Json& object, SchemeConfig base = {}) {
  if (!object.is_object()) throw ConfigError("config", "expected a flat JSON object");
  for (const auto& [key, value] : object.items()) {
    if (key == "scheme" || key == "label") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      set_field(base, key, value.get<std::string>());
    } else if (is_numeric_field(key)) {
      if (value.is_null() && key == "calibrate_classical_snr_db") {
        base.calibrate_classical_snr_db.reset();
        continue;
      }
      if (!value.is_number()) throw ConfigError(key, "expected a number");
      set_numeric(base, key, value.get<double>());
    } else {
      throw ConfigError(key, "unknown config key");
    }
  }
  return base;
}

inline Json to_json(const SchemeConfig& cfg) {
  Json j;
  j["scheme"] = std::string(to_string(cfg.kind));
  j["label"] = cfg.label;
  for (const auto& f : numeric_fields()) j[std::string(f.key)] = get_numeric(cfg, f.key);
  if (cfg.calibrate_classical_snr_db) {
    j["calibrate_classical_snr_db"] = *cfg.calibrate_classical_snr_db;
  } else {
    j["calibrate_classical_snr_db"] = nullptr;
  }
  return j;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(origin, std::string("invalid JSON: ") + e.what());
  }
}

inline SchemeConfig load_config_file(const std::string& path, SchemeConfig base = {}) {
  return from_json(parse_json_text(read_file(path), path), std::move(base));
}

struct Preset {
  std::string name;
  std::string description;
  SchemeConfig config;
};

/// Versioned preset catalogue:
///   {"schema_version": 1, "presets": {"<name>": {"description": "...", "config": {...}}}}
class PresetCatalogue {
 public:
  static PresetCatalogue parse(const Json& doc, const std::string& origin = "presets") {
    if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("presets")) {
      throw ConfigError(origin, "preset catalogue needs 'schema_version' and 'presets'");
    }
    if (doc["schema_version"] != kConfigSchemaVersion) {
      throw ConfigError(origin, "unsupported preset schema_version");
    }
    PresetCatalogue cat;
    for (const auto& [name, entry] : doc["presets"].items()) {
      if (!entry.is_object() || !entry.contains("config")) {
        throw ConfigError(name, "preset entry needs a 'config' object");
      }
      for (const auto& [key, _] : entry.items()) {
        if (key != "config" && key != "description") throw ConfigError(name + "." + key, "unknown preset key");
      }
      Preset p;
      p.name = name;
      p.description = entry.value("description", "");
      p.config = from_json(entry["config"]);
      cat.presets_.push_back(std::move(p));
    }
    return cat;
  }

  static PresetCatalogue load(const std::string& path) {
    return parse(parse_json_text(read_file(path), path), path);
  }

  const std::vector<Preset>& presets() const { return presets_; }

  const Preset& get(std::string_view name) const {
    for (const auto& p : presets_) {
      if (p.name == name) return p;
    }
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  }

 private:
  std::vector<Preset> presets_;
};

}  // namespace config
}  // namespace su11
