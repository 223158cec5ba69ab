// Flat result records and their CSV / JSON encodings.
//
// A record is an ordered list of named cells. The config columns come first
// (same keys as the config schema) so that every emitted row can be parsed back
// into the configuration that produced it.

#pragma once

#include "su11/config.hpp"
#include "su11/schemes.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace su11::report {

using Json = nlohmann::ordered_json;

/// Marker written in place of SNR values in dB when there is no signal.
inline constexpr std::string_view kNoSignal = "no-signal";

using Cell = std::variant<std::monostate, double, std::string>;

struct Record {
  std::vector<std::pair<std::string, Cell>> cells;

  void add(std::string key, Cell value) { cells.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, std::optional<double> value) {
    cells.emplace_back(std::move(key), value ? Cell{*value} : Cell{});
  }

  const Cell* find(std::string_view key) const {
    for (const auto& [k, v] : cells) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  std::optional<double> number(std::string_view key) const {
    const Cell* c = find(key);
    if (c == nullptr) return std::nullopt;
    if (const auto* d = std::get_if<double>(c)) return *d;
    return std::nullopt;
  }
};

/// Fixed 12-significant-digit formatting through std::to_chars, so output does
/// not depend on the C locale.
inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  if (ec != std::errc()) throw std::runtime_error("format_number: buffer too small");
  return std::string(buf, ptr);
}

inline std::string format_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return "";
}

inline Cell db_cell(const SnrReport& r) {
  if (!r.has_signal()) return std::string(kNoSignal);
  return r.snr_db;
}

inline Cell db_cell(std::optional<double> db) {
  if (!db) return std::string(kNoSignal);
  return *db;
}

inline void add_config(Record& rec, const SchemeConfig& cfg) {
  rec.add("schema_version", Cell{static_cast<double>(kConfigSchemaVersion)});
  rec.add("scheme", Cell{std::string(to_string(cfg.kind))});
  rec.add("label", Cell{cfg.label});
  for (const auto& f : config::numeric_fields()) rec.add(std::string(f.key), Cell{config::get_numeric(cfg, f.key)});
  rec.add("calibrate_classical_snr_db", cfg.calibrate_classical_snr_db);
}

inline void add_port(Record& rec, const std::string& prefix, const std::optional<SnrReport>& r,
                     const SchemeResult& result) {
  if (!r) {
    for (const char* suffix : {"_snr", "_snr_db", "_improvement_db", "_system_improvement_db"}) {
      rec.add(prefix + suffix, Cell{});
    }
    return;
  }
  rec.add(prefix + "_snr", Cell{r->snr_linear});
  rec.add(prefix + "_snr_db", db_cell(*r));
  rec.add(prefix + "_improvement_db", db_cell(r->improvement_db));
  rec.add(prefix + "_system_improvement_db", db_cell(result.system_improvement_db(*r)));
}

/// One row per scheme run. `improvement_db` is the best readout (optimized
/// joint current for two-port schemes) against the lossless classical
/// benchmark; `system_improvement_db` is the same readout against classical
/// homodyne through the apparatus losses.
inline Record run_record(const SchemeResult& result) {
  Record rec;
  add_config(rec, result.config);
  rec.add("benchmark_snr", Cell{result.benchmark_snr});
  rec.add("system_benchmark_snr", Cell{result.system_benchmark_snr});
  add_port(rec, "hd1", result.hd1, result);
  add_port(rec, "hd2", result.hd2, result);
  rec.add("jm_k", result.jm ? Cell{result.config.mixer_gain} : Cell{});
  add_port(rec, "jm", result.jm, result);
  rec.add("jm_optimal_k", result.optimal_k);
  add_port(rec, "jm_optimal", result.jm_optimal, result);
  const SnrReport& best = result.headline();
  rec.add("improvement_db", db_cell(best.improvement_db));
  rec.add("system_improvement_db", db_cell(result.system_improvement_db(best)));
  rec.add("closed_form_improvement", closed_form_improvement(result.config));
  rec.add("no_signal", Cell{best.has_signal() ? 0.0 : 1.0});
  return rec;
}

inline Record tap_record(const SchemeConfig& cfg, const TransferReport& t) {
  Record rec;
  add_config(rec, normalized(cfg));
  rec.add("snr_in", Cell{t.snr_in});
  rec.add("snr_in_db", Cell{to_db(t.snr_in)});
  rec.add("snr_in_truncated", Cell{t.snr_in_truncated});
  rec.add("snr_s", Cell{t.snr_s});
  rec.add("snr_s_db", t.snr_s > 0 ? Cell{to_db(t.snr_s)} : Cell{std::string(kNoSignal)});
  rec.add("snr_i", Cell{t.snr_i});
  rec.add("snr_i_db", t.snr_i > 0 ? Cell{to_db(t.snr_i)} : Cell{std::string(kNoSignal)});
  rec.add("t_s", Cell{t.t_s});
  rec.add("t_i", Cell{t.t_i});
  rec.add("t_sum", Cell{t.sum()});
  rec.add("tapping", Cell{t.sum() > 1.0 ? 1.0 : 0.0});
  return rec;
}

namespace detail {

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::vector<std::string>> csv_split(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// Header row plus one line per record. All records must share the same keys.
inline std::string to_csv(const std::vector<Record>& records) {
  if (records.empty()) return "";
  std::string out;
  const auto& first = records.front().cells;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_escape(first[i].first);
  }
  out += '\n';
  for (const auto& rec : records) {
    if (rec.cells.size() != first.size()) throw std::invalid_argument("to_csv: records have different columns");
    for (std::size_t i = 0; i < rec.cells.size(); ++i) {
      if (rec.cells[i].first != first[i].first) throw std::invalid_argument("to_csv: records have different columns");
      if (i) out += ',';
      out += detail::csv_escape(format_cell(rec.cells[i].second));
    }
    out += '\n';
  }
  return out;
}

inline Json cell_to_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return format_number(*d);
    return *d;
  }
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return nullptr;
}

inline Json to_json(const Record& rec) {
  Json j = Json::object();
  for (const auto& [k, v] : rec.cells) j[k] = cell_to_json(v);
  return j;
}

inline std::string to_json_text(const std::string& command, const std::vector<Record>& records) {
  Json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["command"] = command;
  Json rows = Json::array();
  for (const auto& r : records) rows.push_back(to_json(r));
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

/// A parsed output row: the configuration that produced it and every other
/// column.
struct ParsedRow {
  SchemeConfig config;
  std::map<std::string, Cell, std::less<>> values;
};

inline bool is_config_column(std::string_view key) {
  return key == "scheme" || key == "label" || config::is_numeric_field(key);
}

inline Cell parse_cell(const std::string& text) {
  if (text.empty()) return Cell{};
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && ptr == text.data() + text.size()) return value;
  return text;
}

inline ParsedRow parse_row(const std::vector<std::pair<std::string, Cell>>& cells) {
  ParsedRow row;
  config::Json cfg_json = config::Json::object();
  for (const auto& [key, cell] : cells) {
    if (key == "schema_version") {
      const auto* v = std::get_if<double>(&cell);
      if (v == nullptr || *v != kConfigSchemaVersion) throw ConfigError("schema_version", "unsupported result schema");
      continue;
    }
    if (is_config_column(key)) {
      if (const auto* d = std::get_if<double>(&cell)) {
        cfg_json[key] = *d;
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        cfg_json[key] = *s;
      } else if (key == "label") {
        cfg_json[key] = "";
      }
      continue;
    }
    row.values.emplace(key, cell);
  }
  row.config = config::from_json(cfg_json);
  return row;
}

inline std::vector<ParsedRow> parse_csv(std::string_view text) {
  const auto rows = detail::csv_split(text);
  if (rows.empty()) return {};
  const auto& header = rows.front();
  std::vector<ParsedRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) throw ConfigError("csv", "row " + std::to_string(r) + " has wrong width");
    std::vector<std::pair<std::string, Cell>> cells;
    for (std::size_t i = 0; i < header.size(); ++i) {
      // Labels are free text and must not be reinterpreted as numbers.
      cells.emplace_back(header[i], header[i] == "label" ? Cell{rows[r][i]} : parse_cell(rows[r][i]));
    }
    out.push_back(parse_row(cells));
  }
  return out;
}

inline std::vector<ParsedRow> parse_json(std::string_view text) {
  const Json doc = config::parse_json_text(std::string(text), "result");
  if (!doc.contains("schema_version") || doc["schema_version"] != kConfigSchemaVersion || !doc.contains("rows")) {
    throw ConfigError("schema_version", "unsupported result document");
  }
  std::vector<ParsedRow> out;
  for (const auto& row : doc["rows"]) {
    std::vector<std::pair<std::string, Cell>> cells;
    for (const auto& [key, value] : row.items()) {
      if (value.is_number()) {
        cells.emplace_back(key, Cell{value.get<double>()});
      } else if (value.is_string()) {
        cells.emplace_back(key, Cell{value.get<std::string>()});
      } else {
        cells.emplace_back(key, Cell{});
      }
    }
    out.push_back(parse_row(cells));
  }
  return out;
}

}  // namespace su11::report
