// Command implementations behind the su11 executable. Each command turns a
// resolved configuration into the text of its result file, so the same code
// path is exercised by the binary and by the tests.

#pragma once

#include "su11/config.hpp"
#include "su11/mc_oracle.hpp"
#include "su11/report.hpp"
#include "su11/schemes.hpp"
#include "su11/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace su11::cli {

enum class Format { csv, json };

inline Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError("format", "expected csv or json, got '" + std::string(name) + "'");
}

inline std::string render(const std::string& command, const std::vector<report::Record>& rows, Format format) {
  return format == Format::csv ? report::to_csv(rows) : report::to_json_text(command, rows);
}

/// Where the configuration comes from; later sources win.
struct ConfigSources {
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
};

inline SchemeConfig resolve_config(const ConfigSources& src, const config::PresetCatalogue* presets) {
  SchemeConfig cfg;
  if (src.preset) {
    if (presets == nullptr) throw ConfigError("preset", "no preset catalogue available");
    cfg = presets->get(*src.preset).config;
  }
  if (src.config_path) cfg = config::load_config_file(*src.config_path, cfg);
  for (const auto& o : src.overrides) config::apply_override(cfg, o);
  return cfg;
}

/// Modulation depths that leave the small-signal regime loosely (still legal).
inline std::vector<std::string> depth_warnings(const SchemeConfig& cfg) {
  std::vector<std::string> out;
  const SchemeConfig n = normalized(cfg);
  if (modulation_needs_warning({ModulationKind::phase, n.delta, {0}})) {
    out.push_back("delta_rad = " + report::format_number(n.delta) + " exceeds 0.01; linear response is approximate");
  }
  if (modulation_needs_warning({ModulationKind::amplitude, n.epsilon, {0}})) {
    out.push_back("epsilon = " + report::format_number(n.epsilon) + " exceeds 0.01; linear response is approximate");
  }
  return out;
}

inline std::string cmd_run(const SchemeConfig& cfg, Format format) {
  return render("run", {report::run_record(run_scheme(cfg))}, format);
}

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

/// Inclusive range from..to in steps of `step`; the end point is kept when it
/// lands within a millionth of a step of the grid.
inline std::vector<double> sweep_range(double from, double to, double step) {
  if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(step)) {
    throw ConfigError("sweep", "range must be finite");
  }
  if (!(step > 0.0)) throw ConfigError("sweep", "step must be positive");
  if (to < from) throw ConfigError("sweep", "empty range");
  const double count = std::floor((to - from) / step + 1e-6);
  if (count > 1e6) throw ConfigError("sweep", "too many sweep points");
  std::vector<double> out;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(count); ++i) out.push_back(from + static_cast<double>(i) * step);
  return out;
}

/// Sweep-only axis setting both detection losses at once.
inline constexpr std::string_view kBothDetectorsAxis = "eta_det";

inline std::vector<report::Record> sweep_records(const SchemeConfig& base, const SweepAxis& axis) {
  if (axis.values.empty()) throw ConfigError("sweep", "empty range");
  const bool both = axis.key == kBothDetectorsAxis;
  if (!both && !config::is_numeric_field(axis.key)) {
    throw ConfigError(axis.key, "sweep axis must be a numeric config key");
  }
  std::vector<SchemeConfig> points;
  for (double v : axis.values) {
    if (!std::isfinite(v)) throw ConfigError("sweep", "sweep values must be finite");
    SchemeConfig c = base;
    if (both) {
      c.eta_det_s = v;
      c.eta_det_i = v;
    } else {
      config::set_numeric(c, axis.key, v);
    }
    validate(c);
    points.push_back(std::move(c));
  }
  // Waves of at most one job per core; rows land in point order.
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<report::Record> rows;
  rows.reserve(points.size());
  for (std::size_t start = 0; start < points.size(); start += width) {
    std::vector<std::future<report::Record>> jobs;
    for (std::size_t i = start; i < std::min(points.size(), start + width); ++i) {
      jobs.push_back(std::async(std::launch::async, [&c = points[i]] { return report::run_record(run_scheme(c)); }));
    }
    for (auto& j : jobs) rows.push_back(j.get());
  }
  return rows;
}

inline std::string cmd_sweep(const SchemeConfig& base, const SweepAxis& axis, Format format) {
  return render("sweep", sweep_records(base, axis), format);
}

inline std::string cmd_tap(const SchemeConfig& cfg, Format format) {
  return render("tap", {report::tap_record(cfg, transfer_coefficients(cfg))}, format);
}

inline std::string cmd_spectrum(const SchemeConfig& cfg, const SpectrumOptions& opt, Format format) {
  return render("spectrum", spectrum_records(synthesize_spectrum(cfg, opt)), format);
}

inline std::string cmd_presets_list(const config::PresetCatalogue& presets, Format format) {
  std::vector<report::Record> rows;
  for (const auto& p : presets.presets()) {
    report::Record r;
    r.add("name", report::Cell{p.name});
    r.add("scheme", report::Cell{std::string(to_string(p.config.kind))});
    r.add("description", report::Cell{p.description});
    rows.push_back(std::move(r));
  }
  return render("presets", rows, format);
}

struct OracleCheckOptions {
  std::size_t pipelines = 50;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = oracle::kDefaultSeed;
  double z_limit = 5.0;
};

struct OracleCheckResult {
  std::vector<report::Record> rows;
  bool all_passed = true;
};

inline OracleCheckResult oracle_check(const OracleCheckOptions& opt) {
  OracleCheckResult out;
  std::mt19937_64 rng(opt.seed);
  for (std::size_t i = 0; i < opt.pipelines; ++i) {
    const auto pipeline = oracle::random_pipeline(rng);
    const auto agreement = oracle::compare(pipeline, opt.samples, oracle::detail::splitmix64(opt.seed + i));
    const bool ok = agreement.max_z <= opt.z_limit;
    out.all_passed = out.all_passed && ok;
    report::Record r;
    r.add("pipeline", report::Cell{static_cast<double>(i)});
    r.add("modes", report::Cell{static_cast<double>(pipeline.input.n_modes())});
    r.add("steps", report::Cell{static_cast<double>(pipeline.steps.size())});
    r.add("readouts", report::Cell{static_cast<double>(pipeline.selections.size())});
    r.add("max_z", report::Cell{agreement.max_z});
    r.add("pass", report::Cell{ok ? 1.0 : 0.0});
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline void write_output(const std::string& text, const std::optional<std::string>& path, std::ostream& fallback) {
  if (!path) {
    fallback << text;
    fallback.flush();
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + *path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + *path + "' failed");
}

}  // namespace su11::cli
