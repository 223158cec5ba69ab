// Synthetic analyzer traces built from model moments.
//
// Every trace is flat at the readout noise (in dB relative to the HD1 shot
// noise, i.e. one vacuum unit) except for the bin holding the modulation tone,
// which sits at floor + 10 log10(1 + SNR).

#pragma once

#include "su11/report.hpp"
#include "su11/schemes.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace su11 {

struct SpectrumOptions {
  double center_hz = 1.56e6;
  double span_hz = 0.2e6;
  double rbw_hz = 1e3;
  /// Detector whose shot noise defines 0 dB.
  std::size_t normalize_port = 0;
};

inline constexpr std::size_t kMaxSpectrumBins = 1'000'000;

struct SpectrumTrace {
  std::string name;
  double floor_db = 0.0;
  double peak_db = 0.0;
};

struct Spectrum {
  std::vector<double> frequencies_hz;
  std::size_t tone_bin = 0;
  std::vector<SpectrumTrace> traces;

  double value(std::size_t trace, std::size_t bin) const {
    return bin == tone_bin ? traces[trace].peak_db : traces[trace].floor_db;
  }
};

inline void validate(const SpectrumOptions& opt, double tone_hz) {
  if (!(opt.rbw_hz > 0.0) || !std::isfinite(opt.rbw_hz)) throw ConfigError("rbw_hz", "must be positive");
  if (!(opt.span_hz > 0.0) || !std::isfinite(opt.span_hz)) throw ConfigError("span_hz", "must be positive");
  if (!std::isfinite(opt.center_hz)) throw ConfigError("center_hz", "must be finite");
  const double lo = opt.center_hz - 0.5 * opt.span_hz;
  const double hi = opt.center_hz + 0.5 * opt.span_hz;
  if (tone_hz < lo || tone_hz > hi) {
    throw ConfigError("modulation_frequency_hz", "tone lies outside the analyzer span");
  }
  if (opt.span_hz / opt.rbw_hz >= static_cast<double>(kMaxSpectrumBins)) {
    throw ConfigError("rbw_hz", "too many bins for the requested span");
  }
}

inline SpectrumTrace make_trace(std::string name, double noise_power, const SnrReport& r) {
  SpectrumTrace t;
  t.name = std::move(name);
  t.floor_db = to_db(noise_power);
  t.peak_db = t.floor_db + 10.0 * std::log10(1.0 + (r.has_signal() ? r.snr_linear : 0.0));
  return t;
}

inline Spectrum synthesize_spectrum(const SchemeConfig& raw, const SpectrumOptions& opt) {
  const SchemeResult result = run_scheme(raw);
  const SchemeConfig& cfg = result.config;
  validate(opt, cfg.modulation_frequency_hz);
  const std::size_t ports = has_two_ports(cfg.kind) ? 2 : 1;
  if (opt.normalize_port >= ports) throw ConfigError("normalize_port", "no such detector");

  Spectrum s;
  const double lo = opt.center_hz - 0.5 * opt.span_hz;
  const auto bins = static_cast<std::size_t>(std::floor(opt.span_hz / opt.rbw_hz)) + 1;
  s.frequencies_hz.reserve(bins);
  for (std::size_t i = 0; i < bins; ++i) s.frequencies_hz.push_back(lo + static_cast<double>(i) * opt.rbw_hz);
  s.tone_bin = static_cast<std::size_t>(std::lround((cfg.modulation_frequency_hz - lo) / opt.rbw_hz));
  if (s.tone_bin >= bins) s.tone_bin = bins - 1;

  // Homodyne shot noise is one vacuum unit at every detector.
  constexpr double shot_noise = 1.0;
  s.traces.push_back(make_trace("hd1_db", result.hd1.noise_power / shot_noise, result.hd1));
  if (ports == 2) {
    s.traces.push_back(make_trace("hd2_db", result.hd2->noise_power / shot_noise, *result.hd2));
    s.traces.push_back(make_trace("jm_db", result.jm->noise_power / shot_noise, *result.jm));
    const double k = cfg.mixer_gain;
    const double snl = to_db(1.0 + k * k);
    s.traces.push_back({"snl_si_db", snl, snl});
  }
  return s;
}

inline std::vector<report::Record> spectrum_records(const Spectrum& s) {
  std::vector<report::Record> rows;
  rows.reserve(s.frequencies_hz.size());
  for (std::size_t i = 0; i < s.frequencies_hz.size(); ++i) {
    report::Record r;
    r.add("frequency_hz", report::Cell{s.frequencies_hz[i]});
    for (std::size_t t = 0; t < s.traces.size(); ++t) r.add(s.traces[t].name, report::Cell{s.value(t, i)});
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace su11
