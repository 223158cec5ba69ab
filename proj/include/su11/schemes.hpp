// End-to-end measurement schemes: classical homodyne, single- and dual-beam
// SU(1,1) interferometers, the truncated (current-mixer) dual-beam scheme and
// the squeezed-probe benchmark.
//
// Every scheme is expressed as a ScenarioPipeline (input state, optical steps,
// homodyne selections). The SNR is taken from two passes through the same
// pipeline: an unmodulated baseline for the noise and a modulated run for the
// signal.
//
// Mode 0 is the signal beam (read by HD1), mode 1 the idler beam (HD2).

#pragma once

#include "su11/components.hpp"
#include "su11/detection.hpp"
#include "su11/formulas.hpp"
#include "su11/gaussian_state.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace su11 {

/// Invalid scheme configuration; names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class SchemeKind { classical_hd, single_beam_sui, dual_beam_sui, truncated_dual, squeezed_benchmark };

inline constexpr std::array<SchemeKind, 5> kAllSchemes = {SchemeKind::classical_hd, SchemeKind::single_beam_sui,
                                                          SchemeKind::dual_beam_sui, SchemeKind::truncated_dual,
                                                          SchemeKind::squeezed_benchmark};

inline std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::classical_hd: return "classical_hd";
    case SchemeKind::single_beam_sui: return "single_beam_sui";
    case SchemeKind::dual_beam_sui: return "dual_beam_sui";
    case SchemeKind::truncated_dual: return "truncated_dual";
    case SchemeKind::squeezed_benchmark: return "squeezed_benchmark";
  }
  return "?";
}

inline SchemeKind parse_scheme_kind(std::string_view name) {
  for (auto kind : kAllSchemes) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "'");
}

inline bool has_two_ports(SchemeKind kind) {
  return kind == SchemeKind::single_beam_sui || kind == SchemeKind::dual_beam_sui ||
         kind == SchemeKind::truncated_dual;
}

inline bool uses_second_amplifier(SchemeKind kind) {
  return kind == SchemeKind::single_beam_sui || kind == SchemeKind::dual_beam_sui;
}

struct SchemeConfig {
  SchemeKind kind = SchemeKind::dual_beam_sui;
  double g1_power_gain = 1.0;
  double g2_power_gain = 1.0;
  /// OPA2 pump phase relative to OPA1; pi is the dark fringe of the Y readout.
  double pump_phase_2 = std::numbers::pi;
  /// Photon number of the phase-sensing field(s). For the dual-beam schemes this
  /// is (G1^2 + g1^2) |alpha|^2, for the single-beam SUI the signal beam alone.
  double photon_number = 1e6;
  double delta = 1e-3;
  double epsilon = 0.0;
  double eta_transmission = 0.0;
  double eta_det_s = 0.0;
  double eta_det_i = 0.0;
  /// Extra coupling loss at the OPA2 input; only used by the SUI schemes.
  double eta_mismatch = 0.0;
  /// Electronic gain k_i of the joint readout i_s + k_i i_i.
  double mixer_gain = 1.0;
  /// If set, delta is derived so that the lossless classical SNR hits this value.
  std::optional<double> calibrate_classical_snr_db;
  double modulation_frequency_hz = 1.56e6;
  std::string label;

  bool operator==(const SchemeConfig&) const = default;
};

namespace detail {

inline void require_fraction(double value, const char* field) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ConfigError(field, "must lie in [0, 1], got " + std::to_string(value));
  }
}

inline void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) throw ConfigError(field, "must be finite");
}

}  // namespace detail

inline void validate(const SchemeConfig& cfg) {
  detail::require_finite(cfg.g1_power_gain, "g1_power_gain");
  detail::require_finite(cfg.g2_power_gain, "g2_power_gain");
  if (!(cfg.g1_power_gain >= 1.0)) throw ConfigError("g1_power_gain", "power gain must be >= 1");
  if (!(cfg.g2_power_gain >= 1.0)) throw ConfigError("g2_power_gain", "power gain must be >= 1");
  detail::require_finite(cfg.pump_phase_2, "pump_phase_2_rad");
  detail::require_finite(cfg.photon_number, "photon_number");
  if (!(cfg.photon_number > 0.0)) throw ConfigError("photon_number", "must be positive");
  detail::require_finite(cfg.delta, "delta_rad");
  detail::require_finite(cfg.epsilon, "epsilon");
  if (!(std::abs(cfg.delta) <= kModulationHardLimit)) {
    throw ConfigError("delta_rad", "phase depth exceeds the small-signal limit 0.1");
  }
  if (!(std::abs(cfg.epsilon) <= kModulationHardLimit)) {
    throw ConfigError("epsilon", "amplitude depth exceeds the small-signal limit 0.1");
  }
  detail::require_fraction(cfg.eta_transmission, "eta_transmission");
  detail::require_fraction(cfg.eta_det_s, "eta_det_s");
  detail::require_fraction(cfg.eta_det_i, "eta_det_i");
  detail::require_fraction(cfg.eta_mismatch, "eta_mismatch");
  detail::require_finite(cfg.mixer_gain, "mixer_gain");
  if (cfg.calibrate_classical_snr_db && !std::isfinite(*cfg.calibrate_classical_snr_db)) {
    throw ConfigError("calibrate_classical_snr_db", "target must be finite");
  }
  if (!(cfg.modulation_frequency_hz > 0.0) || !std::isfinite(cfg.modulation_frequency_hz)) {
    throw ConfigError("modulation_frequency_hz", "must be positive and finite");
  }
}

/// Phase depth that makes the lossless classical homodyne SNR equal `target_db`.
inline double calibrate_modulation(double target_db, double photon_number) {
  if (!std::isfinite(target_db)) throw std::invalid_argument("calibrate_modulation: target must be finite");
  if (!(photon_number > 0.0)) throw std::invalid_argument("calibrate_modulation: photon number must be positive");
  return std::sqrt(from_db(target_db) / (4.0 * photon_number));
}

/// Validates and resolves derived fields: calibrated delta, unit gains for the
/// classical scheme.
inline SchemeConfig normalized(SchemeConfig cfg) {
  validate(cfg);
  if (cfg.kind == SchemeKind::classical_hd) {
    cfg.g1_power_gain = 1.0;
    cfg.g2_power_gain = 1.0;
  }
  if (cfg.calibrate_classical_snr_db) {
    cfg.delta = calibrate_modulation(*cfg.calibrate_classical_snr_db, cfg.photon_number);
    if (!(std::abs(cfg.delta) <= kModulationHardLimit)) {
      throw ConfigError("calibrate_classical_snr_db", "calibrated delta exceeds the small-signal limit");
    }
  }
  return cfg;
}

struct ScenarioPipeline {
  GaussianState input;
  std::vector<Step> steps;
  std::vector<HomodyneSelection> selections;
};

/// What the modulator does in one pass of a pipeline.
struct ModulationSetting {
  ModulationKind kind = ModulationKind::phase;
  double depth = 0.0;
};

/// Builds the optical pipeline of a scheme. `readout_angle` is the homodyne
/// angle applied at every detector.
inline ScenarioPipeline build_pipeline(const SchemeConfig& cfg, ModulationSetting modulation,
                                       double readout_angle = kQuadratureY) {
  const double photons = cfg.photon_number;
  ScenarioPipeline p;
  auto add_modulation = [&](std::vector<std::size_t> modes) {
    if (modulation.depth != 0.0) p.steps.emplace_back(ModulationSignal{modulation.kind, modulation.depth, std::move(modes)});
  };
  auto add_loss = [&](std::size_t mode, double eta) {
    if (eta > 0.0) p.steps.emplace_back(LossStep{mode, eta});
  };

  switch (cfg.kind) {
    case SchemeKind::classical_hd: {
      p.input = displace(vacuum(1), 0, 2.0 * std::sqrt(photons), 0.0);
      add_modulation({0});
      add_loss(0, cfg.eta_transmission);
      p.selections = {{0, readout_angle, 1.0 - cfg.eta_det_s}};
      break;
    }
    case SchemeKind::squeezed_benchmark: {
      p.input = vacuum(1);
      p.steps.emplace_back(degenerate_squeezer(OpaParams::from_power_gain(cfg.g1_power_gain), 0));
      SymplecticOp seed = identity_op({0});
      seed.displacement(0) = 2.0 * std::sqrt(photons);
      p.steps.emplace_back(std::move(seed));
      add_modulation({0});
      add_loss(0, cfg.eta_transmission);
      p.selections = {{0, readout_angle, 1.0 - cfg.eta_det_s}};
      break;
    }
    case SchemeKind::single_beam_sui:
    case SchemeKind::dual_beam_sui:
    case SchemeKind::truncated_dual: {
      const auto opa1 = OpaParams::from_power_gain(cfg.g1_power_gain);
      const bool single = cfg.kind == SchemeKind::single_beam_sui;
      // Bright-beam photon number of the probing field(s) right after OPA1.
      const double probe_gain =
          single ? opa1.power_gain() : opa1.power_gain() + opa1.coupling_gain() * opa1.coupling_gain();
      const double alpha = std::sqrt(photons / probe_gain);
      p.input = displace(vacuum(2), 0, 2.0 * alpha, 0.0);
      p.steps.emplace_back(two_mode_squeezer(opa1, 0, 1));
      add_modulation(single ? std::vector<std::size_t>{0} : std::vector<std::size_t>{0, 1});
      add_loss(0, cfg.eta_transmission);
      add_loss(1, cfg.eta_transmission);
      if (uses_second_amplifier(cfg.kind)) {
        add_loss(0, cfg.eta_mismatch);
        add_loss(1, cfg.eta_mismatch);
        p.steps.emplace_back(
            two_mode_squeezer(OpaParams::from_power_gain(cfg.g2_power_gain, cfg.pump_phase_2), 0, 1));
      }
      p.selections = {{0, readout_angle, 1.0 - cfg.eta_det_s}, {1, readout_angle, 1.0 - cfg.eta_det_i}};
      break;
    }
  }
  return p;
}

inline ReadoutMoments evaluate_pipeline(const ScenarioPipeline& p) {
  const GaussianState out = propagate(p.input, p.steps);
  check_physical(out);
  return read_moments(out, p.selections);
}

struct TwoPassReadout {
  ReadoutMoments baseline;
  Vector signals;
};

inline TwoPassReadout two_pass(const SchemeConfig& cfg, ModulationSetting modulation, double angle) {
  const auto baseline = evaluate_pipeline(build_pipeline(cfg, {modulation.kind, 0.0}, angle));
  const auto modulated = evaluate_pipeline(build_pipeline(cfg, modulation, angle));
  return {baseline, signal_extract(modulated, baseline)};
}

/// Classical homodyne SNR for photon number I and depth delta with a total loss
/// `eta` in front of an ideal detector (simulated, not closed form).
inline double classical_snr(double photon_number, double delta, double eta = 0.0) {
  SchemeConfig cl;
  cl.kind = SchemeKind::classical_hd;
  cl.photon_number = photon_number;
  cl.delta = delta;
  cl.eta_transmission = eta;
  const auto r = two_pass(cl, {ModulationKind::phase, delta}, kQuadratureY);
  return single_port(r.baseline, r.signals, 0).snr_linear;
}

struct SchemeResult {
  SchemeConfig config;
  /// Lossless classical homodyne SNR with the same photon number and depth.
  double benchmark_snr = 0.0;
  /// Classical homodyne SNR through the transmission and HD1 detection losses,
  /// i.e. what the same apparatus gives with both amplifiers switched off.
  double system_benchmark_snr = 0.0;
  SnrReport hd1;
  std::optional<SnrReport> hd2;
  /// Joint readout i_s + k i_i with the configured k.
  std::optional<SnrReport> jm;
  std::optional<SnrReport> jm_optimal;
  std::optional<double> optimal_k;
  TwoPassReadout readout;

  /// Best available readout: the optimized joint current for two-port schemes.
  const SnrReport& headline() const { return jm_optimal ? *jm_optimal : (jm ? *jm : hd1); }

  std::optional<double> system_improvement_db(const SnrReport& r) const {
    if (!(system_benchmark_snr > 0.0) || !r.has_signal()) return std::nullopt;
    return r.snr_db - to_db(system_benchmark_snr);
  }
};

inline SchemeResult run_scheme(const SchemeConfig& raw) {
  const SchemeConfig cfg = normalized(raw);
  SchemeResult result;
  result.config = cfg;
  result.benchmark_snr = classical_snr(cfg.photon_number, cfg.delta);
  result.system_benchmark_snr =
      classical_snr(cfg.photon_number, cfg.delta, 1.0 - (1.0 - cfg.eta_transmission) * (1.0 - cfg.eta_det_s));
  result.readout = two_pass(cfg, {ModulationKind::phase, cfg.delta}, kQuadratureY);
  const auto& moments = result.readout.baseline;
  const auto& signals = result.readout.signals;
  const double benchmark = result.benchmark_snr;

  result.hd1 = with_benchmark(single_port(moments, signals, 0), benchmark);
  if (has_two_ports(cfg.kind)) {
    result.hd2 = with_benchmark(single_port(moments, signals, 1), benchmark);
    Vector k(2);
    k << 1.0, cfg.mixer_gain;
    result.jm = with_benchmark(mix_currents(moments, signals, k), benchmark);
    if (signals.cwiseAbs().maxCoeff() > 0.0) {
      const double k_opt = optimize_mixer_gain(moments, signals);
      k << 1.0, k_opt;
      result.optimal_k = k_opt;
      result.jm_optimal = with_benchmark(mix_currents(moments, signals, k), benchmark);
    }
  }
  return result;
}

namespace detail {

inline void require_kind(const SchemeConfig& cfg, SchemeKind expected) {
  if (cfg.kind != expected) {
    throw ConfigError("scheme", "expected " + std::string(to_string(expected)) + ", got " +
                                    std::string(to_string(cfg.kind)));
  }
}

}  // namespace detail

inline SchemeResult run_classical_hd(const SchemeConfig& cfg) {
  detail::require_kind(cfg, SchemeKind::classical_hd);
  return run_scheme(cfg);
}

inline SchemeResult run_single_beam_sui(const SchemeConfig& cfg) {
  detail::require_kind(cfg, SchemeKind::single_beam_sui);
  return run_scheme(cfg);
}

inline SchemeResult run_dual_beam_sui(const SchemeConfig& cfg) {
  detail::require_kind(cfg, SchemeKind::dual_beam_sui);
  return run_scheme(cfg);
}

inline SchemeResult run_truncated_dual(const SchemeConfig& cfg) {
  detail::require_kind(cfg, SchemeKind::truncated_dual);
  return run_scheme(cfg);
}

inline SchemeResult run_squeezed_benchmark(const SchemeConfig& cfg) {
  detail::require_kind(cfg, SchemeKind::squeezed_benchmark);
  return run_scheme(cfg);
}

/// Amplitude modulation of depth epsilon on both beams of the dual-beam SUI,
/// read in X at the idler output (HD2). Benchmarked against 4 I eps^2.
inline SnrReport amplitude_channel(const SchemeConfig& raw) {
  detail::require_kind(raw, SchemeKind::dual_beam_sui);
  const SchemeConfig cfg = normalized(raw);
  const auto r = two_pass(cfg, {ModulationKind::amplitude, cfg.epsilon}, kQuadratureX);
  return with_benchmark(single_port(r.baseline, r.signals, 1), classical_snr(cfg.photon_number, cfg.epsilon));
}

inline constexpr double kInfiniteGainProxy = 1e4;

struct ResourceSharing {
  double closed_form_residual = 0.0;
  double simulated_residual = 0.0;
  double snr_phase = 0.0;
  double snr_amplitude = 0.0;
  double snr_squeezed = 0.0;
};

/// Phase SNR at HD1 plus amplitude SNR at HD2 against the squeezed-probe SNR,
/// both from the closed forms and from the simulator with OPA2 at `proxy_g2`.
inline ResourceSharing resource_sharing_check(const SchemeConfig& raw, double proxy_g2 = 1e6) {
  detail::require_kind(raw, SchemeKind::dual_beam_sui);
  if (raw.delta != raw.epsilon) throw ConfigError("epsilon", "resource sharing check needs epsilon == delta");
  SchemeConfig cfg = normalized(raw);
  cfg.g2_power_gain = proxy_g2;
  ResourceSharing out;
  const double target = formulas::squeezed_probe(cfg.photon_number, cfg.delta, cfg.g1_power_gain);
  out.snr_squeezed = target;
  out.closed_form_residual =
      std::abs(formulas::resource_sharing_sum(cfg.photon_number, cfg.delta, cfg.g1_power_gain) - target) / target;
  out.snr_phase = run_scheme(cfg).hd1.snr_linear;
  out.snr_amplitude = amplitude_channel(cfg).snr_linear;
  out.simulated_residual = std::abs(out.snr_phase + out.snr_amplitude - target) / target;
  return out;
}

struct TransferReport {
  /// Input SNR: squeezed-probe SNR for the same OPA1 gain, photon number and
  /// depth, degraded only by the losses in front of the tap.
  double snr_in = 0.0;
  /// Diagnostic: optimally mixed truncated-scheme SNR on the same fields.
  double snr_in_truncated = 0.0;
  double snr_s = 0.0;
  double snr_i = 0.0;
  double t_s = 0.0;
  double t_i = 0.0;

  double sum() const { return t_s + t_i; }
};

/// Transfer coefficients of OPA2 viewed as a tap on the entangled input fields.
inline TransferReport transfer_coefficients(const SchemeConfig& raw) {
  detail::require_kind(raw, SchemeKind::dual_beam_sui);
  const SchemeConfig cfg = normalized(raw);

  SchemeConfig input = cfg;
  input.kind = SchemeKind::squeezed_benchmark;
  input.eta_det_s = 0.0;
  input.eta_det_i = 0.0;
  input.eta_mismatch = 0.0;
  input.calibrate_classical_snr_db.reset();

  TransferReport t;
  t.snr_in = run_scheme(input).hd1.snr_linear;
  if (!(t.snr_in > 0.0)) throw std::invalid_argument("transfer_coefficients: input SNR is zero");

  input.kind = SchemeKind::truncated_dual;
  t.snr_in_truncated = run_scheme(input).headline().snr_linear;

  // per-port readouts only; the joint optimum is ill-conditioned at very high G2
  const auto out = two_pass(cfg, {ModulationKind::phase, cfg.delta}, kQuadratureY);
  t.snr_s = single_port(out.baseline, out.signals, 0).snr_linear;
  t.snr_i = single_port(out.baseline, out.signals, 1).snr_linear;
  t.t_s = t.snr_s / t.snr_in;
  t.t_i = t.snr_i / t.snr_in;
  return t;
}

/// OPA2 pump phase minimizing the unmodulated HD1 Y-quadrature noise.
inline double dark_fringe_phase(const SchemeConfig& raw) {
  SchemeConfig cfg = normalized(raw);
  if (!uses_second_amplifier(cfg.kind)) throw ConfigError("scheme", "dark fringe needs a second amplifier");
  auto noise = [&](double phase) {
    cfg.pump_phase_2 = phase;
    return evaluate_pipeline(build_pipeline(cfg, {})).cov(0, 0);
  };
  constexpr int coarse = 720;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double best_phase = 0.0, best = noise(0.0);
  for (int i = 1; i < coarse; ++i) {
    const double phase = two_pi * i / coarse;
    if (const double v = noise(phase); v < best) {
      best = v;
      best_phase = phase;
    }
  }
  const double step = two_pi / coarse;
  return normalize_angle(
      detail::golden_section_max([&](double phase) { return -noise(phase); }, best_phase - step, best_phase + step));
}

/// Coupling loss at the OPA2 input for which the optimally mixed joint readout
/// improves on the same-apparatus classical benchmark by `target_db`.
inline double fit_mismatch(const SchemeConfig& raw, double target_db, double lo = 0.0, double hi = 0.5) {
  if (!uses_second_amplifier(raw.kind)) throw ConfigError("scheme", "mismatch fit needs an SU(1,1) scheme");
  SchemeConfig cfg = raw;
  auto excess = [&](double eta) {
    cfg.eta_mismatch = eta;
    const auto r = run_scheme(cfg);
    return *r.system_improvement_db(r.headline()) - target_db;
  };
  double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (f_lo * f_hi > 0.0) {
    throw std::invalid_argument("fit_mismatch: target improvement not bracketed by eta_mismatch in [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = excess(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Closed-form improvement over the lossless classical benchmark, where one
/// applies:
///   classical_hd, squeezed_benchmark: HD1, exact with losses;
///   truncated_dual: joint readout with k = 1 and equal detection losses, exact;
///   single/dual SUI: HD1 in the G2 -> infinity limit (dual-beam also with equal
///   detection losses and no loss in front of OPA2).
inline std::optional<double> closed_form_improvement(const SchemeConfig& raw) {
  const SchemeConfig cfg = normalized(raw);
  if (cfg.delta == 0.0) return std::nullopt;
  const double s = formulas::squeezing(cfg.g1_power_gain);
  const double path_s = 1.0 - (1.0 - cfg.eta_transmission) * (1.0 - cfg.eta_det_s);
  switch (cfg.kind) {
    case SchemeKind::classical_hd:
      return 1.0 - path_s;
    case SchemeKind::squeezed_benchmark:
      if (path_s >= 1.0) return std::nullopt;
      return 1.0 / formulas::lossy_squeezing(s, path_s);
    case SchemeKind::truncated_dual:
      if (cfg.eta_det_s != cfg.eta_det_i || cfg.mixer_gain != 1.0 || path_s >= 1.0) return std::nullopt;
      return formulas::transfer_coefficient(cfg.g1_power_gain) / formulas::lossy_squeezing(s, path_s);
    case SchemeKind::single_beam_sui:
      if (cfg.eta_transmission != 0.0 || cfg.eta_mismatch != 0.0 || cfg.eta_det_s != 0.0) return std::nullopt;
      return formulas::single_beam_sui(1.0, 1.0, cfg.g1_power_gain) / formulas::classical_homodyne(1.0, 1.0);
    case SchemeKind::dual_beam_sui:
      if (cfg.eta_transmission != 0.0 || cfg.eta_mismatch != 0.0 || cfg.eta_det_s != cfg.eta_det_i ||
          cfg.eta_det_s >= 1.0) {
        return std::nullopt;
      }
      return formulas::transfer_coefficient(cfg.g1_power_gain) /
             formulas::lossy_sui_squeezing(s, cfg.eta_det_s, cfg.g2_power_gain);
  }
  return std::nullopt;
}

}  // namespace su11
