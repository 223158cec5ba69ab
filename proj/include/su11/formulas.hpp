// Closed-form SNR expressions for the SU(1,1) measurement schemes. Pure
// arithmetic, kept free of any simulator code so it can serve as an
// independent check on the Gaussian propagation.

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace su11::formulas {

struct Gains {
  double big_g;
  double small_g;
};

inline Gains gains_from_power(double power_gain) {
  if (!(power_gain >= 1.0)) throw std::invalid_argument("formulas: power gain must be >= 1");
  return {std::sqrt(power_gain), std::sqrt(power_gain - 1.0)};
}

/// S = 1/(G+g)^2.
inline double squeezing(double power_gain) {
  const auto [big_g, g] = gains_from_power(power_gain);
  return 1.0 / ((big_g + g) * (big_g + g));
}

/// Optimum classical homodyne SNR, 4 I delta^2.
inline double classical_homodyne(double photons, double delta) { return 4.0 * photons * delta * delta; }

/// Single-beam SUI in the G2 >> G1 limit: 2 I delta^2 (G+g)^2.
inline double single_beam_sui(double photons, double delta, double g1_power_gain) {
  return 2.0 * photons * delta * delta / squeezing(g1_power_gain);
}

/// Coherent squeezed probe: 4 I delta^2 (G+g)^2.
inline double squeezed_probe(double photons, double delta, double g1_power_gain) {
  return 4.0 * photons * delta * delta / squeezing(g1_power_gain);
}

/// Dual-beam SUI per output port in the G2 -> infinity limit, with
/// I = (G^2 + g^2) |alpha|^2: 2 (G+g)^4 I delta^2 / (G^2 + g^2).
inline double dual_beam_sui(double photons, double delta, double g1_power_gain) {
  const auto [big_g, g] = gains_from_power(g1_power_gain);
  const double sum = big_g + g;
  return 2.0 * sum * sum * sum * sum * photons * delta * delta / (big_g * big_g + g * g);
}

/// Amplitude modulation read at the dual-beam SUI output: 2 I eps^2 / (G^2 + g^2).
inline double dual_beam_amplitude(double photons, double epsilon, double g1_power_gain) {
  const auto [big_g, g] = gains_from_power(g1_power_gain);
  return 2.0 * photons * epsilon * epsilon / (big_g * big_g + g * g);
}

/// Phase plus amplitude SNR of the dual-beam SUI for equal depths.
inline double resource_sharing_sum(double photons, double depth, double g1_power_gain) {
  return dual_beam_sui(photons, depth, g1_power_gain) + dual_beam_amplitude(photons, depth, g1_power_gain);
}

/// Per-port transfer coefficient of the OPA2 tap: (G+g)^2 / (2 (G^2 + g^2)).
inline double transfer_coefficient(double g1_power_gain) {
  const auto [big_g, g] = gains_from_power(g1_power_gain);
  return (big_g + g) * (big_g + g) / (2.0 * (big_g * big_g + g * g));
}

/// Squeezing degraded by a loss eta: S' = S + eta/(1 - eta).
inline double lossy_squeezing(double squeezing_value, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("lossy_squeezing: eta must lie in [0, 1)");
  return squeezing_value + eta / (1.0 - eta);
}

/// Effective squeezing of the SUI with detection loss: S'' = S + eta/(2 G2^2 (1 - eta)).
inline double lossy_sui_squeezing(double squeezing_value, double eta, double g2_power_gain) {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("lossy_sui_squeezing: eta must lie in [0, 1)");
  if (!(g2_power_gain >= 1.0)) throw std::invalid_argument("lossy_sui_squeezing: G2^2 must be >= 1");
  return squeezing_value + eta / (2.0 * g2_power_gain * (1.0 - eta));
}

enum class Formula {
  classical_homodyne,
  single_beam_sui,
  squeezed_probe,
  dual_beam_sui,
  dual_beam_amplitude,
  resource_sharing_sum,
  transfer_coefficient,
  lossy_squeezing,
  lossy_sui_squeezing,
};

struct FormulaInfo {
  Formula id;
  std::string_view name;
  std::vector<std::string_view> params;
};

inline const std::vector<FormulaInfo>& formula_catalogue() {
  static const std::vector<FormulaInfo> catalogue = {
      {Formula::classical_homodyne, "classical_homodyne", {"photons", "delta"}},
      {Formula::single_beam_sui, "single_beam_sui", {"photons", "delta", "g1_power_gain"}},
      {Formula::squeezed_probe, "squeezed_probe", {"photons", "delta", "g1_power_gain"}},
      {Formula::dual_beam_sui, "dual_beam_sui", {"photons", "delta", "g1_power_gain"}},
      {Formula::dual_beam_amplitude, "dual_beam_amplitude", {"photons", "epsilon", "g1_power_gain"}},
      {Formula::resource_sharing_sum, "resource_sharing_sum", {"photons", "delta", "g1_power_gain"}},
      {Formula::transfer_coefficient, "transfer_coefficient", {"g1_power_gain"}},
      {Formula::lossy_squeezing, "lossy_squeezing", {"squeezing", "eta"}},
      {Formula::lossy_sui_squeezing, "lossy_sui_squeezing", {"squeezing", "eta", "g2_power_gain"}},
  };
  return catalogue;
}

inline Formula parse_formula(std::string_view name) {
  for (const auto& info : formula_catalogue()) {
    if (info.name == name) return info.id;
  }
  throw std::invalid_argument("unknown formula '" + std::string(name) + "'");
}

using FormulaParams = std::map<std::string, double, std::less<>>;

/// Evaluates a catalogue formula by name-keyed parameters.
inline double evaluate(Formula id, const FormulaParams& params) {
  auto get = [&](std::string_view key) {
    auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument("formula: missing parameter '" + std::string(key) + "'");
    return it->second;
  };
  switch (id) {
    case Formula::classical_homodyne:
      return classical_homodyne(get("photons"), get("delta"));
    case Formula::single_beam_sui:
      return single_beam_sui(get("photons"), get("delta"), get("g1_power_gain"));
    case Formula::squeezed_probe:
      return squeezed_probe(get("photons"), get("delta"), get("g1_power_gain"));
    case Formula::dual_beam_sui:
      return dual_beam_sui(get("photons"), get("delta"), get("g1_power_gain"));
    case Formula::dual_beam_amplitude:
      return dual_beam_amplitude(get("photons"), get("epsilon"), get("g1_power_gain"));
    case Formula::resource_sharing_sum:
      return resource_sharing_sum(get("photons"), get("delta"), get("g1_power_gain"));
    case Formula::transfer_coefficient:
      return transfer_coefficient(get("g1_power_gain"));
    case Formula::lossy_squeezing:
      return lossy_squeezing(get("squeezing"), get("eta"));
    case Formula::lossy_sui_squeezing:
      return lossy_sui_squeezing(get("squeezing"), get("eta"), get("g2_power_gain"));
  }
  throw std::invalid_argument("formula: unhandled id");
}

inline double evaluate(std::string_view name, const FormulaParams& params) {
  return evaluate(parse_formula(name), params);
}

}  // namespace su11::formulas
