// Optical elements of the SU(1,1) interferometer family: parametric
// amplifiers, modulators, phase shifters and loss beam splitters.

#pragma once

#include "su11/gaussian_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace su11 {

/// Amplitude gains of a parametric amplifier, a -> G a + g e^{i phi} b^dagger,
/// with G^2 - g^2 = 1 held by construction.
class OpaParams {
 public:
  static OpaParams from_power_gain(double power_gain, double pump_phase = 0.0) {
    if (!(power_gain >= 1.0) || !std::isfinite(power_gain)) {
      throw std::invalid_argument("OpaParams: power gain G^2 must be finite and >= 1, got " +
                                  std::to_string(power_gain));
    }
    return OpaParams(std::sqrt(power_gain), std::sqrt(power_gain - 1.0), pump_phase);
  }

  static OpaParams from_amplitude_gain(double big_g, double pump_phase = 0.0) {
    if (!(big_g >= 1.0) || !std::isfinite(big_g)) {
      throw std::invalid_argument("OpaParams: amplitude gain G must be finite and >= 1");
    }
    return OpaParams(big_g, std::sqrt((big_g - 1.0) * (big_g + 1.0)), pump_phase);
  }

  static OpaParams from_coupling(double small_g, double pump_phase = 0.0) {
    if (!(small_g >= 0.0) || !std::isfinite(small_g)) {
      throw std::invalid_argument("OpaParams: coupling gain g must be finite and >= 0");
    }
    return OpaParams(std::sqrt(1.0 + small_g * small_g), small_g, pump_phase);
  }

  double amplitude_gain() const { return big_g_; }
  double coupling_gain() const { return small_g_; }
  double power_gain() const { return big_g_ * big_g_; }
  double pump_phase() const { return pump_phase_; }

  /// 1/(G+g)^2, the squeezed-quadrature variance this amplifier produces.
  double squeezing() const { return 1.0 / ((big_g_ + small_g_) * (big_g_ + small_g_)); }

 private:
  OpaParams(double big_g, double small_g, double pump_phase)
      : big_g_(big_g), small_g_(small_g), pump_phase_(pump_phase) {}

  double big_g_;
  double small_g_;
  double pump_phase_;
};

/// Two-mode squeezer. For pump_phase = 0:
///   X_a' = G X_a + g X_b,  Y_a' = G Y_a - g Y_b   (and a <-> b).
/// A general pump phase rotates the coupling block to g [[cos, sin], [sin, -cos]].
inline SymplecticOp two_mode_squeezer(const OpaParams& params, std::size_t mode_a, std::size_t mode_b) {
  if (mode_a == mode_b) throw std::invalid_argument("two_mode_squeezer: modes must be distinct");
  const double big_g = params.amplitude_gain();
  const double g = params.coupling_gain();
  const double c = std::cos(params.pump_phase());
  const double s = std::sin(params.pump_phase());
  Matrix m(4, 4);
  m << big_g, 0.0, g * c, g * s,  //
      0.0, big_g, g * s, -g * c,  //
      g * c, g * s, big_g, 0.0,   //
      g * s, -g * c, 0.0, big_g;
  return SymplecticOp{std::move(m), Vector::Zero(4), {mode_a, mode_b}};
}

/// Degenerate squeezer a -> G a + g e^{i phi} a^dagger. At pump_phase = 0 the
/// X quadrature is amplified by G+g and Y is squeezed by G-g.
inline SymplecticOp degenerate_squeezer(const OpaParams& params, std::size_t mode) {
  const double big_g = params.amplitude_gain();
  const double g = params.coupling_gain();
  const double c = std::cos(params.pump_phase());
  const double s = std::sin(params.pump_phase());
  Matrix m(2, 2);
  m << big_g + g * c, g * s,  //
      g * s, big_g - g * c;
  return SymplecticOp{std::move(m), Vector::Zero(2), {mode}};
}

/// Exact rotation of (X, Y) by theta: X' = cos X - sin Y, Y' = sin X + cos Y.
inline SymplecticOp rotation(std::size_t mode, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix m(2, 2);
  m << c, -s,  //
      s, c;
  return SymplecticOp{std::move(m), Vector::Zero(2), {mode}};
}

inline GaussianState phase_shift(GaussianState state, std::size_t mode, double theta) {
  detail::require_mode(state, mode);
  return apply(std::move(state), rotation(mode, theta));
}

/// Beam splitter of transmission 1 - eta mixing the mode with vacuum.
inline GaussianState loss_channel(GaussianState state, std::size_t mode, double eta) {
  detail::require_mode(state, mode);
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("loss_channel: eta must lie in [0, 1], got " + std::to_string(eta));
  }
  const double t = std::sqrt(1.0 - eta);
  const auto ix = static_cast<Eigen::Index>(x_index(mode));
  state.mean.segment(ix, 2) *= t;
  state.cov.middleRows(ix, 2) *= t;
  state.cov.middleCols(ix, 2) *= t;
  state.cov.block(ix, ix, 2, 2) += eta * Matrix::Identity(2, 2);
  return state;
}

enum class ModulationKind { phase, amplitude };

inline constexpr double kModulationHardLimit = 0.1;
inline constexpr double kModulationWarnLimit = 0.01;

struct ModulationSignal {
  ModulationKind kind = ModulationKind::phase;
  double depth = 0.0;
  std::vector<std::size_t> applied_modes;
};

/// True when the depth is legal but large enough that the first-order model
/// starts to be questionable.
inline bool modulation_needs_warning(const ModulationSignal& signal) {
  return std::abs(signal.depth) > kModulationWarnLimit && std::abs(signal.depth) <= kModulationHardLimit;
}

/// Small-signal modulation acting on the means only; the covariance is left
/// untouched (first order in the depth).
inline GaussianState modulate(GaussianState state, const ModulationSignal& signal) {
  if (!(std::abs(signal.depth) <= kModulationHardLimit)) {
    throw std::invalid_argument("modulate: |depth| exceeds the linearization limit " +
                                std::to_string(kModulationHardLimit));
  }
  for (auto mode : signal.applied_modes) {
    detail::require_mode(state, mode);
    const double x = state.mean_x(mode);
    const double y = state.mean_y(mode);
    if (signal.kind == ModulationKind::phase) {
      state.mean(x_index(mode)) = x - signal.depth * y;
      state.mean(y_index(mode)) = y + signal.depth * x;
    } else {
      state.mean(x_index(mode)) = x + signal.depth * x;
      state.mean(y_index(mode)) = y + signal.depth * y;
    }
  }
  return state;
}

struct LossStep {
  std::size_t mode = 0;
  double eta = 0.0;
};

/// One stage of an optical pipeline.
using Step = std::variant<SymplecticOp, LossStep, ModulationSignal>;

inline GaussianState apply_step(GaussianState state, const Step& step) {
  return std::visit(
      [&](const auto& s) -> GaussianState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SymplecticOp>) {
          return apply(std::move(state), s);
        } else if constexpr (std::is_same_v<T, LossStep>) {
          return loss_channel(std::move(state), s.mode, s.eta);
        } else {
          return modulate(std::move(state), s);
        }
      },
      step);
}

inline GaussianState propagate(GaussianState state, std::span<const Step> steps) {
  for (const auto& step : steps) state = apply_step(std::move(state), step);
  return state;
}

/// Product of the linear parts of a pipeline without losses or modulation;
/// throws if a loss step is present.
inline Matrix total_symplectic(std::size_t n_modes, std::span<const Step> steps) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix total = Matrix::Identity(dim, dim);
  for (const auto& step : steps) {
    if (const auto* op = std::get_if<SymplecticOp>(&step)) {
      total = embed(*op, n_modes).first * total;
    } else if (std::holds_alternative<LossStep>(step)) {
      throw std::invalid_argument("total_symplectic: pipeline contains a loss channel");
    }
  }
  return total;
}

}  // namespace su11
