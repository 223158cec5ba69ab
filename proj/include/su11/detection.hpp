// Homodyne readout, electronic current mixing and SNR bookkeeping.

#pragma once

#include "su11/components.hpp"
#include "su11/gaussian_state.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace su11 {

inline constexpr double kQuadratureX = 0.0;
inline constexpr double kQuadratureY = std::numbers::pi / 2.0;

inline double normalize_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  return a >= two_pi ? 0.0 : a;
}

/// Homodyne detector on one mode measuring cos(angle) X + sin(angle) Y after a
/// loss of 1 - efficiency.
struct HomodyneSelection {
  std::size_t mode = 0;
  double angle = kQuadratureY;
  double efficiency = 1.0;
};

struct ReadoutMoments {
  Vector means;
  Matrix cov;

  std::size_t size() const { return static_cast<std::size_t>(means.size()); }
};

inline ReadoutMoments read_moments(const GaussianState& state, std::span<const HomodyneSelection> selections) {
  if (selections.empty()) throw std::invalid_argument("read_moments: no selections");
  GaussianState detected = state;
  for (std::size_t a = 0; a < selections.size(); ++a) {
    const auto& sel = selections[a];
    detail::require_mode(state, sel.mode);
    if (!(sel.efficiency >= 0.0 && sel.efficiency <= 1.0)) {
      throw std::invalid_argument("read_moments: detection efficiency must lie in [0, 1]");
    }
    for (std::size_t b = a + 1; b < selections.size(); ++b) {
      if (selections[b].mode == sel.mode) throw std::invalid_argument("read_moments: duplicate mode in selections");
    }
    detected = loss_channel(std::move(detected), sel.mode, 1.0 - sel.efficiency);
  }

  const auto n = static_cast<Eigen::Index>(selections.size());
  Matrix projector = Matrix::Zero(n, detected.mean.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& sel = selections[static_cast<std::size_t>(j)];
    const double angle = normalize_angle(sel.angle);
    projector(j, static_cast<Eigen::Index>(x_index(sel.mode))) = std::cos(angle);
    projector(j, static_cast<Eigen::Index>(y_index(sel.mode))) = std::sin(angle);
  }
  ReadoutMoments out{projector * detected.mean, projector * detected.cov * projector.transpose()};
  detail::symmetrize(out.cov);
  return out;
}

inline ReadoutMoments read_moments(const GaussianState& state, std::initializer_list<HomodyneSelection> selections) {
  return read_moments(state, std::span<const HomodyneSelection>(selections.begin(), selections.size()));
}

/// Per-selection signal: modulated mean minus baseline mean.
inline Vector signal_extract(const ReadoutMoments& modulated, const ReadoutMoments& baseline) {
  if (modulated.size() != baseline.size()) {
    throw std::invalid_argument("signal_extract: selection count mismatch");
  }
  return modulated.means - baseline.means;
}

struct SnrReport {
  double signal_power = 0.0;
  double noise_power = 1.0;
  double snr_linear = 0.0;
  double snr_db = -std::numeric_limits<double>::infinity();
  std::optional<double> benchmark_snr_linear;
  std::optional<double> improvement_db;

  bool has_signal() const { return snr_linear > 0.0; }
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

inline SnrReport make_snr_report(double signal_power, double noise_power,
                                 std::optional<double> benchmark_snr = std::nullopt) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("SnrReport: noise power must be positive");
  if (!(signal_power >= 0.0)) throw std::invalid_argument("SnrReport: signal power must be non-negative");
  SnrReport r;
  r.signal_power = signal_power;
  r.noise_power = noise_power;
  r.snr_linear = signal_power / noise_power;
  r.snr_db = to_db(r.snr_linear);
  if (benchmark_snr) {
    r.benchmark_snr_linear = benchmark_snr;
    if (*benchmark_snr > 0.0 && r.snr_linear > 0.0) r.improvement_db = r.snr_db - to_db(*benchmark_snr);
  }
  return r;
}

inline SnrReport with_benchmark(SnrReport report, double benchmark_snr) {
  return make_snr_report(report.signal_power, report.noise_power, benchmark_snr);
}

namespace detail {

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace detail

/// Joint photocurrent i = sum_j k_j i_j.
inline SnrReport mix_currents(const ReadoutMoments& moments, const Vector& signals, const Vector& gains) {
  if (signals.size() != moments.means.size() || gains.size() != moments.means.size()) {
    throw std::invalid_argument("mix_currents: dimension mismatch");
  }
  if (gains.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("mix_currents: all gains are zero");
  const double scale = std::max(1.0, moments.cov.cwiseAbs().maxCoeff());
  if (detail::min_eigenvalue(moments.cov) < -1e-12 * scale) {
    throw NumericalError("mix_currents: readout covariance is not positive semi-definite");
  }
  const double amplitude = gains.dot(signals);
  const double noise = gains.dot(moments.cov * gains);
  if (!(noise > 0.0)) throw NumericalError("mix_currents: mixed noise power is not positive");
  return make_snr_report(amplitude * amplitude, noise);
}

inline SnrReport single_port(const ReadoutMoments& moments, const Vector& signals, std::size_t port) {
  Vector gains = Vector::Zero(moments.means.size());
  gains(static_cast<Eigen::Index>(port)) = 1.0;
  return mix_currents(moments, signals, gains);
}

namespace detail {

inline double mixed_snr(double s1, double s2, double v11, double v12, double v22, double k) {
  const double num = (s1 + k * s2) * (s1 + k * s2);
  const double den = v11 + 2.0 * k * v12 + k * k * v22;
  return den > 0.0 ? num / den : 0.0;
}

inline double golden_section_max(auto f, double lo, double hi, int iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Electronic gain k on the second current maximizing the SNR of i_1 + k i_2.
/// Uses the stationary point of the SNR ratio; if that is degenerate, falls back
/// to a bracketed golden-section search.
inline double optimize_mixer_gain(const ReadoutMoments& moments, const Vector& signals) {
  if (moments.size() != 2 || signals.size() != 2) {
    throw std::invalid_argument("optimize_mixer_gain: exactly two selections required");
  }
  const double s1 = signals(0), s2 = signals(1);
  if (s1 == 0.0 && s2 == 0.0) throw std::invalid_argument("optimize_mixer_gain: zero signal vector");
  const double v11 = moments.cov(0, 0), v12 = moments.cov(0, 1), v22 = moments.cov(1, 1);
  if (!(v11 > 0.0 && v22 > 0.0 && v11 * v22 - v12 * v12 > 0.0)) {
    throw NumericalError("optimize_mixer_gain: noise matrix is not positive definite");
  }
  const double numerator = s2 * v11 - s1 * v12;
  const double denominator = s1 * v22 - s2 * v12;
  const double scale = std::abs(s1 * v22) + std::abs(s2 * v12);
  if (std::abs(denominator) > 1e-12 * scale) return numerator / denominator;

  auto snr = [&](double k) { return detail::mixed_snr(s1, s2, v11, v12, v22, k); };
  // Coarse scan to pick the bracket, then refine.
  double best_k = 0.0, best = snr(0.0);
  constexpr double span = 1e3;
  constexpr int coarse = 4000;
  for (int i = 0; i <= coarse; ++i) {
    const double k = -span + 2.0 * span * i / coarse;
    if (const double v = snr(k); v > best) {
      best = v;
      best_k = k;
    }
  }
  const double step = 2.0 * span / coarse;
  return detail::golden_section_max(snr, best_k - step, best_k + step);
}

}  // namespace su11
