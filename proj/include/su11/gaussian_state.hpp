// Multimode Gaussian states in the quadrature picture.
//
// Conventions used everywhere in this library:
//   X = a + a^dagger, Y = -i (a - a^dagger), so vacuum has unit variance per
//   quadrature and a coherent state |alpha> (alpha real) has <X> = 2 alpha.
//   Phase-space vectors are interleaved: (X_0, Y_0, X_1, Y_1, ...).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace su11 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kSymplecticTolerance = 1e-10;

/// Raised when a state stops describing a physical Gaussian state (uncertainty
/// bound violated, covariance not positive semi-definite).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t x_index(std::size_t mode) { return 2 * mode; }
inline std::size_t y_index(std::size_t mode) { return 2 * mode + 1; }

struct GaussianState {
  Vector mean;
  Matrix cov;

  std::size_t n_modes() const { return static_cast<std::size_t>(mean.size()) / 2; }

  double mean_x(std::size_t mode) const { return mean(x_index(mode)); }
  double mean_y(std::size_t mode) const { return mean(y_index(mode)); }
  double var_x(std::size_t mode) const { return cov(x_index(mode), x_index(mode)); }
  double var_y(std::size_t mode) const { return cov(y_index(mode), y_index(mode)); }

  /// Bright-beam photon number (<X>^2 + <Y>^2) / 4; the vacuum contribution is
  /// ignored on purpose.
  double photon_number(std::size_t mode) const {
    return (mean_x(mode) * mean_x(mode) + mean_y(mode) * mean_y(mode)) / 4.0;
  }
};

namespace detail {

inline void require_mode(const GaussianState& state, std::size_t mode) {
  if (mode >= state.n_modes()) {
    throw std::out_of_range("mode index " + std::to_string(mode) + " out of range for " +
                            std::to_string(state.n_modes()) + "-mode state");
  }
}

inline void symmetrize(Matrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace detail

inline GaussianState vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw std::invalid_argument("vacuum: n_modes must be positive");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState{Vector::Zero(dim), Matrix::Identity(dim, dim)};
}

inline GaussianState displace(GaussianState state, std::size_t mode, double dx, double dy) {
  detail::require_mode(state, mode);
  state.mean(x_index(mode)) += dx;
  state.mean(y_index(mode)) += dy;
  return state;
}

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
inline Matrix symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < n_modes; ++k) {
    omega(x_index(k), y_index(k)) = 1.0;
    omega(y_index(k), x_index(k)) = -1.0;
  }
  return omega;
}

/// max |S Omega S^T - Omega| over all entries.
inline double symplectic_residual(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) {
    throw std::invalid_argument("symplectic_residual: matrix must be square with even size");
  }
  const Matrix omega = symplectic_form(static_cast<std::size_t>(s.rows()) / 2);
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

inline bool is_symplectic(const Matrix& s, double tolerance = kSymplecticTolerance) {
  return symplectic_residual(s) <= tolerance;
}

inline double symmetry_residual(const Matrix& cov) {
  return (cov - cov.transpose()).cwiseAbs().maxCoeff();
}

/// Smallest eigenvalue of the Hermitian matrix cov + i Omega. Non-negative for
/// every physical state; zero for pure states.
inline double uncertainty_margin(const Matrix& cov) {
  const auto n = static_cast<std::size_t>(cov.rows()) / 2;
  const Eigen::MatrixXcd h = cov.cast<std::complex<double>>() +
                             std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Tolerance for the uncertainty check, scaled with the covariance norm since
/// round-off grows with the amplified noise.
inline double uncertainty_tolerance(const Matrix& cov) {
  return 1e-9 * std::max(1.0, cov.cwiseAbs().maxCoeff());
}

inline bool is_physical(const GaussianState& state) {
  return symmetry_residual(state.cov) <= kSymmetryTolerance * std::max(1.0, state.cov.cwiseAbs().maxCoeff()) &&
         uncertainty_margin(state.cov) >= -uncertainty_tolerance(state.cov);
}

inline void check_physical(const GaussianState& state) {
  const double margin = uncertainty_margin(state.cov);
  if (margin < -uncertainty_tolerance(state.cov)) {
    throw NumericalError("uncertainty bound violated: min eig(cov + i*Omega) = " + std::to_string(margin));
  }
}

/// Affine phase-space map x -> S x + d restricted to `acted_modes`.
struct SymplecticOp {
  Matrix matrix;
  Vector displacement;
  std::vector<std::size_t> acted_modes;

  std::size_t n_acted() const { return acted_modes.size(); }
};

inline SymplecticOp identity_op(std::vector<std::size_t> modes) {
  const auto dim = static_cast<Eigen::Index>(2 * modes.size());
  return SymplecticOp{Matrix::Identity(dim, dim), Vector::Zero(dim), std::move(modes)};
}

/// Returns the op equivalent to applying `first` and then `second`.
inline SymplecticOp compose(const SymplecticOp& first, const SymplecticOp& second) {
  if (first.acted_modes != second.acted_modes) {
    throw std::invalid_argument("compose: ops must act on the same ordered mode list");
  }
  return SymplecticOp{second.matrix * first.matrix, second.matrix * first.displacement + second.displacement,
                      first.acted_modes};
}

/// Lifts `op` to the full 2n x 2n phase space.
inline std::pair<Matrix, Vector> embed(const SymplecticOp& op, std::size_t n_modes) {
  const auto k = op.n_acted();
  if (op.matrix.rows() != static_cast<Eigen::Index>(2 * k) || op.matrix.cols() != op.matrix.rows() ||
      op.displacement.size() != op.matrix.rows()) {
    throw std::invalid_argument("SymplecticOp: matrix/displacement size does not match acted modes");
  }
  for (std::size_t a = 0; a < k; ++a) {
    if (op.acted_modes[a] >= n_modes) {
      throw std::invalid_argument("SymplecticOp acts on mode " + std::to_string(op.acted_modes[a]) +
                                  " but the state has " + std::to_string(n_modes) + " modes");
    }
    for (std::size_t b = a + 1; b < k; ++b) {
      if (op.acted_modes[a] == op.acted_modes[b]) throw std::invalid_argument("SymplecticOp: duplicate acted mode");
    }
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix full = Matrix::Identity(dim, dim);
  Vector shift = Vector::Zero(dim);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t qa = 0; qa < 2; ++qa) {
      const auto row = static_cast<Eigen::Index>(2 * op.acted_modes[a] + qa);
      shift(row) = op.displacement(static_cast<Eigen::Index>(2 * a + qa));
      for (std::size_t b = 0; b < k; ++b) {
        for (std::size_t qb = 0; qb < 2; ++qb) {
          const auto col = static_cast<Eigen::Index>(2 * op.acted_modes[b] + qb);
          full(row, col) = op.matrix(static_cast<Eigen::Index>(2 * a + qa), static_cast<Eigen::Index>(2 * b + qb));
        }
      }
    }
  }
  return {std::move(full), std::move(shift)};
}

inline GaussianState apply(GaussianState state, const SymplecticOp& op) {
  const auto [s, d] = embed(op, state.n_modes());
  state.mean = s * state.mean + d;
  state.cov = s * state.cov * s.transpose();
  detail::symmetrize(state.cov);
  return state;
}

inline GaussianState marginal(const GaussianState& state, std::span<const std::size_t> modes) {
  if (modes.empty()) throw std::invalid_argument("marginal: empty mode list");
  for (std::size_t a = 0; a < modes.size(); ++a) {
    detail::require_mode(state, modes[a]);
    for (std::size_t b = a + 1; b < modes.size(); ++b) {
      if (modes[a] == modes[b]) throw std::invalid_argument("marginal: duplicate mode index");
    }
  }
  std::vector<Eigen::Index> idx;
  idx.reserve(2 * modes.size());
  for (auto m : modes) {
    idx.push_back(static_cast<Eigen::Index>(x_index(m)));
    idx.push_back(static_cast<Eigen::Index>(y_index(m)));
  }
  return GaussianState{state.mean(idx), state.cov(idx, idx)};
}

inline GaussianState marginal(const GaussianState& state, std::initializer_list<std::size_t> modes) {
  return marginal(state, std::span<const std::size_t>(modes.begin(), modes.size()));
}

}  // namespace su11
