// Monte Carlo oracle for the covariance engine.
//
// Draws quadrature samples from a Gaussian state and pushes them through the
// same optical pipeline sample by sample. Losses are realized as a physical
// beam splitter with a freshly sampled vacuum ancilla, and the modulator acts
// on a noiseless carrier row that tracks the classical field, so none of the
// engine's covariance-mixing code is reused here.

#pragma once

#include "su11/components.hpp"
#include "su11/detection.hpp"
#include "su11/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

namespace su11::oracle {

inline constexpr std::uint64_t kDefaultSeed = 0x5a11'2018'0c1d'5eedULL;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr Eigen::Index kChunk = 1 << 16;

/// Fills `out` (rows x cols, column = draw) with standard normals. Each chunk of
/// columns gets its own generator seeded from (seed, stream, chunk), so the
/// result does not depend on how chunks are scheduled.
inline void fill_normal(Matrix& out, std::uint64_t seed, std::uint64_t stream) {
  const Eigen::Index cols = out.cols();
  const Eigen::Index n_chunks = (cols + kChunk - 1) / kChunk;
  auto work = [&](Eigen::Index first, Eigen::Index last) {
    for (Eigen::Index c = first; c < last; ++c) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(stream ^ splitmix64(static_cast<std::uint64_t>(c)))));
      std::normal_distribution<double> normal(0.0, 1.0);
      const Eigen::Index begin = c * kChunk;
      const Eigen::Index end = std::min(cols, begin + kChunk);
      for (Eigen::Index j = begin; j < end; ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal(rng);
      }
    }
  };
  const auto threads = static_cast<Eigen::Index>(std::max(1u, std::thread::hardware_concurrency()));
  if (threads == 1 || n_chunks < 2) {
    work(0, n_chunks);
    return;
  }
  std::vector<std::future<void>> jobs;
  const Eigen::Index per = (n_chunks + threads - 1) / threads;
  for (Eigen::Index first = 0; first < n_chunks; first += per) {
    jobs.push_back(std::async(std::launch::async, work, first, std::min(n_chunks, first + per)));
  }
  for (auto& j : jobs) j.get();
}

}  // namespace detail

/// Quadrature draws stored one column per sample (2n rows), plus a noiseless
/// carrier column holding the classical field.
class SampleBatch {
 public:
  SampleBatch(Matrix values, Vector carrier, std::uint64_t seed)
      : values_(std::move(values)), carrier_(std::move(carrier)), seed_(seed) {}

  std::size_t n_samples() const { return static_cast<std::size_t>(values_.cols()); }
  std::size_t n_modes() const { return static_cast<std::size_t>(values_.rows()) / 2; }
  std::uint64_t seed() const { return seed_; }
  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }
  const Vector& carrier() const { return carrier_; }
  Vector& carrier() { return carrier_; }

  /// Next independent noise stream id for this batch.
  std::uint64_t next_stream() { return ++streams_used_; }

 private:
  Matrix values_;
  Vector carrier_;
  std::uint64_t seed_;
  std::uint64_t streams_used_ = 0;
};

/// Draws n samples of the state via a symmetric square root of the covariance.
/// Slightly negative eigenvalues (above -1e-10 relative) are clipped to zero.
inline SampleBatch sample(const GaussianState& state, std::size_t n, std::uint64_t seed = kDefaultSeed) {
  if (n == 0) throw std::invalid_argument("oracle::sample: n must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(state.cov);
  Vector eig = solver.eigenvalues();
  const double scale = std::max(1.0, eig.cwiseAbs().maxCoeff());
  if (eig.minCoeff() < -1e-10 * scale) throw NumericalError("oracle::sample: covariance is not positive semi-definite");
  eig = eig.cwiseMax(0.0);
  const Matrix root = solver.eigenvectors() * eig.cwiseSqrt().asDiagonal() * solver.eigenvectors().transpose();

  Matrix z(state.cov.rows(), static_cast<Eigen::Index>(n));
  detail::fill_normal(z, seed, 0);
  Matrix values = root * z;
  values.colwise() += state.mean;
  return SampleBatch(std::move(values), state.mean, seed);
}

inline void push(SampleBatch& batch, const SymplecticOp& op) {
  const auto [s, d] = embed(op, batch.n_modes());
  batch.values() = s * batch.values();
  batch.values().colwise() += d;
  batch.carrier() = s * batch.carrier() + d;
}

/// Beam splitter of amplitude transmission sqrt(1 - eta) against a vacuum ancilla.
inline void push_loss(SampleBatch& batch, std::size_t mode, double eta) {
  if (mode >= batch.n_modes()) throw std::out_of_range("oracle::push_loss: mode out of range");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("oracle::push_loss: eta must lie in [0, 1]");
  Matrix ancilla(2, batch.values().cols());
  detail::fill_normal(ancilla, batch.seed(), batch.next_stream());
  const double t = std::sqrt(1.0 - eta);
  const double r = std::sqrt(eta);
  const auto row = static_cast<Eigen::Index>(x_index(mode));
  batch.values().middleRows(row, 2) = t * batch.values().middleRows(row, 2) + r * ancilla;
  batch.carrier().segment(row, 2) *= t;
}

/// Small-signal modulation: every sample is displaced by depth times the
/// carrier field (rotated by 90 degrees for phase modulation).
inline void push_modulation(SampleBatch& batch, const ModulationSignal& signal) {
  for (auto mode : signal.applied_modes) {
    if (mode >= batch.n_modes()) throw std::out_of_range("oracle::push_modulation: mode out of range");
    const auto ix = static_cast<Eigen::Index>(x_index(mode));
    const double cx = batch.carrier()(ix);
    const double cy = batch.carrier()(ix + 1);
    Eigen::Vector2d shift = signal.kind == ModulationKind::phase ? Eigen::Vector2d(-signal.depth * cy, signal.depth * cx)
                                                                 : Eigen::Vector2d(signal.depth * cx, signal.depth * cy);
    batch.values().middleRows(ix, 2).colwise() += shift;
    batch.carrier().segment(ix, 2) += shift;
  }
}

inline void push(SampleBatch& batch, const Step& step) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SymplecticOp>) {
          push(batch, s);
        } else if constexpr (std::is_same_v<T, LossStep>) {
          push_loss(batch, s.mode, s.eta);
        } else {
          push_modulation(batch, s);
        }
      },
      step);
}

inline void push_all(SampleBatch& batch, std::span<const Step> steps) {
  for (const auto& step : steps) push(batch, step);
}

/// Empirical readout moments with standard errors.
struct OracleMoments {
  ReadoutMoments moments;
  Vector mean_se;
  Matrix cov_se;
  std::size_t n = 0;
};

inline OracleMoments estimate(SampleBatch batch, std::span<const HomodyneSelection> selections) {
  const auto n = static_cast<Eigen::Index>(batch.n_samples());
  if (n < 2) throw std::invalid_argument("oracle::estimate: need at least two samples");
  const auto k = static_cast<Eigen::Index>(selections.size());
  Matrix readout(k, n);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& sel = selections[static_cast<std::size_t>(j)];
    if (sel.mode >= batch.n_modes()) throw std::out_of_range("oracle::estimate: mode out of range");
    if (!(sel.efficiency >= 0.0 && sel.efficiency <= 1.0)) {
      throw std::invalid_argument("oracle::estimate: efficiency must lie in [0, 1]");
    }
    push_loss(batch, sel.mode, 1.0 - sel.efficiency);
    const auto ix = static_cast<Eigen::Index>(x_index(sel.mode));
    readout.row(j) = std::cos(sel.angle) * batch.values().row(ix) + std::sin(sel.angle) * batch.values().row(ix + 1);
  }

  OracleMoments out;
  out.n = static_cast<std::size_t>(n);
  const Vector mean = readout.rowwise().mean();
  const Matrix centered = readout.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / static_cast<double>(n - 1);
  out.moments = ReadoutMoments{mean, cov};
  const double dn = static_cast<double>(n);
  out.mean_se = (cov.diagonal() / dn).cwiseSqrt();
  out.cov_se.resize(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      out.cov_se(a, b) = std::sqrt((cov(a, a) * cov(b, b) + cov(a, b) * cov(a, b)) / (dn - 1.0));
    }
  }
  return out;
}

inline OracleMoments estimate(const SampleBatch& batch, std::initializer_list<HomodyneSelection> selections) {
  return estimate(batch, std::span<const HomodyneSelection>(selections.begin(), selections.size()));
}

/// Largest |engine - oracle| / SE over every readout mean and covariance entry.
/// Entries whose standard error vanishes are compared with an absolute 1e-9.
inline double max_z_score(const ReadoutMoments& engine, const OracleMoments& oracle) {
  double worst = 0.0;
  auto score = [&](double a, double b, double se) {
    const double diff = std::abs(a - b);
    if (se > 0.0) {
      worst = std::max(worst, diff / se);
    } else if (diff > 1e-9) {
      worst = std::numeric_limits<double>::infinity();
    }
  };
  for (Eigen::Index j = 0; j < engine.means.size(); ++j) score(engine.means(j), oracle.moments.means(j), oracle.mean_se(j));
  for (Eigen::Index a = 0; a < engine.cov.rows(); ++a) {
    for (Eigen::Index b = a; b < engine.cov.cols(); ++b) score(engine.cov(a, b), oracle.moments.cov(a, b), oracle.cov_se(a, b));
  }
  return worst;
}

/// A pipeline together with its input and readout, as used by the agreement
/// checks.
struct OraclePipeline {
  GaussianState input;
  std::vector<Step> steps;
  std::vector<HomodyneSelection> selections;
};

/// Random pipeline over 2 to 4 modes mixing squeezers, rotations, displacements,
/// losses and modulations. Power gains are drawn from [1, 100].
inline OraclePipeline random_pipeline(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> mode_count(2, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = mode_count(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  auto gain = [&] { return 1.0 + 99.0 * unit(rng) * unit(rng); };
  auto phase = [&] { return 2.0 * std::numbers::pi * unit(rng); };

  OraclePipeline p;
  p.input = vacuum(n);
  const auto seeded = pick(rng);
  p.input = displace(p.input, seeded, 200.0 * unit(rng), 40.0 * (unit(rng) - 0.5));

  std::uniform_int_distribution<int> length(3, 10);
  std::uniform_int_distribution<int> kind(0, 5);
  const int steps = length(rng);
  for (int s = 0; s < steps; ++s) {
    switch (kind(rng)) {
      case 0:
      case 1: {
        const auto a = pick(rng);
        auto b = pick(rng);
        if (a == b) b = (a + 1) % n;
        p.steps.emplace_back(two_mode_squeezer(OpaParams::from_power_gain(gain(), phase()), a, b));
        break;
      }
      case 2:
        p.steps.emplace_back(degenerate_squeezer(OpaParams::from_power_gain(gain(), phase()), pick(rng)));
        break;
      case 3:
        p.steps.emplace_back(rotation(pick(rng), phase()));
        break;
      case 4:
        p.steps.emplace_back(LossStep{pick(rng), 0.99 * unit(rng)});
        break;
      default: {
        ModulationSignal m;
        m.kind = unit(rng) < 0.5 ? ModulationKind::phase : ModulationKind::amplitude;
        m.depth = 0.01 * (unit(rng) - 0.5);
        m.applied_modes = {pick(rng)};
        p.steps.emplace_back(std::move(m));
        break;
      }
    }
  }
  const std::size_t readouts = std::min<std::size_t>(n, 2);
  std::vector<std::size_t> modes(n);
  std::iota(modes.begin(), modes.end(), 0);
  std::shuffle(modes.begin(), modes.end(), rng);
  for (std::size_t r = 0; r < readouts; ++r) {
    p.selections.push_back({modes[r], phase(), 0.5 + 0.5 * unit(rng)});
  }
  return p;
}

struct Agreement {
  double max_z = 0.0;
  ReadoutMoments engine;
  OracleMoments oracle;
};

/// Runs both the covariance engine and the sampler over the same pipeline.
inline Agreement compare(const OraclePipeline& p, std::size_t n, std::uint64_t seed) {
  Agreement a;
  a.engine = read_moments(propagate(p.input, p.steps), p.selections);
  SampleBatch batch = sample(p.input, n, seed);
  push_all(batch, p.steps);
  a.oracle = estimate(std::move(batch), p.selections);
  a.max_z = max_z_score(a.engine, a.oracle);
  return a;
}

}  // namespace su11::oracle
