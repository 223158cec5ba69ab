#include "su11/mc_oracle.hpp"
#include "su11/schemes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace su11;

namespace {
constexpr std::size_t kN = 1'000'000;
}

TEST(Sampler, VacuumMoments) {
  const auto est = oracle::estimate(oracle::sample(vacuum(1), kN, 41), {{0, kQuadratureX, 1.0}});
  const double n = static_cast<double>(kN);
  EXPECT_LT(std::abs(est.moments.means(0)), 5.0 / std::sqrt(n));
  EXPECT_LT(std::abs(est.moments.cov(0, 0) - 1.0), 5.0 * std::sqrt(2.0 / n));
}

TEST(Sampler, DisplacedMean) {
  const auto state = displace(vacuum(2), 1, -3.0, 0.5);
  const auto est = oracle::estimate(oracle::sample(state, kN, 42), {{1, kQuadratureX, 1.0}, {0, kQuadratureY, 1.0}});
  EXPECT_LT(std::abs(est.moments.means(0) + 3.0), 5.0 * est.mean_se(0));
  EXPECT_LT(std::abs(est.moments.means(1)), 5.0 * est.mean_se(1));
}

TEST(Sampler, TwoModeSqueezedJointVariance) {
  const double big_g = std::sqrt(2.5), g = std::sqrt(1.5);
  const double expected = 2.0 * (big_g - g) * (big_g - g);
  auto batch = oracle::sample(vacuum(2), kN, 43);
  oracle::push(batch, two_mode_squeezer(OpaParams::from_power_gain(2.5), 0, 1));
  const Eigen::RowVectorXd sum = batch.values().row(1) + batch.values().row(3);
  const double mean = sum.mean();
  const double var = (sum.array() - mean).square().sum() / static_cast<double>(kN - 1);
  EXPECT_LT(std::abs(var - expected), 5.0 * expected * std::sqrt(2.0 / static_cast<double>(kN - 1)));
}

TEST(Sampler, SameSeedSameDraws) {
  const auto state = apply(vacuum(2), two_mode_squeezer(OpaParams::from_power_gain(3.0), 0, 1));
  const auto a = oracle::sample(state, 200'000, 7);
  const auto b = oracle::sample(state, 200'000, 7);
  const auto c = oracle::sample(state, 200'000, 8);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
}

TEST(Sampler, RejectsNonPsdCovariance) {
  GaussianState s = vacuum(1);
  s.cov(0, 0) = -1.0;
  EXPECT_THROW(oracle::sample(s, 10, 1), NumericalError);
  EXPECT_THROW(oracle::sample(vacuum(1), 0, 1), std::invalid_argument);
}

TEST(Push, IdentityLeavesBatchUnchanged) {
  auto batch = oracle::sample(displace(vacuum(2), 0, 1.0, 0.0), 1000, 44);
  const Matrix before = batch.values();
  oracle::push(batch, identity_op({0, 1}));
  EXPECT_EQ(batch.values(), before);
}

TEST(Push, FullLossGivesFreshVacuum) {
  auto batch = oracle::sample(displace(apply(vacuum(1), degenerate_squeezer(OpaParams::from_power_gain(9.0), 0)), 0, 5.0, 0.0),
                              kN, 45);
  oracle::push_loss(batch, 0, 1.0);
  const auto est = oracle::estimate(batch, {{0, kQuadratureX, 1.0}});
  EXPECT_LT(oracle::max_z_score(read_moments(vacuum(1), {{0, kQuadratureX, 1.0}}), est), 5.0);
}

TEST(Push, ModulationUsesCarrier) {
  auto state = displace(vacuum(1), 0, 100.0, 0.0);
  auto batch = oracle::sample(state, 1000, 46);
  const Matrix before = batch.values();
  oracle::push_modulation(batch, {ModulationKind::phase, 1e-3, {0}});
  // every draw shifted by the same deterministic amount
  const Eigen::RowVectorXd shift = batch.values().row(1) - before.row(1);
  EXPECT_NEAR(shift.maxCoeff(), 0.1, 1e-12);
  EXPECT_NEAR(shift.minCoeff(), 0.1, 1e-12);
}

TEST(Agreement, DualBeamSuiPipeline) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::dual_beam_sui;
  cfg.g1_power_gain = 2.5;
  cfg.g2_power_gain = 12.0;
  cfg.eta_transmission = 0.3;
  cfg.eta_det_s = 0.22;
  cfg.eta_det_i = 0.27;
  cfg.eta_mismatch = 0.1;
  cfg.photon_number = 1e4;
  const auto sp = build_pipeline(normalized(cfg), {ModulationKind::phase, 1e-3});
  const oracle::OraclePipeline p{sp.input, sp.steps, sp.selections};
  const auto a = oracle::compare(p, kN, 47);
  EXPECT_LT(a.max_z, 5.0);
}

TEST(Agreement, RandomPipelines) {
  std::mt19937_64 rng(48);
  for (int i = 0; i < 5; ++i) {
    const auto p = oracle::random_pipeline(rng);
    const auto a = oracle::compare(p, 400'000, 480 + i);
    EXPECT_LT(a.max_z, 5.0) << "pipeline " << i;
  }
}

TEST(Agreement, DetectsWrongEngine) {
  // A deliberately wrong noise model must be caught.
  auto state = apply(vacuum(1), degenerate_squeezer(OpaParams::from_power_gain(2.5), 0));
  auto est = oracle::estimate(oracle::sample(state, kN, 49), {{0, kQuadratureY, 1.0}});
  auto wrong = read_moments(state, {{0, kQuadratureY, 1.0}});
  wrong.cov(0, 0) *= 1.02;
  EXPECT_GT(oracle::max_z_score(wrong, est), 5.0);
}
