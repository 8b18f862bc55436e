#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rssgp/errors.hpp"
#include "rssgp/full_gp.hpp"

namespace rssgp {
namespace {

Dataset random_data(int t, int d, double lo, double hi, Rng& rng) {
  const Eigen::MatrixXd x = oracle::uniform_matrix(t, d, lo, hi, rng);
  Eigen::VectorXd y(t);
  for (int i = 0; i < t; ++i) y(i) = std::sin(x.row(i).sum()) + 0.1 * x(i, 0);
  return Dataset(x, y);
}

TEST(FitFullGp, ScalarGramFactor) {
  const Dataset data(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, 3.0));
  const FullGpPosterior gp = fit_full_gp(data, KernelParams::isotropic(1, 0.5, 2.0, 1e-4));
  ASSERT_EQ(gp.gram_factor().rows(), 1);
  EXPECT_NEAR(gp.gram_factor()(0, 0), std::sqrt(2.0001), 1e-14);
  EXPECT_NEAR(gp.alpha()(0), 3.0 / 2.0001, 1e-14);
  EXPECT_EQ(gp.jitter(), 0.0);
}

TEST(FitFullGp, FactorReconstructsGram) {
  Rng rng(1);
  const KernelParams p = KernelParams::isotropic(2, 0.7, 1.5, 1e-3);
  const Dataset data = random_data(3, 2, -2, 2, rng);
  const FullGpPosterior gp = fit_full_gp(data, p);
  const Eigen::MatrixXd l = gp.gram_factor();
  const Eigen::MatrixXd expected =
      oracle::gram(data.inputs, [&](const auto& a, const auto& b) { return oracle::se(a, b, p); }) +
      1e-3 * Eigen::MatrixXd::Identity(3, 3);
  EXPECT_LE((l * l.transpose() - expected).norm() / expected.norm(), 1e-8);
}

TEST(FitFullGp, DuplicateInputsWithoutNoiseAreIllConditioned) {
  // The same input observed twice with different values has no noise-free
  // interpolant; the jitter ladder must give up rather than return garbage.
  Eigen::MatrixXd x(3, 1);
  x << 0.2, 0.2, 0.9;
  const Dataset data(x, Eigen::Vector3d(1.0, 1.5, -0.3));
  const KernelParams p = KernelParams::isotropic(1, 0.5, 2.0, 0.0);
  try {
    fit_full_gp(data, p);
    FAIL() << "expected IllConditionedError";
  } catch (const IllConditionedError& e) {
    EXPECT_NEAR(e.final_jitter(), 1e-4 * 2.0, 1e-12);
  }
}

TEST(FitFullGp, ConsistentDuplicatesSurviveWithJitter) {
  Eigen::MatrixXd x(2, 1);
  x << 0.4, 0.4;
  const Dataset data(x, Eigen::Vector2d(0.7, 0.7));
  const FullGpPosterior gp = fit_full_gp(data, KernelParams::isotropic(1, 0.5, 2.0, 0.0));
  EXPECT_LE(gp.jitter(), 1e-4 * 2.0);
  EXPECT_NEAR(predict_full_gp(gp, Eigen::VectorXd::Constant(1, 0.4), false).mean, 0.7, 1e-6);
}

TEST(PredictFullGp, PriorWithoutData) {
  const KernelParams p = KernelParams::isotropic(2, 0.5, 2.0, 1e-4);
  const FullGpPosterior gp = fit_full_gp(Dataset(2), p);
  const Prediction latent = predict_full_gp(gp, Eigen::Vector2d(0.3, -1.0), false);
  EXPECT_EQ(latent.mean, 0.0);
  EXPECT_EQ(latent.variance, 2.0);
  EXPECT_DOUBLE_EQ(predict_full_gp(gp, Eigen::Vector2d(0.3, -1.0), true).variance, 2.0001);
}

TEST(PredictFullGp, InterpolatesInTheNoiseFreeLimit) {
  Rng rng(2);
  const Dataset data = random_data(6, 1, -3, 3, rng);
  const FullGpPosterior gp = fit_full_gp(data, KernelParams::isotropic(1, 0.5, 1.0, 1e-12));
  for (int i = 0; i < data.size(); ++i) {
    const Prediction p = predict_full_gp(gp, data.inputs.row(i).transpose(), false);
    EXPECT_NEAR(p.mean, data.targets(i), 1e-6);
    EXPECT_NEAR(p.variance, 0.0, 1e-6);
  }
}

TEST(PredictFullGp, MatchesDenseInverseOracle) {
  Rng rng(3);
  const KernelParams p = KernelParams::isotropic(1, 0.8, 1.4, 1e-2);
  const Dataset data = random_data(5, 1, -2, 2, rng);
  const FullGpPosterior gp = fit_full_gp(data, p);
  const oracle::Kernel k = [&](const auto& a, const auto& b) { return oracle::se(a, b, p); };
  for (int i = 0; i < 25; ++i) {
    const Eigen::VectorXd x = oracle::uniform_vector(1, -3, 3, rng);
    const oracle::Moments expected = oracle::dense_predict(data, k, 1e-2, x);
    const Prediction got = predict_full_gp(gp, x, false);
    EXPECT_NEAR(got.mean, expected.mean, 1e-8);
    EXPECT_NEAR(got.variance, expected.variance, 1e-8);
    EXPECT_NEAR(predict_full_gp(gp, x, true).variance, expected.variance + 1e-2, 1e-8);
  }
}

TEST(PredictFullGp, VarianceBoundedByPrior) {
  Rng rng(4);
  const KernelParams p = KernelParams::isotropic(2, 0.5, 2.0, 1e-4);
  const FullGpPosterior gp = fit_full_gp(random_data(15, 2, -2, 2, rng), p);
  for (int i = 0; i < 200; ++i) {
    const Prediction pr = predict_full_gp(gp, oracle::uniform_vector(2, -3, 3, rng), true);
    EXPECT_LE(pr.variance, 2.0 + 1e-4 + 1e-8);
    EXPECT_GE(pr.variance, 0.0);
  }
}

TEST(PredictFullGp, MoreDataNeverIncreasesLatentVariance) {
  Rng rng(5);
  const KernelParams p = KernelParams::isotropic(2, 0.6, 1.0, 1e-3);
  for (int trial = 0; trial < 10; ++trial) {
    Dataset data = random_data(8, 2, -2, 2, rng);
    const FullGpPosterior before = fit_full_gp(data, p);
    data.append(oracle::uniform_vector(2, -2, 2, rng), 0.5);
    const FullGpPosterior after = fit_full_gp(data, p);
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd x = oracle::uniform_vector(2, -3, 3, rng);
      EXPECT_LE(predict_full_gp(after, x, false).variance,
                predict_full_gp(before, x, false).variance + 1e-8);
    }
  }
}

TEST(PredictFullGp, MeanInvariantUnderRowPermutation) {
  Rng rng(6);
  const KernelParams p = KernelParams::isotropic(1, 0.5, 2.0, 1e-4);
  const Dataset data = random_data(7, 1, -3, 3, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(7);
  perm.indices() << 3, 6, 0, 5, 1, 4, 2;
  const Dataset shuffled(perm * data.inputs, perm * data.targets);
  const FullGpPosterior a = fit_full_gp(data, p);
  const FullGpPosterior b = fit_full_gp(shuffled, p);
  for (double x = -3.0; x <= 3.0; x += 0.25) {
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, x);
    EXPECT_NEAR(predict_full_gp(a, q, false).mean, predict_full_gp(b, q, false).mean, 1e-9);
  }
}

TEST(PredictFullGp, DimensionMismatchThrows) {
  const FullGpPosterior gp = fit_full_gp(Dataset(2), KernelParams::isotropic(2, 1, 1, 1e-4));
  EXPECT_THROW(predict_full_gp(gp, Eigen::VectorXd::Zero(3), false), std::invalid_argument);
}

}  // namespace
}  // namespace rssgp
