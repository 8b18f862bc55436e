#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rssgp/rssgp_objective.hpp"

namespace rssgp {
namespace {

const SearchBox kLine = SearchBox::cube(1, -10.0, 10.0);

RssgpConfig ei_config(double lambda, int steps) {
  RssgpConfig cfg;
  cfg.lambda = lambda;
  cfg.optimizer_steps = steps;
  cfg.gmd_estimator = GmdEstimator::kEiProxy;
  return cfg;
}

TEST(RssgpLoss, ZeroLambdaIsTheLogMarginal) {
  const fixture::SincProblem sp = fixture::sinc_problem(1);
  Rng rng(2);
  const LossComponents c = rssgp_loss(sp.data, sp.basis, sp.params, ei_config(0.0, 0), kLine, rng);
  const double reference = oracle::dense_log_marginal(
      sp.data,
      [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return oracle::cosine_sum(a, b, sp.basis.frequencies(), sp.params.signal_variance);
      },
      sp.params.noise_variance);
  EXPECT_EQ(c.loss, c.log_ml);
  EXPECT_NEAR(c.log_ml, reference, 1e-6 * std::abs(reference));
  EXPECT_TRUE(std::isnan(c.entropy));
}

TEST(RssgpLoss, UniformProxyAddsLambdaLogLogGridSize) {
  const KernelParams p = KernelParams::isotropic(1, 1.0, 1.0, 1e-4);
  Rng rng(3);
  const SpectralBasis basis = sample_frequencies(p, 10, rng);
  const Dataset empty(1);
  const LossComponents c = rssgp_loss(empty, basis, p, ei_config(2.5, 0), kLine, rng);
  EXPECT_NEAR(c.entropy, std::log(101.0), 1e-9);
  EXPECT_NEAR(c.loss - c.log_ml, 2.5 * std::log(std::log(101.0)), 1e-9);
}

TEST(RssgpLoss, EntropyBelowTheFloorIsClamped) {
  Rng rng(4);
  const fixture::SincProblem sp = fixture::sinc_problem(5);
  RssgpConfig cfg = ei_config(1.0, 0);
  cfg.entropy_floor = 100.0;  // above any attainable entropy
  const LossComponents c = rssgp_loss(sp.data, sp.basis, sp.params, cfg, kLine, rng);
  EXPECT_NEAR(c.loss - c.log_ml, std::log(100.0), 1e-12);
}

TEST(EiProxyEntropyGradient, MatchesCentralDifferences) {
  for (std::uint64_t seed : {6u, 7u, 8u}) {
    const fixture::SincProblem sp = fixture::sinc_problem(seed, 8);
    const double incumbent = observed_incumbent(sp.data);
    const Eigen::MatrixXd design = ei_proxy_design(kLine);
    const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
    const EntropyWithGradient g = ei_proxy_entropy_gradient(model, incumbent, design);
    EXPECT_NEAR(g.entropy, gmd_ei_proxy(model, kLine, incumbent, design).entropy, 1e-12);
    for (int r = 0; r < sp.basis.size(); ++r) {
      const double fd = oracle::central_difference(
          [&](double s) {
            Eigen::MatrixXd f = sp.basis.frequencies();
            f(r, 0) = s;
            const SsgpPosterior moved = fit_ssgp(sp.data, SpectralBasis(f), sp.params);
            return gmd_ei_proxy(moved, kLine, incumbent, design).entropy;
          },
          sp.basis.frequencies()(r, 0), 1e-6);
      EXPECT_NEAR(g.frequencies(r, 0), fd, 1e-5 * std::max(1.0, std::abs(fd))) << seed << " " << r;
    }
  }
}

TEST(OptimizeFrequencies, ZeroStepsReturnsTheInitialPoint) {
  const fixture::SincProblem sp = fixture::sinc_problem(9);
  Rng rng(10);
  const OptimizationResult r =
      optimize_frequencies(sp.data, sp.basis, sp.params, ei_config(10.0, 0), kLine, rng);
  EXPECT_EQ(r.basis.frequencies(), sp.basis.frequencies());
  EXPECT_EQ(r.params.lengthscales, sp.params.lengthscales);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].loss, r.best.loss);
}

TEST(OptimizeFrequencies, ReturnsTheBestIterate) {
  for (double lambda : {0.0, 10.0}) {
    const fixture::SincProblem sp = fixture::sinc_problem(11);
    Rng rng(12);
    const OptimizationResult r =
        optimize_frequencies(sp.data, sp.basis, sp.params, ei_config(lambda, 60), kLine, rng);
    ASSERT_EQ(r.trace.size(), 61u);
    for (const OptimizationStep& s : r.trace) EXPECT_LE(s.loss, r.best.loss);
    EXPECT_GT(r.best.loss, r.trace[0].loss);
    // The reported components belong to the returned basis.
    Rng check(13);
    const LossComponents again = rssgp_loss(sp.data, r.basis, r.params, ei_config(lambda, 0), kLine, check);
    EXPECT_NEAR(again.loss, r.best.loss, 1e-9 * std::abs(r.best.loss));
  }
}

TEST(OptimizeFrequencies, DeterministicForFixedSeed) {
  const fixture::SincProblem sp = fixture::sinc_problem(14);
  RssgpConfig cfg = ei_config(10.0, 20);
  Rng a(15), b(15);
  const OptimizationResult ra = optimize_frequencies(sp.data, sp.basis, sp.params, cfg, kLine, a);
  const OptimizationResult rb = optimize_frequencies(sp.data, sp.basis, sp.params, cfg, kLine, b);
  EXPECT_EQ(ra.basis.frequencies(), rb.basis.frequencies());
  EXPECT_EQ(ra.best.loss, rb.best.loss);
}

TEST(OptimizeFrequencies, StochasticEstimatorsRunAndStayFinite) {
  const fixture::SincProblem sp = fixture::sinc_problem(16, 10);
  for (GmdEstimator e : {GmdEstimator::kThompson, GmdEstimator::kSmc}) {
    RssgpConfig cfg = ei_config(10.0, 3);
    cfg.gmd_estimator = e;
    cfg.thompson.samples = 100;
    cfg.smc.rounds = 3;
    Rng rng(17);
    const OptimizationResult r = optimize_frequencies(sp.data, sp.basis, sp.params, cfg, kLine, rng);
    EXPECT_TRUE(r.basis.frequencies().allFinite());
    EXPECT_TRUE(std::isfinite(r.best.entropy));
    EXPECT_GE(r.best.entropy, 0.0);
  }
}

TEST(OptimizeFrequencies, LearnedKernelStaysPositive) {
  const fixture::SincProblem sp = fixture::sinc_problem(18);
  RssgpConfig cfg = ei_config(0.0, 30);
  cfg.learn_kernel = true;
  Rng rng(19);
  const OptimizationResult r = optimize_frequencies(sp.data, sp.basis, sp.params, cfg, kLine, rng);
  EXPECT_GT(r.params.lengthscales(0), 0.0);
  EXPECT_GT(r.params.signal_variance, 0.0);
  EXPECT_GT(r.params.noise_variance, 0.0);
  EXPECT_GE(r.best.loss, r.trace[0].loss);
}

TEST(OptimizeFrequencies, EntropyTermRaisesTheEntropy) {
  // Same start and steps; only the regularizer differs.
  int higher = 0;
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const fixture::SincProblem sp = fixture::sinc_problem(seed);
    Rng a(seed), b(seed);
    const OptimizationResult plain =
        optimize_frequencies(sp.data, sp.basis, sp.params, ei_config(0.0, 100), kLine, a);
    const OptimizationResult reg =
        optimize_frequencies(sp.data, sp.basis, sp.params, ei_config(10.0, 100), kLine, b);
    const double plain_entropy =
        gmd_ei_proxy(fit_ssgp(sp.data, plain.basis, sp.params), kLine,
                     observed_incumbent(sp.data), ei_proxy_design(kLine)).entropy;
    if (reg.best.entropy > plain_entropy) ++higher;
  }
  EXPECT_GE(higher, 8);
}

TEST(RssgpConfig, ValidationAndNames) {
  RssgpConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RssgpConfig{};
  cfg.entropy_floor = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RssgpConfig{};
  cfg.optimizer_steps = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  for (GmdEstimator e : {GmdEstimator::kThompson, GmdEstimator::kSmc, GmdEstimator::kEiProxy}) {
    EXPECT_EQ(parse_gmd_estimator(to_string(e)), e);
  }
  EXPECT_THROW(parse_gmd_estimator("histogram"), std::invalid_argument);
}

}  // namespace
}  // namespace rssgp
