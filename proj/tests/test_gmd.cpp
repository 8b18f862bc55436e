#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rssgp/gmd.hpp"

namespace rssgp {
namespace {

const SearchBox kLine = SearchBox::cube(1, -10.0, 10.0);

void expect_valid(const MaxDistribution& q) {
  ASSERT_EQ(q.support.size(), q.pmf.size());
  double total = 0.0;
  for (double p : q.pmf) {
    EXPECT_GE(p, 0.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_GE(q.entropy, 0.0);
  EXPECT_LE(q.entropy, std::log(static_cast<double>(q.pmf.size())) + 1e-12);
}

double mass_near(const MaxDistribution& q, double x0, double radius) {
  double mass = 0.0;
  for (std::size_t i = 0; i < q.support.size(); ++i) {
    if (std::abs(q.support[i](0) - x0) <= radius) mass += q.pmf[i];
  }
  return mass;
}

TEST(EntropyOf, ClosedForms) {
  EXPECT_EQ(entropy_of(std::vector<double>{1.0, 0.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy_of(std::vector<double>{0.5, 0.5}), 0.6931471805599453, 1e-15);
  const std::vector<double> uniform(37, 1.0 / 37.0);
  EXPECT_NEAR(entropy_of(uniform), std::log(37.0), 1e-12);
}

TEST(EntropyOf, RejectsInvalidPmf) {
  EXPECT_THROW(entropy_of(std::vector<double>{0.5, -0.1, 0.6}), std::invalid_argument);
  EXPECT_THROW(entropy_of(std::vector<double>{0.5, 0.49}), std::invalid_argument);
  EXPECT_NO_THROW(entropy_of(std::vector<double>{0.5, 0.5 - 1e-8}));
}

TEST(HistogramDistribution, SparseCellsWithCenters) {
  const SearchBox box = SearchBox::cube(2, 0.0, 1.0);
  std::vector<Eigen::VectorXd> pts = {Eigen::Vector2d(0.01, 0.01), Eigen::Vector2d(0.02, 0.04),
                                      Eigen::Vector2d(0.99, 0.5), Eigen::Vector2d(1.0, 1.0)};
  const MaxDistribution q = histogram_distribution(pts, {}, box, 20);
  expect_valid(q);
  ASSERT_EQ(q.support.size(), 3u);
  EXPECT_NEAR(q.support[0](0), 0.025, 1e-12);
  EXPECT_NEAR(q.support[0](1), 0.025, 1e-12);
  EXPECT_NEAR(q.pmf[0], 0.5, 1e-15);
  // The upper boundary belongs to the last cell.
  EXPECT_NEAR(q.support[2](0), 0.975, 1e-12);
  EXPECT_NEAR(q.support[2](1), 0.975, 1e-12);
  EXPECT_NEAR(q.entropy, -(0.5 * std::log(0.5) + 2 * 0.25 * std::log(0.25)), 1e-12);
}

TEST(HistogramDistribution, WeightsAndErrors) {
  std::vector<Eigen::VectorXd> pts = {Eigen::VectorXd::Constant(1, -9.9),
                                      Eigen::VectorXd::Constant(1, 9.9)};
  const MaxDistribution q = histogram_distribution(pts, std::vector<double>{3.0, 1.0}, kLine, 20);
  EXPECT_NEAR(q.pmf[0], 0.75, 1e-15);
  EXPECT_THROW(histogram_distribution({}, {}, kLine, 20), std::invalid_argument);
  EXPECT_THROW(histogram_distribution(pts, std::vector<double>{0.0, 0.0}, kLine, 20),
               std::invalid_argument);
}

TEST(TotalVariation, IdenticalAndDisjoint) {
  std::vector<Eigen::VectorXd> a = {Eigen::VectorXd::Constant(1, -5.0)};
  std::vector<Eigen::VectorXd> b = {Eigen::VectorXd::Constant(1, 5.0)};
  const MaxDistribution p = histogram_distribution(a, {}, kLine, 20);
  const MaxDistribution q = histogram_distribution(b, {}, kLine, 20);
  EXPECT_EQ(total_variation(p, p, kLine, 20), 0.0);
  EXPECT_NEAR(total_variation(p, q, kLine, 20), 1.0, 1e-15);
  EXPECT_NEAR(total_variation(q, p, kLine, 20), 1.0, 1e-15);
}

TEST(SystematicResample, CountsStayWithinOneOfExpectation) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd w = oracle::uniform_vector(17, 0.0, 1.0, rng);
    const std::vector<double> weights(w.data(), w.data() + w.size());
    const std::size_t n = 100;
    const auto picks = systematic_resample(weights, n, rng);
    ASSERT_EQ(picks.size(), n);
    EXPECT_TRUE(std::is_sorted(picks.begin(), picks.end()));
    for (int i = 0; i < 17; ++i) {
      const double expected = n * weights[i] / w.sum();
      const auto count = std::count(picks.begin(), picks.end(), static_cast<std::size_t>(i));
      EXPECT_GE(count, std::floor(expected) - 1e-9);
      EXPECT_LE(count, std::ceil(expected) + 1e-9);
    }
  }
  EXPECT_THROW(systematic_resample(std::vector<double>{0.0, 0.0}, 3, rng), std::invalid_argument);
}

TEST(GmdThompson, PeakedPosteriorConcentratesAtTheObservation) {
  const SsgpPosterior model = fixture::peaked_posterior(2.0, 200, 3);
  Rng rng(4);
  ThompsonConfig cfg;
  cfg.samples = 500;
  const MaxDistribution q = gmd_thompson(model, kLine, cfg, rng);
  expect_valid(q);
  // The bin of x0 = 2 is [2, 3); its neighbours are [1, 2) and [3, 4).
  EXPECT_GE(mass_near(q, 2.5, 1.01), 0.95);
}

TEST(GmdThompson, SymmetricPriorCentersOnTheBox) {
  const KernelParams p = KernelParams::isotropic(2, 0.5, 1.0, 1e-4);
  Rng rng(5);
  const SsgpPosterior prior = fit_ssgp(Dataset(2), sample_frequencies(p, 100, rng), p);
  const SearchBox box = SearchBox::cube(2, -3.0, 3.0);
  ThompsonConfig cfg;
  cfg.samples = 2000;
  const auto xs = thompson_maximizers(prior, box, cfg, rng);
  ASSERT_EQ(xs.size(), 2000u);
  for (int l = 0; l < 2; ++l) {
    double mean = 0.0, sq = 0.0;
    for (const auto& x : xs) {
      mean += x(l);
      sq += x(l) * x(l);
      EXPECT_TRUE(box.contains(x));
    }
    mean /= xs.size();
    const double se = std::sqrt((sq / xs.size() - mean * mean) / xs.size());
    EXPECT_LE(std::abs(mean), 3.0 * se);
  }
}

TEST(GmdThompson, InnerMaximizerFindsTheGridMaximum) {
  const fixture::SincProblem sp = fixture::sinc_problem(6);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  Rng rng(7);
  ThompsonConfig cfg;
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd theta = sample_posterior_weights(model, rng);
    const Eigen::VectorXd x = maximize_sampled_function(sp.basis, theta, kLine, cfg, rng);
    const Eigen::MatrixXd grid = Eigen::VectorXd::LinSpaced(20001, -10, 10);
    const double grid_best = (feature_matrix(grid, sp.basis).transpose() * theta).maxCoeff();
    EXPECT_GE(feature_map(x, sp.basis).dot(theta), grid_best - 1e-6);
  }
}

TEST(GmdThompson, DeterministicAcrossWorkerCounts) {
  const fixture::SincProblem sp = fixture::sinc_problem(8);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  ThompsonConfig one;
  one.samples = 200;
  ThompsonConfig three = one;
  three.workers = 3;
  Rng a(9), b(9);
  const auto xa = thompson_maximizers(model, kLine, one, a);
  const auto xb = thompson_maximizers(model, kLine, three, b);
  ASSERT_EQ(xa.size(), xb.size());
  for (std::size_t i = 0; i < xa.size(); ++i) EXPECT_EQ(xa[i], xb[i]);
}

TEST(GmdThompson, ResampledFeaturesAndValidation) {
  const fixture::SincProblem sp = fixture::sinc_problem(10);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  ThompsonConfig cfg;
  cfg.samples = 100;
  cfg.resample_features = true;
  Rng rng(11);
  expect_valid(gmd_thompson(model, kLine, cfg, rng));
  cfg.samples = 99;
  EXPECT_THROW(gmd_thompson(model, kLine, cfg, rng), std::invalid_argument);
}

TEST(SmcChallengerWeight, FlatProposalGivesUnitWeight) {
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(2, 0.5);
  EXPECT_EQ(smc_challenger_weight(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.1, 0.2), rho, 0.0, 0.25), 1.0);
  // At the seed the Gaussian density is 1 / (2 pi rho^2).
  const double density = 1.0 / (2.0 * std::numbers::pi * 0.25);
  EXPECT_NEAR(smc_challenger_weight(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.1, 0.2), rho, 0.5, 0.25),
              0.25 / (0.5 * density + 0.5 * 0.25), 1e-14);
}

TEST(GmdSmc, PeakedPosteriorConcentratesAtTheObservation) {
  const SsgpPosterior model = fixture::peaked_posterior(-4.0, 200, 12);
  Rng rng(13);
  const SmcResult r = gmd_smc(model, kLine, SmcConfig{}, std::nullopt, rng);
  expect_valid(r.distribution);
  EXPECT_EQ(r.rounds_run, 20);
  EXPECT_GE(mass_near(r.distribution, -3.5, 1.01), 0.9);
  for (const auto& x : r.particles.positions) EXPECT_TRUE(kLine.contains(x));
  EXPECT_NEAR(r.particles.flat_density, 1.0 / 20.0, 1e-15);
}

TEST(GmdSmc, WarmStartWithoutRoundsIsIdempotent) {
  const fixture::SincProblem sp = fixture::sinc_problem(14);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  Rng rng(15);
  SmcConfig cfg;
  cfg.rounds = 5;
  const SmcResult first = gmd_smc(model, kLine, cfg, std::nullopt, rng);
  cfg.rounds = 0;
  const SmcResult again = gmd_smc(model, kLine, cfg, first.particles, rng);
  EXPECT_EQ(again.rounds_run, 0);
  EXPECT_EQ(again.distribution.pmf, first.distribution.pmf);
  ASSERT_EQ(again.distribution.support.size(), first.distribution.support.size());
  for (std::size_t i = 0; i < first.distribution.support.size(); ++i) {
    EXPECT_EQ(again.distribution.support[i], first.distribution.support[i]);
  }
}

TEST(GmdSmc, DeterministicAcrossWorkerCounts) {
  const fixture::SincProblem sp = fixture::sinc_problem(16);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  SmcConfig one;
  one.rounds = 4;
  SmcConfig two = one;
  two.workers = 2;
  Rng a(17), b(17);
  const SmcResult ra = gmd_smc(model, kLine, one, std::nullopt, a);
  const SmcResult rb = gmd_smc(model, kLine, two, std::nullopt, b);
  EXPECT_EQ(ra.particles.positions, rb.particles.positions);
  EXPECT_EQ(ra.distribution.pmf, rb.distribution.pmf);
}

TEST(GmdSmc, RejectsBadConfigs) {
  const fixture::SincProblem sp = fixture::sinc_problem(18);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  Rng rng(19);
  SmcConfig cfg;
  cfg.particles = 1;
  EXPECT_THROW(gmd_smc(model, kLine, cfg, std::nullopt, rng), std::invalid_argument);
  cfg = SmcConfig{};
  cfg.challengers = 0;
  EXPECT_THROW(gmd_smc(model, kLine, cfg, std::nullopt, rng), std::invalid_argument);
  cfg = SmcConfig{};
  cfg.mixture = 1.0;
  EXPECT_THROW(gmd_smc(model, kLine, cfg, std::nullopt, rng), std::invalid_argument);
}

TEST(GmdEiProxy, ConstantSurfaceIsUniform) {
  const KernelParams p = KernelParams::isotropic(1, 1.0, 1.0, 1e-4);
  Rng rng(20);
  const SsgpPosterior prior = fit_ssgp(Dataset(1), sample_frequencies(p, 10, rng), p);
  const Eigen::MatrixXd design = ei_proxy_design(kLine);
  const MaxDistribution q = gmd_ei_proxy(prior, kLine, 0.0, design);
  expect_valid(q);
  // The prior has mean 0 and variance sigma_f^2 everywhere, up to rounding.
  EXPECT_NEAR(q.entropy, std::log(101.0), 1e-9);
}

TEST(GmdEiProxy, SinglePositivePointIsAPointMass) {
  const KernelParams p = KernelParams::isotropic(1, 1.0, 1.0, 1e-12);
  const SpectralBasis basis(Eigen::Vector3d(0.05, 0.11, 0.17));
  Eigen::MatrixXd x(2, 1);
  x << -5.0, 5.0;
  const SsgpPosterior model = fit_ssgp(Dataset(x, Eigen::Vector2d(0.0, -100.0)), basis, p);
  const MaxDistribution q = gmd_ei_proxy(model, kLine, 0.0, x);
  EXPECT_EQ(q.pmf[0], 1.0);
  EXPECT_EQ(q.pmf[1], 0.0);
  EXPECT_EQ(q.entropy, 0.0);
}

TEST(GmdEiProxy, FallsBackToUniformWhenEiVanishes) {
  const KernelParams p = KernelParams::isotropic(1, 1.0, 1.0, 1e-4);
  Rng rng(21);
  const SsgpPosterior prior = fit_ssgp(Dataset(1), sample_frequencies(p, 10, rng), p);
  const Eigen::MatrixXd design = Eigen::VectorXd::LinSpaced(7, -10, 10);
  const MaxDistribution q = gmd_ei_proxy(prior, kLine, 1e6, design);
  EXPECT_NEAR(q.entropy, std::log(7.0), 1e-12);
}

TEST(GmdEiProxy, CloseToThompsonOnSinc) {
  const fixture::SincProblem sp = fixture::sinc_problem(22);
  const SsgpPosterior model = fit_ssgp(sp.data, sp.basis, sp.params);
  Rng rng(23);
  ThompsonConfig cfg;
  cfg.samples = 5000;
  const MaxDistribution ts = gmd_thompson(model, kLine, cfg, rng);
  const MaxDistribution ei =
      gmd_ei_proxy(model, kLine, sp.data.targets.maxCoeff(), ei_proxy_design(kLine));
  EXPECT_LE(total_variation(ts, ei, kLine, 20), 0.25);
}

TEST(EiProxyDesign, GridAndScatteredDesigns) {
  const Eigen::MatrixXd line = ei_proxy_design(kLine);
  ASSERT_EQ(line.rows(), 101);
  EXPECT_EQ(line(0, 0), -10.0);
  EXPECT_EQ(line(100, 0), 10.0);
  EXPECT_EQ(ei_proxy_design(SearchBox::cube(2, 0, 1)).rows(), 101 * 101);

  const SearchBox cube6 = SearchBox::cube(6, 0.0, 1.0);
  const Eigen::MatrixXd a = ei_proxy_design(cube6, 101, 4096, 1);
  ASSERT_EQ(a.rows(), 4096);
  ASSERT_EQ(a.cols(), 6);
  EXPECT_EQ(a, ei_proxy_design(cube6, 101, 4096, 1));
  EXPECT_NE(a, ei_proxy_design(cube6, 101, 4096, 2));
  for (Eigen::Index i = 0; i < a.rows(); ++i) EXPECT_TRUE(cube6.contains(a.row(i).transpose()));
  // Low discrepancy: every coordinate's marginal is close to uniform.
  for (int l = 0; l < 6; ++l) EXPECT_NEAR(a.col(l).mean(), 0.5, 0.01);
}

}  // namespace
}  // namespace rssgp
