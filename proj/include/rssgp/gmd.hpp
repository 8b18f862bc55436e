#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rssgp/random.hpp"
#include "rssgp/search_box.hpp"
#include "rssgp/ssgp.hpp"

namespace rssgp {

/// Discrete estimate of the global-maximum distribution q(x*).
struct MaxDistribution {
  std::vector<Eigen::VectorXd> support;
  std::vector<double> pmf;
  double entropy = 0.0;  // nats
};

/// Weighted particle approximation kept between SMC runs.
struct ParticleSet {
  std::vector<Eigen::VectorXd> positions;
  std::vector<double> weights;
  double flat_density = 0.0;  // 1 / volume(box)
};

struct ThompsonConfig {
  int samples = 1000;
  bool resample_features = false;
  int bins = 20;
  int starts = 10;
  /// Random candidates scored before ascent; the best `starts` seed it.
  int candidate_pool = 100;
  int ascent_iterations = 100;
  /// When > 0, draw samples until this many seconds have elapsed instead of
  /// a fixed count.
  double time_budget = 0.0;
  int workers = 1;
};

struct SmcConfig {
  int particles = 500;
  int challengers = 5;
  int rounds = 20;
  double mixture = 0.5;  // alpha
  int bins = 20;
  /// When > 0, run rounds until this many seconds have elapsed.
  double time_budget = 0.0;
  int workers = 1;
};

struct SmcResult {
  MaxDistribution distribution;
  ParticleSet particles;
  int rounds_run = 0;
};

/// -sum p log p with 0 log 0 = 0. Throws std::invalid_argument on negative
/// entries or a total off 1 by more than 1e-6.
double entropy_of(std::span<const double> pmf);

/// Sparse joint histogram with `bins` equal-width cells per dimension. Support
/// points are the centers of occupied cells, ordered by cell index.
MaxDistribution histogram_distribution(std::span<const Eigen::VectorXd> points,
                                       std::span<const double> weights, const SearchBox& box,
                                       int bins);

/// Total-variation distance after re-binning both distributions on the same grid.
double total_variation(const MaxDistribution& p, const MaxDistribution& q, const SearchBox& box,
                       int bins);

/// Maximizes f(x) = phi(x)^T theta over the box by multi-start projected
/// gradient ascent.
Eigen::VectorXd maximize_sampled_function(const SpectralBasis& basis,
                                          const Eigen::VectorXd& theta, const SearchBox& box,
                                          const ThompsonConfig& config, Rng& rng);

/// Maximizer locations of `config.samples` posterior function draws.
std::vector<Eigen::VectorXd> thompson_maximizers(const SsgpPosterior& model,
                                                 const SearchBox& box,
                                                 const ThompsonConfig& config, Rng& rng);

/// Histogram of thompson_maximizers. Requires at least 100 samples unless a
/// time budget is set.
MaxDistribution gmd_thompson(const SsgpPosterior& model, const SearchBox& box,
                             const ThompsonConfig& config, Rng& rng);

/// Importance weight of a challenger at x seeded by the particle at `seed`:
/// beta / (alpha * N(x; seed, diag(rho^2)) + (1 - alpha) * beta). Equals 1 for alpha = 0.
double smc_challenger_weight(const Eigen::VectorXd& x, const Eigen::VectorXd& seed,
                             const Eigen::VectorXd& lengthscales, double alpha, double beta);

SmcResult gmd_smc(const SsgpPosterior& model, const SearchBox& box, const SmcConfig& config,
                  const std::optional<ParticleSet>& warm_start, Rng& rng);

/// Normalizes expected improvement over `design` (n x d) into a PMF on the
/// design points.
MaxDistribution gmd_ei_proxy(const SsgpPosterior& model, const SearchBox& box, double incumbent,
                             const Eigen::MatrixXd& design);

/// Default EI-proxy design: a full grid with `grid_points` per dimension for
/// d <= 2, otherwise `scattered_points` of a randomly shifted Sobol sequence.
Eigen::MatrixXd ei_proxy_design(const SearchBox& box, int grid_points = 101,
                                int scattered_points = 4096, std::uint64_t seed = 0);

/// Low-variance resampling with a single uniform offset. Returns the indices
/// of the selected particles.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng);

}  // namespace rssgp
