#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rssgp/dataset.hpp"
#include "rssgp/gmd.hpp"
#include "rssgp/random.hpp"
#include "rssgp/search_box.hpp"
#include "rssgp/spectral_kernel.hpp"
#include "rssgp/ssgp.hpp"

namespace rssgp {

enum class GmdEstimator { kThompson, kSmc, kEiProxy };

std::string_view to_string(GmdEstimator estimator);
/// Accepts "thompson", "smc", "ei_proxy"; throws std::invalid_argument otherwise.
GmdEstimator parse_gmd_estimator(std::string_view name);

struct RssgpConfig {
  double lambda = 10.0;
  GmdEstimator gmd_estimator = GmdEstimator::kEiProxy;
  int optimizer_steps = 200;
  double step_size = 0.05;  // in whitened-frequency units
  double entropy_floor = 1e-3;
  std::uint64_t seed = 0;
  /// Also learn lengthscales and variances (log space).
  bool learn_kernel = false;

  ThompsonConfig thompson{.samples = 200};
  SmcConfig smc{};
  /// SMC rounds spent on each finite-difference evaluation, warm-started from
  /// the particles of the base evaluation.
  int smc_refresh_rounds = 2;
  int ei_grid_points = 101;
  int ei_scattered_points = 4096;
  /// Central finite-difference step for the stochastic entropy estimators and
  /// for kernel parameters (whitened frequency / log units).
  double fd_step = 1e-2;

  void validate() const;
};

struct LossComponents {
  double loss = 0.0;
  double log_ml = 0.0;
  /// Entropy of the configured GMD estimate; NaN when lambda == 0 (not computed).
  double entropy = 0.0;
};

/// log p(Y | Theta) + lambda * log(max(H[q(x*)], entropy_floor)). With
/// lambda == 0 the entropy is not estimated.
LossComponents rssgp_loss(const Dataset& data, const SpectralBasis& basis,
                          const KernelParams& params, const RssgpConfig& config,
                          const SearchBox& box, Rng& rng);

/// Entropy of the EI-proxy PMF on `design` and its analytic gradient with
/// respect to the frequencies (m x d).
struct EntropyWithGradient {
  double entropy = 0.0;
  Eigen::MatrixXd frequencies;
};
EntropyWithGradient ei_proxy_entropy_gradient(const SsgpPosterior& model, double incumbent,
                                              const Eigen::MatrixXd& design);

/// Incumbent used by the EI proxy: the largest observed target (0 for no data).
double observed_incumbent(const Dataset& data);

struct OptimizationStep {
  double loss = 0.0;
  double log_ml = 0.0;
  double entropy = 0.0;
};

struct OptimizationResult {
  SpectralBasis basis;
  KernelParams params;
  LossComponents best;
  std::vector<OptimizationStep> trace;
};

/// Gradient ascent on rssgp_loss with moment-based per-coordinate step
/// scaling. Returns the best iterate seen, not the last one.
OptimizationResult optimize_frequencies(const Dataset& data, const SpectralBasis& init_basis,
                                        const KernelParams& params, const RssgpConfig& config,
                                        const SearchBox& box, Rng& rng);

}  // namespace rssgp
