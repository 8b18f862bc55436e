#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rssgp/dataset.hpp"
#include "rssgp/full_gp.hpp"
#include "rssgp/random.hpp"
#include "rssgp/spectral_kernel.hpp"

namespace rssgp {

/// Feature-space posterior of a sparse spectrum GP:
///   A = Phi Phi^T + (m sigma_n^2 / sigma_f^2) I_{2m},  weight_mean = A^{-1} Phi Y.
/// Immutable after fit.
class SsgpPosterior {
 public:
  const Dataset& data() const { return data_; }
  const SpectralBasis& basis() const { return basis_; }
  const KernelParams& params() const { return params_; }
  const Eigen::MatrixXd& phi_matrix() const { return phi_; }
  /// Lower Cholesky factor of A.
  const Eigen::MatrixXd& a_factor() const { return a_factor_; }
  const Eigen::VectorXd& weight_mean() const { return weight_mean_; }
  double ridge() const { return ridge_; }

  /// A^{-1} b via the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  /// L^{-1} b (half solve), whose squared column norms give b^T A^{-1} b.
  Eigen::MatrixXd half_solve(const Eigen::MatrixXd& b) const;

 private:
  friend SsgpPosterior fit_ssgp(const Dataset&, const SpectralBasis&, const KernelParams&);

  Dataset data_;
  SpectralBasis basis_;
  KernelParams params_;
  Eigen::MatrixXd phi_;       // 2m x t
  Eigen::MatrixXd a_factor_;  // 2m x 2m lower
  Eigen::VectorXd weight_mean_;
  double ridge_ = 0.0;
};

struct BatchPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Gradient of the SSGP log marginal likelihood. Positive parameters are
/// differentiated in log space. The lengthscale derivative holds the whitened
/// frequencies 2 pi rho_l s_{r,l} fixed, i.e. s_{.,l} scales as 1 / rho_l.
struct LogMarginalGradient {
  Eigen::MatrixXd frequencies;  // m x d, d/ds_{r,l}
  Eigen::VectorXd log_lengthscales;
  double log_signal_variance = 0.0;
  double log_noise_variance = 0.0;
};

/// Requires sigma_n^2 > 0. Cost O(t m^2 + m^3).
SsgpPosterior fit_ssgp(const Dataset& data, const SpectralBasis& basis, const KernelParams& params);

/// Latent variance is sigma_n^2 phi^T A^{-1} phi; include_noise adds sigma_n^2.
Prediction predict_ssgp(const SsgpPosterior& model, const Eigen::VectorXd& x, bool include_noise);
BatchPrediction predict_ssgp_batch(const SsgpPosterior& model, const Eigen::MatrixXd& points,
                             bool include_noise);

double ssgp_log_marginal(const SsgpPosterior& model);
LogMarginalGradient ssgp_log_marginal_grad(const SsgpPosterior& model);

/// Draws theta ~ N(weight_mean, sigma_n^2 A^{-1}); the sampled function is
/// f(x) = phi(x)^T theta.
Eigen::VectorXd sample_posterior_weights(const SsgpPosterior& model, Rng& rng);

/// Chains a gradient with respect to feature columns (2m x n, laid out like
/// feature_matrix(points)) onto the m x d frequency matrix.
Eigen::MatrixXd chain_feature_gradient(const Eigen::MatrixXd& feature_grad,
                                       const Eigen::MatrixXd& features,
                                       const Eigen::MatrixXd& points);

}  // namespace rssgp
