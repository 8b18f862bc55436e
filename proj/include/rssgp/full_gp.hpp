#pragma once

#include <functional>

#include <Eigen/Dense>

#include "rssgp/dataset.hpp"
#include "rssgp/spectral_kernel.hpp"

namespace rssgp {

using CovarianceFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP posterior with a cached Cholesky factor of K + sigma_n^2 I.
/// Immutable after fit.
class FullGpPosterior {
 public:
  const Dataset& data() const { return data_; }
  const KernelParams& params() const { return params_; }
  const Eigen::MatrixXd& gram_factor() const { return gram_factor_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Jitter that had to be added to the diagonal (0 when none).
  double jitter() const { return jitter_; }
  double covariance(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime) const {
    return covariance_(x, x_prime);
  }

 private:
  friend FullGpPosterior fit_full_gp(const Dataset&, const KernelParams&, CovarianceFn);

  Dataset data_;
  KernelParams params_;
  CovarianceFn covariance_;
  Eigen::MatrixXd gram_factor_;  // lower triangular
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

/// Fits with the SE kernel.
FullGpPosterior fit_full_gp(const Dataset& data, const KernelParams& params);

/// Fits with an arbitrary covariance (e.g. approx_kernel); params supply the
/// noise variance and the jitter scale.
///
/// On factorization failure the diagonal receives jitter 1e-10 * sigma_f^2,
/// growing x10 per attempt up to 1e-4 * sigma_f^2. A factorization is only
/// accepted when the resulting solve still satisfies the un-jittered system
/// (K + sigma_n^2 I) alpha = Y to relative residual 1e-6; otherwise
/// IllConditionedError is thrown with the last jitter tried.
FullGpPosterior fit_full_gp(const Dataset& data, const KernelParams& params,
                            CovarianceFn covariance);

Prediction predict_full_gp(const FullGpPosterior& model, const Eigen::VectorXd& x,
                           bool include_noise);

}  // namespace rssgp
