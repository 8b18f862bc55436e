#pragma once

#include <Eigen/Dense>

#include "rssgp/random.hpp"

namespace rssgp {

/// Hyperparameters of the stationary squared-exponential kernel.
struct KernelParams {
  Eigen::VectorXd lengthscales;  // one per input dimension
  double signal_variance = 1.0;
  double noise_variance = 1e-4;

  static KernelParams isotropic(int dim, double lengthscale, double signal_variance,
                                double noise_variance);

  int dim() const { return static_cast<int>(lengthscales.size()); }

  /// Throws std::invalid_argument unless lengthscales and signal variance are
  /// positive and the noise variance is non-negative. Models that need a
  /// strictly positive noise check it themselves.
  void validate() const;
};

/// The m frequency vectors s_r (rows, cycles per unit input) of a sparse
/// spectrum approximation. Each row stands for the symmetric pair {s_r, -s_r};
/// the feature map realizes the pair with a cos/sin column.
class SpectralBasis {
 public:
  SpectralBasis() = default;
  explicit SpectralBasis(Eigen::MatrixXd frequencies);

  int size() const { return static_cast<int>(frequencies_.rows()); }
  int dim() const { return static_cast<int>(frequencies_.cols()); }
  int feature_count() const { return 2 * size(); }
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }

  bool operator==(const SpectralBasis& other) const {
    return frequencies_.rows() == other.frequencies_.rows() &&
           frequencies_.cols() == other.frequencies_.cols() && frequencies_ == other.frequencies_;
  }

 private:
  Eigen::MatrixXd frequencies_;  // m x d
};

/// sigma_f^2 * exp(-1/2 * sum_l ((x_l - x'_l) / rho_l)^2)
double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const KernelParams& params);

/// Draws m frequencies from the SE spectral density. Frequencies use the
/// e^{2 pi i s^T x} convention, so coordinate l is N(0, (1 / (2 pi rho_l))^2).
SpectralBasis sample_frequencies(const KernelParams& params, int m, Rng& rng);

/// [cos(2 pi s_1^T x), sin(2 pi s_1^T x), ..., cos(2 pi s_m^T x), sin(2 pi s_m^T x)]
Eigen::VectorXd feature_map(const Eigen::VectorXd& x, const SpectralBasis& basis);

/// Feature columns for every row of `points` (n x d); returns a 2m x n matrix.
Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& points, const SpectralBasis& basis);

/// (sigma_f^2 / m) * sum_r cos(2 pi s_r^T (x - x')), the finite-rank kernel
/// induced by the basis.
double approx_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                     const SpectralBasis& basis, const KernelParams& params);

}  // namespace rssgp
