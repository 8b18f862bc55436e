#include "rssgp/spectral_kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rssgp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

KernelParams KernelParams::isotropic(int dim, double lengthscale, double signal_variance,
                                     double noise_variance) {
  KernelParams p{Eigen::VectorXd::Constant(dim, lengthscale), signal_variance, noise_variance};
  p.validate();
  return p;
}

void KernelParams::validate() const {
  if (lengthscales.size() == 0) throw std::invalid_argument("KernelParams: no lengthscales");
  if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
    throw std::invalid_argument("KernelParams: lengthscales must be positive");
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw std::invalid_argument("KernelParams: signal variance must be positive");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("KernelParams: noise variance must be non-negative");
  }
}

SpectralBasis::SpectralBasis(Eigen::MatrixXd frequencies) : frequencies_(std::move(frequencies)) {
  if (frequencies_.rows() < 1 || frequencies_.cols() < 1) {
    throw std::invalid_argument("SpectralBasis: need at least one frequency of dimension >= 1");
  }
  if (!frequencies_.allFinite()) throw std::invalid_argument("SpectralBasis: non-finite frequency");
}

double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                 const KernelParams& params) {
  require_same_dim(x.size(), x_prime.size(), "se_kernel");
  require_same_dim(x.size(), params.lengthscales.size(), "se_kernel");
  const double r2 = ((x - x_prime).array() / params.lengthscales.array()).square().sum();
  return params.signal_variance * std::exp(-0.5 * r2);
}

SpectralBasis sample_frequencies(const KernelParams& params, int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_frequencies: m must be >= 1");
  params.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = params.dim();
  Eigen::MatrixXd s(m, d);
  for (int r = 0; r < m; ++r) {
    for (int l = 0; l < d; ++l) s(r, l) = normal(rng) / (kTwoPi * params.lengthscales(l));
  }
  return SpectralBasis(std::move(s));
}

Eigen::VectorXd feature_map(const Eigen::VectorXd& x, const SpectralBasis& basis) {
  require_same_dim(x.size(), basis.dim(), "feature_map");
  const Eigen::VectorXd phase = kTwoPi * (basis.frequencies() * x);
  Eigen::VectorXd phi(basis.feature_count());
  for (int r = 0; r < basis.size(); ++r) {
    phi(2 * r) = std::cos(phase(r));
    phi(2 * r + 1) = std::sin(phase(r));
  }
  return phi;
}

Eigen::MatrixXd feature_matrix(const Eigen::MatrixXd& points, const SpectralBasis& basis) {
  require_same_dim(points.cols(), basis.dim(), "feature_matrix");
  const Eigen::MatrixXd phase = kTwoPi * (basis.frequencies() * points.transpose());
  Eigen::MatrixXd phi(basis.feature_count(), points.rows());
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    for (int r = 0; r < basis.size(); ++r) {
      phi(2 * r, j) = std::cos(phase(r, j));
      phi(2 * r + 1, j) = std::sin(phase(r, j));
    }
  }
  return phi;
}

double approx_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                     const SpectralBasis& basis, const KernelParams& params) {
  require_same_dim(x.size(), x_prime.size(), "approx_kernel");
  require_same_dim(x.size(), basis.dim(), "approx_kernel");
  const Eigen::VectorXd phase = kTwoPi * (basis.frequencies() * (x - x_prime));
  return params.signal_variance / basis.size() * phase.array().cos().sum();
}

}  // namespace rssgp
