#include "rssgp/ssgp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rssgp/errors.hpp"

namespace rssgp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Eigen::VectorXd SsgpPosterior::solve(const Eigen::VectorXd& b) const {
  const auto lower = a_factor_.triangularView<Eigen::Lower>();
  return lower.transpose().solve(lower.solve(b));
}

Eigen::MatrixXd SsgpPosterior::solve(const Eigen::MatrixXd& b) const {
  const auto lower = a_factor_.triangularView<Eigen::Lower>();
  return lower.transpose().solve(lower.solve(b));
}

Eigen::MatrixXd SsgpPosterior::half_solve(const Eigen::MatrixXd& b) const {
  return a_factor_.triangularView<Eigen::Lower>().solve(b);
}

SsgpPosterior fit_ssgp(const Dataset& data, const SpectralBasis& basis, const KernelParams& params) {
  params.validate();
  if (!(params.noise_variance > 0.0)) {
    throw std::invalid_argument("fit_ssgp: noise variance must be positive");
  }
  if (data.dim() != basis.dim() || basis.dim() != params.dim()) {
    throw std::invalid_argument("fit_ssgp: dimension mismatch");
  }

  SsgpPosterior model;
  model.data_ = data;
  model.basis_ = basis;
  model.params_ = params;
  model.ridge_ = basis.size() * params.noise_variance / params.signal_variance;
  model.phi_ = feature_matrix(data.inputs, basis);

  const int k = basis.feature_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k) * model.ridge_;
  if (data.size() > 0) a.selfadjointView<Eigen::Lower>().rankUpdate(model.phi_);
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("fit_ssgp: feature Gram matrix is not positive definite");
  }
  model.a_factor_ = llt.matrixL();
  model.weight_mean_ = data.size() > 0 ? model.solve(Eigen::VectorXd(model.phi_ * data.targets))
                                       : Eigen::VectorXd::Zero(k);
  return model;
}

Prediction predict_ssgp(const SsgpPosterior& model, const Eigen::VectorXd& x, bool include_noise) {
  if (x.size() != model.basis().dim()) throw std::invalid_argument("predict_ssgp: dimension mismatch");
  const double noise = model.params().noise_variance;
  // The prior: |phi(x)|^2 = m, so the variance is sigma_f^2 in exact arithmetic.
  if (model.data().empty()) {
    const double prior = model.params().signal_variance;
    return {0.0, include_noise ? prior + noise : prior};
  }
  const Eigen::VectorXd phi = feature_map(x, model.basis());
  const Eigen::VectorXd v = model.half_solve(phi);
  const double latent = noise * v.squaredNorm();
  return {phi.dot(model.weight_mean()), include_noise ? latent + noise : latent};
}

BatchPrediction predict_ssgp_batch(const SsgpPosterior& model, const Eigen::MatrixXd& points,
                             bool include_noise) {
  if (points.cols() != model.basis().dim()) {
    throw std::invalid_argument("predict_ssgp: dimension mismatch");
  }
  const double noise = model.params().noise_variance;
  BatchPrediction out;
  if (model.data().empty()) {
    out.mean = Eigen::VectorXd::Zero(points.rows());
    out.variance = Eigen::VectorXd::Constant(points.rows(), model.params().signal_variance);
    if (include_noise) out.variance.array() += noise;
    return out;
  }
  const Eigen::MatrixXd psi = feature_matrix(points, model.basis());
  out.mean = psi.transpose() * model.weight_mean();
  out.variance = noise * model.half_solve(psi).colwise().squaredNorm().transpose();
  if (include_noise) out.variance.array() += noise;
  return out;
}

namespace {

/// Y^T Y - Y^T Phi^T A^{-1} Phi Y, evaluated as |Y - Phi^T w|^2 + c |w|^2 to
/// avoid cancellation when the fit is close.
double data_fit_quadratic(const SsgpPosterior& model) {
  const Eigen::VectorXd residual =
      model.data().targets - model.phi_matrix().transpose() * model.weight_mean();
  return residual.squaredNorm() + model.ridge() * model.weight_mean().squaredNorm();
}

}  // namespace

double ssgp_log_marginal(const SsgpPosterior& model) {
  const double noise = model.params().noise_variance;
  const int t = model.data().size();
  const int m = model.basis().size();
  const double log_det = 2.0 * model.a_factor().diagonal().array().log().sum();
  return -data_fit_quadratic(model) / (2.0 * noise) - 0.5 * log_det + m * std::log(model.ridge()) -
         0.5 * t * std::log(kTwoPi * noise);
}

LogMarginalGradient ssgp_log_marginal_grad(const SsgpPosterior& model) {
  const double noise = model.params().noise_variance;
  const double ridge = model.ridge();
  const int t = model.data().size();
  const int m = model.basis().size();
  const int d = model.basis().dim();
  const Eigen::VectorXd& w = model.weight_mean();
  const Eigen::MatrixXd& phi = model.phi_matrix();

  LogMarginalGradient grad;
  grad.frequencies = Eigen::MatrixXd::Zero(m, d);
  if (t > 0) {
    const Eigen::VectorXd residual = model.data().targets - phi.transpose() * w;
    const Eigen::MatrixXd phi_grad = (w * residual.transpose()) / noise - model.solve(phi);
    grad.frequencies = chain_feature_gradient(phi_grad, phi, model.data().inputs);
  }

  const int k = model.basis().feature_count();
  const Eigen::MatrixXd inv_factor = model.half_solve(Eigen::MatrixXd::Identity(k, k));
  const double trace_inv = inv_factor.squaredNorm();
  const double d_ridge = -w.squaredNorm() / (2.0 * noise) - 0.5 * trace_inv + m / ridge;
  const double quad = data_fit_quadratic(model);

  grad.log_noise_variance = quad / (2.0 * noise) - 0.5 * t + ridge * d_ridge;
  grad.log_signal_variance = -ridge * d_ridge;
  grad.log_lengthscales =
      -(model.basis().frequencies().array() * grad.frequencies.array()).colwise().sum().transpose();
  return grad;
}

Eigen::VectorXd sample_posterior_weights(const SsgpPosterior& model, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int k = model.basis().feature_count();
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z(i) = normal(rng);
  const auto lower = model.a_factor().triangularView<Eigen::Lower>();
  return model.weight_mean() + std::sqrt(model.params().noise_variance) * lower.transpose().solve(z);
}

Eigen::MatrixXd chain_feature_gradient(const Eigen::MatrixXd& feature_grad,
                                       const Eigen::MatrixXd& features,
                                       const Eigen::MatrixXd& points) {
  const Eigen::Index m = features.rows() / 2;
  const Eigen::Index n = features.cols();
  Eigen::MatrixXd per_point(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index r = 0; r < m; ++r) {
      per_point(r, j) = feature_grad(2 * r + 1, j) * features(2 * r, j) -
                        feature_grad(2 * r, j) * features(2 * r + 1, j);
    }
  }
  return kTwoPi * per_point * points;
}

}  // namespace rssgp
