#include "rssgp/full_gp.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "rssgp/errors.hpp"

namespace rssgp {

namespace {

constexpr double kFirstJitter = 1e-10;
constexpr double kLastJitter = 1e-4;
constexpr double kResidualTolerance = 1e-6;

}  // namespace

FullGpPosterior fit_full_gp(const Dataset& data, const KernelParams& params) {
  return fit_full_gp(data, params, [params](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return se_kernel(a, b, params);
  });
}

FullGpPosterior fit_full_gp(const Dataset& data, const KernelParams& params,
                            CovarianceFn covariance) {
  params.validate();
  if (data.dim() != params.dim()) throw std::invalid_argument("fit_full_gp: dimension mismatch");

  FullGpPosterior model;
  model.data_ = data;
  model.params_ = params;
  model.covariance_ = std::move(covariance);

  const int t = data.size();
  Eigen::MatrixXd gram(t, t);
  for (int i = 0; i < t; ++i) {
    const Eigen::VectorXd xi = data.inputs.row(i).transpose();
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = model.covariance_(xi, data.inputs.row(j).transpose());
      gram(j, i) = gram(i, j);
    }
  }
  gram.diagonal().array() += params.noise_variance;

  const double y_norm = data.targets.norm();
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd alpha = llt.solve(data.targets);
      const double residual = (gram * alpha - data.targets).norm();
      if (alpha.allFinite() && residual <= kResidualTolerance * y_norm) {
        if (jitter > 0.0) spdlog::debug("fit_full_gp: accepted jitter {}", jitter);
        model.gram_factor_ = llt.matrixL();
        model.alpha_ = std::move(alpha);
        model.jitter_ = jitter;
        return model;
      }
    }
    const double next = jitter == 0.0 ? kFirstJitter * params.signal_variance : jitter * 10.0;
    if (next > kLastJitter * params.signal_variance * (1.0 + 1e-9)) {
      throw IllConditionedError("fit_full_gp: Gram matrix of " + std::to_string(t) +
                                    " points is ill-conditioned; final jitter " +
                                    std::to_string(jitter),
                                jitter);
    }
    jitter = next;
  }
}

Prediction predict_full_gp(const FullGpPosterior& model, const Eigen::VectorXd& x,
                           bool include_noise) {
  const auto& params = model.params();
  if (x.size() != params.dim()) throw std::invalid_argument("predict_full_gp: dimension mismatch");
  const double prior = model.covariance(x, x);
  const double noise = include_noise ? params.noise_variance : 0.0;
  const Dataset& data = model.data();
  if (data.empty()) return {0.0, prior + noise};

  Eigen::VectorXd k(data.size());
  for (int i = 0; i < data.size(); ++i) k(i) = model.covariance(x, data.inputs.row(i).transpose());
  const auto factor = model.gram_factor().triangularView<Eigen::Lower>();
  const Eigen::VectorXd v = factor.solve(k);
  double variance = prior - v.squaredNorm();
  if (variance < 0.0) {
    if (variance < -1e-10 * params.signal_variance) {
      spdlog::warn("predict_full_gp: negative latent variance {} clamped to 0", variance);
    }
    variance = 0.0;
  }
  return {k.dot(model.alpha()), variance + noise};
}

}  // namespace rssgp
