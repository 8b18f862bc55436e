#pragma once

// Reference computations used as independent oracles by the tests. They use
// the most direct formulas available (explicit inverses, full determinants,
// closed-form sums) and share no code with the library beyond its types.

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "rssgp/dataset.hpp"
#include "rssgp/random.hpp"
#include "rssgp/spectral_kernel.hpp"

namespace oracle {

using Kernel = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

inline double se(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const rssgp::KernelParams& p) {
  double r2 = 0.0;
  for (Eigen::Index l = 0; l < a.size(); ++l) r2 += std::pow((a(l) - b(l)) / p.lengthscales(l), 2);
  return p.signal_variance * std::exp(-0.5 * r2);
}

inline double cosine_sum(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const Eigen::MatrixXd& s, double signal_variance) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    double phase = 0.0;
    for (Eigen::Index l = 0; l < a.size(); ++l) phase += s(r, l) * (a(l) - b(l));
    sum += std::cos(2.0 * std::numbers::pi * phase);
  }
  return signal_variance / static_cast<double>(s.rows()) * sum;
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& x, const Kernel& k) {
  Eigen::MatrixXd g(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) g(i, j) = k(x.row(i).transpose(), x.row(j).transpose());
  }
  return g;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Latent posterior via an explicit inverse of K + noise I.
inline Moments dense_predict(const rssgp::Dataset& d, const Kernel& k, double noise,
                             const Eigen::VectorXd& x) {
  const Eigen::Index t = d.inputs.rows();
  if (t == 0) return {0.0, k(x, x)};
  const Eigen::MatrixXd inv =
      (gram(d.inputs, k) + noise * Eigen::MatrixXd::Identity(t, t)).inverse();
  Eigen::VectorXd kx(t);
  for (Eigen::Index i = 0; i < t; ++i) kx(i) = k(d.inputs.row(i).transpose(), x);
  return {kx.dot(inv * d.targets), k(x, x) - kx.dot(inv * kx)};
}

/// log N(Y | 0, K + noise I) with the determinant from a full LU.
inline double dense_log_marginal(const rssgp::Dataset& d, const Kernel& k, double noise) {
  const Eigen::Index t = d.inputs.rows();
  if (t == 0) return 0.0;
  const Eigen::MatrixXd c = gram(d.inputs, k) + noise * Eigen::MatrixXd::Identity(t, t);
  const double log_det = std::log(c.fullPivLu().determinant());
  return -0.5 * d.targets.dot(c.inverse() * d.targets) - 0.5 * log_det -
         0.5 * static_cast<double>(t) * std::log(2.0 * std::numbers::pi);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                                      rssgp::Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi, rssgp::Rng& rng) {
  return uniform_matrix(n, 1, lo, hi, rng);
}

}  // namespace oracle
