#include "rssgp/rssgp_objective.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "rssgp/acquisition.hpp"

namespace rssgp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Optimization coordinates: whitened frequencies 2 pi rho_l s_{r,l} (row-major),
// then, when learning the kernel, log rho_l, log sigma_f^2, log sigma_n^2.
struct Point {
  SpectralBasis basis;
  KernelParams params;
};

Eigen::VectorXd pack(const SpectralBasis& basis, const KernelParams& params, bool learn_kernel) {
  const int m = basis.size();
  const int d = basis.dim();
  Eigen::VectorXd theta(m * d + (learn_kernel ? d + 2 : 0));
  for (int r = 0; r < m; ++r) {
    for (int l = 0; l < d; ++l) {
      theta(r * d + l) = kTwoPi * params.lengthscales(l) * basis.frequencies()(r, l);
    }
  }
  if (learn_kernel) {
    theta.segment(m * d, d) = params.lengthscales.array().log().matrix();
    theta(m * d + d) = std::log(params.signal_variance);
    theta(m * d + d + 1) = std::log(params.noise_variance);
  }
  return theta;
}

Point unpack(const Eigen::VectorXd& theta, int m, const KernelParams& fixed, bool learn_kernel) {
  const int d = fixed.dim();
  KernelParams params = fixed;
  if (learn_kernel) {
    params.lengthscales = theta.segment(m * d, d).array().exp().matrix();
    params.signal_variance = std::exp(theta(m * d + d));
    params.noise_variance = std::exp(theta(m * d + d + 1));
  }
  Eigen::MatrixXd s(m, d);
  for (int r = 0; r < m; ++r) {
    for (int l = 0; l < d; ++l) s(r, l) = theta(r * d + l) / (kTwoPi * params.lengthscales(l));
  }
  return {SpectralBasis(std::move(s)), std::move(params)};
}

// Maps d/ds (m x d) plus log-parameter derivatives onto the packed coordinates.
Eigen::VectorXd pack_gradient(const Eigen::MatrixXd& d_frequencies, const Point& at,
                              bool learn_kernel, double d_log_signal, double d_log_noise) {
  const int m = at.basis.size();
  const int d = at.basis.dim();
  Eigen::VectorXd g(m * d + (learn_kernel ? d + 2 : 0));
  for (int r = 0; r < m; ++r) {
    for (int l = 0; l < d; ++l) {
      g(r * d + l) = d_frequencies(r, l) / (kTwoPi * at.params.lengthscales(l));
    }
  }
  if (learn_kernel) {
    // Holding whitened frequencies fixed, s_{.,l} scales as 1 / rho_l.
    g.segment(m * d, d) = -(at.basis.frequencies().array() * d_frequencies.array())
                               .colwise()
                               .sum()
                               .transpose()
                               .matrix();
    g(m * d + d) = d_log_signal;
    g(m * d + d + 1) = d_log_noise;
  }
  return g;
}

double regularizer(double entropy, const RssgpConfig& config) {
  return config.lambda * std::log(std::max(entropy, config.entropy_floor));
}

}  // namespace

std::string_view to_string(GmdEstimator estimator) {
  switch (estimator) {
    case GmdEstimator::kThompson:
      return "thompson";
    case GmdEstimator::kSmc:
      return "smc";
    case GmdEstimator::kEiProxy:
      return "ei_proxy";
  }
  return "unknown";
}

GmdEstimator parse_gmd_estimator(std::string_view name) {
  if (name == "thompson") return GmdEstimator::kThompson;
  if (name == "smc") return GmdEstimator::kSmc;
  if (name == "ei_proxy") return GmdEstimator::kEiProxy;
  throw std::invalid_argument("unknown GMD estimator '" + std::string(name) + "'");
}

void RssgpConfig::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("RssgpConfig: lambda must be >= 0");
  if (!(entropy_floor > 0.0)) throw std::invalid_argument("RssgpConfig: entropy floor must be > 0");
  if (optimizer_steps < 0) throw std::invalid_argument("RssgpConfig: optimizer steps must be >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("RssgpConfig: step size must be > 0");
  if (!(fd_step > 0.0)) throw std::invalid_argument("RssgpConfig: fd step must be > 0");
}

double observed_incumbent(const Dataset& data) {
  return data.empty() ? 0.0 : data.targets.maxCoeff();
}

namespace {

class EntropyEstimator {
 public:
  EntropyEstimator(const RssgpConfig& config, const SearchBox& box, double incumbent)
      : config_(config), box_(box), incumbent_(incumbent) {
    if (config.gmd_estimator == GmdEstimator::kEiProxy) {
      design_ = ei_proxy_design(box, config.ei_grid_points, config.ei_scattered_points, config.seed);
    }
  }

  const Eigen::MatrixXd& design() const { return design_; }

  /// `refresh` selects the cheap warm-started SMC update used for finite
  /// differences; otherwise the particle set is replaced by the new run.
  double estimate(const SsgpPosterior& model, Rng& rng, bool refresh) {
    switch (config_.gmd_estimator) {
      case GmdEstimator::kThompson:
        return gmd_thompson(model, box_, config_.thompson, rng).entropy;
      case GmdEstimator::kEiProxy:
        return gmd_ei_proxy(model, box_, incumbent_, design_).entropy;
      case GmdEstimator::kSmc: {
        SmcConfig smc = config_.smc;
        if (particles_) smc.rounds = config_.smc_refresh_rounds;
        SmcResult result = gmd_smc(model, box_, smc, particles_, rng);
        if (!refresh) particles_ = std::move(result.particles);
        return result.distribution.entropy;
      }
    }
    return kNaN;
  }

 private:
  const RssgpConfig& config_;
  const SearchBox& box_;
  double incumbent_;
  Eigen::MatrixXd design_;
  std::optional<ParticleSet> particles_;
};

}  // namespace

LossComponents rssgp_loss(const Dataset& data, const SpectralBasis& basis,
                          const KernelParams& params, const RssgpConfig& config,
                          const SearchBox& box, Rng& rng) {
  config.validate();
  const SsgpPosterior model = fit_ssgp(data, basis, params);
  const double log_ml = ssgp_log_marginal(model);
  if (config.lambda == 0.0) return {log_ml, log_ml, kNaN};
  EntropyEstimator estimator(config, box, observed_incumbent(data));
  const double entropy = estimator.estimate(model, rng, false);
  return {log_ml + regularizer(entropy, config), log_ml, entropy};
}

EntropyWithGradient ei_proxy_entropy_gradient(const SsgpPosterior& model, double incumbent,
                                              const Eigen::MatrixXd& design) {
  const SpectralBasis& basis = model.basis();
  const double noise = model.params().noise_variance;
  const Eigen::VectorXd& w = model.weight_mean();
  const Eigen::Index n = design.rows();
  if (n == 0) throw std::invalid_argument("ei_proxy_entropy_gradient: empty design");

  const Eigen::MatrixXd psi = feature_matrix(design, basis);
  const Eigen::VectorXd mean = psi.transpose() * w;
  const Eigen::MatrixXd half = model.half_solve(psi);
  const Eigen::VectorXd variance = noise * half.colwise().squaredNorm().transpose();

  Eigen::VectorXd log_ei(n), d_mean(n), d_std(n), sd(n);
  for (Eigen::Index g = 0; g < n; ++g) {
    sd(g) = std::sqrt(std::max(variance(g), 0.0));
    const EiPartials p = log_expected_improvement_partials(mean(g), sd(g), incumbent);
    log_ei(g) = p.value;
    d_mean(g) = p.d_mean;
    d_std(g) = p.d_std;
  }
  const double top = log_ei.maxCoeff();
  EntropyWithGradient out;
  out.frequencies = Eigen::MatrixXd::Zero(basis.size(), basis.dim());
  if (!std::isfinite(top)) {
    out.entropy = std::log(static_cast<double>(n));
    return out;
  }

  Eigen::VectorXd prob = (log_ei.array() - top).exp().matrix();
  prob /= prob.sum();
  double entropy = 0.0;
  for (Eigen::Index g = 0; g < n; ++g) {
    if (prob(g) > 0.0) entropy -= prob(g) * std::log(prob(g));
  }
  out.entropy = std::max(entropy, 0.0);

  // Adjoints of the entropy with respect to each grid mean and latent variance,
  // through dH/dlog_ei = -p (log p + H).
  Eigen::VectorXd adj_mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd adj_var = Eigen::VectorXd::Zero(n);
  for (Eigen::Index g = 0; g < n; ++g) {
    const double p = prob(g);
    if (!(p > 0.0) || !(sd(g) > 0.0)) continue;
    const double adj_log = -p * (std::log(p) + entropy);
    adj_mean(g) = adj_log * d_mean(g);
    adj_var(g) = adj_log * d_std(g) / (2.0 * sd(g));
  }

  const Eigen::MatrixXd a_inv_psi =
      model.a_factor().triangularView<Eigen::Lower>().transpose().solve(half);
  const Eigen::MatrixXd weighted = a_inv_psi * adj_var.asDiagonal();
  const Eigen::MatrixXd psi_grad = w * adj_mean.transpose() + 2.0 * noise * weighted;
  out.frequencies = chain_feature_gradient(psi_grad, psi, design);

  if (model.data().size() > 0) {
    const Eigen::MatrixXd& phi = model.phi_matrix();
    const Eigen::VectorXd& y = model.data().targets;
    const Eigen::VectorXd a = a_inv_psi * adj_mean;
    const Eigen::MatrixXd b = noise * weighted * a_inv_psi.transpose();
    const Eigen::MatrixXd phi_grad = a * (y - phi.transpose() * w).transpose() -
                                     w * (phi.transpose() * a).transpose() - 2.0 * b * phi;
    out.frequencies += chain_feature_gradient(phi_grad, phi, model.data().inputs);
  }
  return out;
}

OptimizationResult optimize_frequencies(const Dataset& data, const SpectralBasis& init_basis,
                                        const KernelParams& params, const RssgpConfig& config,
                                        const SearchBox& box, Rng& rng) {
  config.validate();
  params.validate();
  if (init_basis.dim() != params.dim() || data.dim() != params.dim()) {
    throw std::invalid_argument("optimize_frequencies: dimension mismatch");
  }
  const bool learn = config.learn_kernel;
  const int m = init_basis.size();
  const bool regularized = config.lambda > 0.0;
  const std::uint64_t run_seed = derive_seed(config.seed, rng());
  EntropyEstimator estimator(config, box, observed_incumbent(data));

  struct Evaluation {
    LossComponents loss;
    Eigen::VectorXd gradient;
  };

  const auto evaluate = [&](const Eigen::VectorXd& theta, std::uint64_t step) -> Evaluation {
    const Point at = unpack(theta, m, params, learn);
    const SsgpPosterior model = fit_ssgp(data, at.basis, at.params);
    Evaluation e;
    e.loss.log_ml = ssgp_log_marginal(model);
    const LogMarginalGradient g_ml = ssgp_log_marginal_grad(model);
    e.gradient = pack_gradient(g_ml.frequencies, at, learn, g_ml.log_signal_variance,
                               g_ml.log_noise_variance);
    if (!regularized) {
      e.loss.loss = e.loss.log_ml;
      e.loss.entropy = kNaN;
      return e;
    }

    const std::uint64_t crn_seed = derive_seed(run_seed, step);
    Eigen::VectorXd g_reg = Eigen::VectorXd::Zero(theta.size());
    double entropy = 0.0;
    const auto entropy_at = [&](const Eigen::VectorXd& shifted, bool refresh) {
      const Point p = unpack(shifted, m, params, learn);
      const SsgpPosterior shifted_model = fit_ssgp(data, p.basis, p.params);
      Rng crn(crn_seed);
      return estimator.estimate(shifted_model, crn, refresh);
    };
    const auto central_difference = [&](Eigen::Index k) {
      Eigen::VectorXd plus = theta;
      Eigen::VectorXd minus = theta;
      plus(k) += config.fd_step;
      minus(k) -= config.fd_step;
      return (regularizer(entropy_at(plus, true), config) -
              regularizer(entropy_at(minus, true), config)) /
             (2.0 * config.fd_step);
    };

    if (config.gmd_estimator == GmdEstimator::kEiProxy) {
      const EntropyWithGradient eg =
          ei_proxy_entropy_gradient(model, observed_incumbent(data), estimator.design());
      entropy = eg.entropy;
      if (entropy > config.entropy_floor) {
        g_reg = pack_gradient(eg.frequencies, at, learn, 0.0, 0.0) * (config.lambda / entropy);
      }
      if (learn) {
        const Eigen::Index base = theta.size() - 2;
        g_reg(base) = central_difference(base);
        g_reg(base + 1) = central_difference(base + 1);
      }
    } else {
      Rng crn(crn_seed);
      entropy = estimator.estimate(model, crn, false);
      for (Eigen::Index k = 0; k < theta.size(); ++k) g_reg(k) = central_difference(k);
    }
    e.loss.entropy = entropy;
    e.loss.loss = e.loss.log_ml + regularizer(entropy, config);
    e.gradient += g_reg;
    return e;
  };

  Eigen::VectorXd theta = pack(init_basis, params, learn);
  Evaluation current = evaluate(theta, 0);
  OptimizationResult result;
  result.basis = init_basis;
  result.params = params;
  result.best = current.loss;
  result.trace.push_back({current.loss.loss, current.loss.log_ml, current.loss.entropy});
  if (!std::isfinite(current.loss.loss)) {
    spdlog::warn("optimize_frequencies: non-finite loss at the initial basis");
    return result;
  }

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  Eigen::VectorXd first = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd second = Eigen::VectorXd::Zero(theta.size());
  double step_size = config.step_size;

  for (int step = 1; step <= config.optimizer_steps; ++step) {
    first = kBeta1 * first + (1.0 - kBeta1) * current.gradient;
    second = kBeta2 * second + (1.0 - kBeta2) * current.gradient.cwiseAbs2();
    const Eigen::VectorXd first_hat = first / (1.0 - std::pow(kBeta1, step));
    const Eigen::VectorXd second_hat = second / (1.0 - std::pow(kBeta2, step));
    const Eigen::VectorXd direction =
        (first_hat.array() / (second_hat.array().sqrt() + kEps)).matrix();

    bool accepted = false;
    for (int attempt = 0; attempt <= 5; ++attempt) {
      const Eigen::VectorXd candidate = theta + step_size * direction;
      Evaluation next;
      try {
        next = evaluate(candidate, static_cast<std::uint64_t>(step));
      } catch (const std::exception& e) {
        spdlog::debug("optimize_frequencies: step {} failed: {}", step, e.what());
        next.loss.loss = kNaN;
      }
      if (std::isfinite(next.loss.loss) && next.gradient.allFinite()) {
        theta = candidate;
        current = std::move(next);
        accepted = true;
        break;
      }
      step_size *= 0.5;
    }
    if (!accepted) {
      spdlog::warn("optimize_frequencies: stopping at step {} after repeated non-finite losses",
                   step);
      break;
    }
    result.trace.push_back({current.loss.loss, current.loss.log_ml, current.loss.entropy});
    if (current.loss.loss > result.best.loss) {
      const Point best = unpack(theta, m, params, learn);
      result.basis = best.basis;
      result.params = best.params;
      result.best = current.loss;
    }
  }
  return result;
}

}  // namespace rssgp
