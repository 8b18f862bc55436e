#include "rssgp/gmd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>
#include <spdlog/spdlog.h>

#include "rssgp/acquisition.hpp"
#include "rssgp/errors.hpp"
#include "rssgp/parallel.hpp"

namespace rssgp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> cell_of(const Eigen::VectorXd& x, const SearchBox& box, int bins) {
  std::vector<int> cell(static_cast<std::size_t>(box.dim()));
  for (int l = 0; l < box.dim(); ++l) {
    const double u = (x(l) - box.lower()(l)) / (box.upper()(l) - box.lower()(l));
    cell[static_cast<std::size_t>(l)] =
        std::clamp(static_cast<int>(std::floor(u * bins)), 0, bins - 1);
  }
  return cell;
}

Eigen::VectorXd cell_center(const std::vector<int>& cell, const SearchBox& box, int bins) {
  Eigen::VectorXd u(box.dim());
  for (int l = 0; l < box.dim(); ++l) u(l) = (cell[static_cast<std::size_t>(l)] + 0.5) / bins;
  return box.from_unit(u);
}

std::map<std::vector<int>, double> bin_mass(std::span<const Eigen::VectorXd> points,
                                            std::span<const double> weights, const SearchBox& box,
                                            int bins) {
  std::map<std::vector<int>, double> cells;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cells[cell_of(points[i], box, bins)] += weights.empty() ? 1.0 : weights[i];
  }
  return cells;
}

/// f(x) = phi(x)^T theta and its gradient.
double sampled_value(const SpectralBasis& basis, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& x, Eigen::VectorXd* gradient) {
  const Eigen::VectorXd phase = kTwoPi * (basis.frequencies() * x);
  double value = 0.0;
  Eigen::VectorXd slope(basis.size());
  for (int r = 0; r < basis.size(); ++r) {
    const double c = std::cos(phase(r));
    const double s = std::sin(phase(r));
    value += theta(2 * r) * c + theta(2 * r + 1) * s;
    slope(r) = theta(2 * r + 1) * c - theta(2 * r) * s;
  }
  if (gradient) *gradient = kTwoPi * (basis.frequencies().transpose() * slope);
  return value;
}

void validate_smc(const SmcConfig& config) {
  if (config.particles < 2) throw std::invalid_argument("gmd_smc: need at least 2 particles");
  if (config.challengers < 1) throw std::invalid_argument("gmd_smc: need at least 1 challenger");
  if (!(config.mixture >= 0.0 && config.mixture < 1.0)) {
    throw std::invalid_argument("gmd_smc: mixture weight alpha must lie in [0, 1)");
  }
  if (config.rounds < 0) throw std::invalid_argument("gmd_smc: rounds must be >= 0");
}

/// Normalized Gaussian kernel density with per-dimension standard deviation
/// equal to the lengthscales; the density of the perturbation proposal.
double perturbation_density(const Eigen::VectorXd& x, const Eigen::VectorXd& center,
                            const Eigen::VectorXd& lengthscales) {
  const double r2 = ((x - center).array() / lengthscales.array()).square().sum();
  const double norm = std::pow(kTwoPi, 0.5 * static_cast<double>(x.size())) * lengthscales.prod();
  return std::exp(-0.5 * r2) / norm;
}

}  // namespace

double entropy_of(std::span<const double> pmf) {
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::invalid_argument("entropy_of: negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("entropy_of: probabilities sum to " + std::to_string(total));
  }
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

MaxDistribution histogram_distribution(std::span<const Eigen::VectorXd> points,
                                       std::span<const double> weights, const SearchBox& box,
                                       int bins) {
  if (points.empty()) throw std::invalid_argument("histogram_distribution: no points");
  if (!weights.empty() && weights.size() != points.size()) {
    throw std::invalid_argument("histogram_distribution: weight count mismatch");
  }
  if (bins < 1) throw std::invalid_argument("histogram_distribution: bins must be >= 1");
  const auto cells = bin_mass(points, weights, box, bins);
  double total = 0.0;
  for (const auto& [cell, mass] : cells) total += mass;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("histogram_distribution: total weight must be positive");
  }
  MaxDistribution out;
  for (const auto& [cell, mass] : cells) {
    out.support.push_back(cell_center(cell, box, bins));
    out.pmf.push_back(mass / total);
  }
  out.entropy = entropy_of(out.pmf);
  return out;
}

double total_variation(const MaxDistribution& p, const MaxDistribution& q, const SearchBox& box,
                       int bins) {
  const auto a = bin_mass(p.support, p.pmf, box, bins);
  const auto b = bin_mass(q.support, q.pmf, box, bins);
  double sum = 0.0;
  for (const auto& [cell, mass] : a) {
    const auto it = b.find(cell);
    sum += std::abs(mass - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [cell, mass] : b) {
    if (!a.contains(cell)) sum += mass;
  }
  return 0.5 * sum;
}

Eigen::VectorXd maximize_sampled_function(const SpectralBasis& basis,
                                          const Eigen::VectorXd& theta, const SearchBox& box,
                                          const ThompsonConfig& config, Rng& rng) {
  const int pool = std::max(config.candidate_pool, config.starts);
  std::vector<std::pair<double, Eigen::VectorXd>> candidates;
  candidates.reserve(static_cast<std::size_t>(pool));
  for (int i = 0; i < pool; ++i) {
    Eigen::VectorXd x = box.sample_uniform(rng);
    candidates.emplace_back(sampled_value(basis, theta, x, nullptr), std::move(x));
  }
  std::partial_sort(candidates.begin(), candidates.begin() + config.starts, candidates.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });

  const double scale = box.width().mean();
  Eigen::VectorXd best = candidates.front().second;
  double best_value = candidates.front().first;
  for (int s = 0; s < config.starts; ++s) {
    Eigen::VectorXd x = candidates[static_cast<std::size_t>(s)].second;
    Eigen::VectorXd grad;
    double value = sampled_value(basis, theta, x, &grad);
    double step = 0.0;
    for (int it = 0; it < config.ascent_iterations; ++it) {
      const double gnorm = grad.norm();
      if (!(gnorm > 0.0)) break;
      if (step == 0.0) step = 0.01 * scale / gnorm;
      const Eigen::VectorXd trial = box.clamp(x + step * grad);
      Eigen::VectorXd trial_grad;
      const double trial_value = sampled_value(basis, theta, trial, &trial_grad);
      if (trial_value > value) {
        const double moved = (trial - x).norm();
        x = trial;
        value = trial_value;
        grad = std::move(trial_grad);
        step *= 1.5;
        if (moved < 1e-9 * scale) break;
      } else {
        step *= 0.5;
        if (step * gnorm < 1e-9 * scale) break;
      }
    }
    if (value > best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

std::vector<Eigen::VectorXd> thompson_maximizers(const SsgpPosterior& model, const SearchBox& box,
                                                 const ThompsonConfig& config, Rng& rng) {
  if (box.dim() != model.basis().dim()) throw std::invalid_argument("gmd_thompson: box dimension");
  if (config.starts < 1) throw std::invalid_argument("gmd_thompson: need at least one start");
  const std::uint64_t base = rng();

  const auto draw = [&](std::size_t i) -> std::optional<Eigen::VectorXd> {
    Rng local = make_rng(base, i);
    try {
      Eigen::VectorXd x;
      if (config.resample_features) {
        const SpectralBasis basis =
            sample_frequencies(model.params(), model.basis().size(), local);
        const SsgpPosterior refit = fit_ssgp(model.data(), basis, model.params());
        const Eigen::VectorXd theta = sample_posterior_weights(refit, local);
        x = maximize_sampled_function(basis, theta, box, config, local);
      } else {
        const Eigen::VectorXd theta = sample_posterior_weights(model, local);
        x = maximize_sampled_function(model.basis(), theta, box, config, local);
      }
      if (!x.allFinite()) return std::nullopt;
      return x;
    } catch (const std::exception& e) {
      spdlog::debug("gmd_thompson: sample {} failed: {}", i, e.what());
      return std::nullopt;
    }
  };

  std::vector<std::optional<Eigen::VectorXd>> results;
  if (config.time_budget > 0.0) {
    const auto start = Clock::now();
    while (seconds_since(start) < config.time_budget) results.push_back(draw(results.size()));
  } else {
    if (config.samples < 1) throw std::invalid_argument("thompson_maximizers: samples must be >= 1");
    results.resize(static_cast<std::size_t>(config.samples));
    parallel_for(results.size(), config.workers, [&](std::size_t i) { results[i] = draw(i); });
  }

  std::vector<Eigen::VectorXd> maximizers;
  maximizers.reserve(results.size());
  for (auto& r : results) {
    if (r) maximizers.push_back(std::move(*r));
  }
  const std::size_t failed = results.size() - maximizers.size();
  if (failed > 0) {
    spdlog::warn("gmd_thompson: skipped {} of {} samples", failed, results.size());
    if (static_cast<double>(failed) >= 0.01 * static_cast<double>(results.size())) {
      throw NumericalError("gmd_thompson: inner maximization failed on >= 1% of samples");
    }
  }
  return maximizers;
}

MaxDistribution gmd_thompson(const SsgpPosterior& model, const SearchBox& box,
                             const ThompsonConfig& config, Rng& rng) {
  if (config.time_budget <= 0.0 && config.samples < 100) {
    throw std::invalid_argument("gmd_thompson: need at least 100 samples");
  }
  const auto maximizers = thompson_maximizers(model, box, config, rng);
  return histogram_distribution(maximizers, {}, box, config.bins);
}

double smc_challenger_weight(const Eigen::VectorXd& x, const Eigen::VectorXd& seed,
                             const Eigen::VectorXd& lengthscales, double alpha, double beta) {
  if (alpha == 0.0) return 1.0;
  return beta / (alpha * perturbation_density(x, seed, lengthscales) + (1.0 - alpha) * beta);
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count,
                                             Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (weights.empty() || !(total > 0.0)) {
    throw std::invalid_argument("systematic_resample: weights must have positive total");
  }
  const double stride = total / static_cast<double>(count);
  double target = std::uniform_real_distribution<double>(0.0, stride)(rng);
  std::vector<std::size_t> picks;
  picks.reserve(count);
  std::size_t i = 0;
  double cumulative = weights[0];
  for (std::size_t j = 0; j < count; ++j) {
    while (cumulative < target && i + 1 < weights.size()) cumulative += weights[++i];
    picks.push_back(i);
    target += stride;
  }
  return picks;
}

SmcResult gmd_smc(const SsgpPosterior& model, const SearchBox& box, const SmcConfig& config,
                  const std::optional<ParticleSet>& warm_start, Rng& rng) {
  validate_smc(config);
  if (box.dim() != model.basis().dim()) throw std::invalid_argument("gmd_smc: box dimension");
  const double beta = 1.0 / box.volume();
  const Eigen::VectorXd& lengthscales = model.params().lengthscales;

  ParticleSet set;
  set.flat_density = beta;
  if (warm_start) {
    if (warm_start->positions.size() < 2 ||
        warm_start->positions.size() != warm_start->weights.size()) {
      throw std::invalid_argument("gmd_smc: malformed warm-start particle set");
    }
    for (const auto& x : warm_start->positions) {
      if (!box.contains(x)) throw std::invalid_argument("gmd_smc: warm-start particle outside box");
    }
    set.positions = warm_start->positions;
    set.weights = warm_start->weights;
  } else {
    const auto n = static_cast<std::size_t>(config.particles);
    set.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) set.positions.push_back(box.sample_uniform(rng));
    set.weights.assign(n, 1.0);
  }
  const std::size_t n = set.positions.size();

  const auto start = Clock::now();
  int rounds = 0;
  while (config.time_budget > 0.0 ? seconds_since(start) < config.time_budget
                                  : rounds < config.rounds) {
    const std::uint64_t round_seed = rng();
    std::vector<double> cumulative(n);
    std::partial_sum(set.weights.begin(), set.weights.end(), cumulative.begin());
    const double total = cumulative.back();

    std::vector<Eigen::VectorXd> next_positions = set.positions;
    std::vector<double> next_weights = set.weights;
    parallel_for(n, config.workers, [&](std::size_t i) {
      Rng local = make_rng(round_seed, i);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::normal_distribution<double> normal(0.0, 1.0);

      Eigen::MatrixXd challengers(config.challengers, box.dim());
      std::vector<double> challenger_weights(static_cast<std::size_t>(config.challengers));
      for (int c = 0; c < config.challengers; ++c) {
        const double u = unit(local) * total;
        const auto seed_index = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                         cumulative.begin(),
                                     static_cast<std::ptrdiff_t>(n - 1)));
        const Eigen::VectorXd& seed = set.positions[seed_index];
        Eigen::VectorXd x;
        if (unit(local) < config.mixture) {
          for (int attempt = 0; attempt < 100; ++attempt) {
            x = seed;
            for (int l = 0; l < box.dim(); ++l) x(l) += lengthscales(l) * normal(local);
            if (box.contains(x)) break;
          }
          x = box.clamp(x);
        } else {
          x = box.sample_uniform(local);
        }
        challengers.row(c) = x.transpose();
        challenger_weights[static_cast<std::size_t>(c)] =
            smc_challenger_weight(x, seed, lengthscales, config.mixture, beta);
      }

      // One joint draw over the incumbent particle and all challengers.
      const Eigen::VectorXd theta = sample_posterior_weights(model, local);
      const double incumbent = feature_map(set.positions[i], model.basis()).dot(theta);
      const Eigen::VectorXd values =
          feature_matrix(challengers, model.basis()).transpose() * theta;
      Eigen::Index winner = 0;
      const double best = values.maxCoeff(&winner);
      if (best > incumbent) {
        next_positions[i] = challengers.row(winner).transpose();
        next_weights[i] = challenger_weights[static_cast<std::size_t>(winner)];
      }
    });

    const double next_total = std::accumulate(next_weights.begin(), next_weights.end(), 0.0);
    if (!(next_total > 0.0) || !std::isfinite(next_total)) {
      spdlog::warn("gmd_smc: particle weights underflowed; resetting to uniform");
      std::fill(next_weights.begin(), next_weights.end(), 1.0);
    }
    const auto picks = systematic_resample(next_weights, n, rng);
    for (std::size_t j = 0; j < n; ++j) set.positions[j] = next_positions[picks[j]];
    std::fill(set.weights.begin(), set.weights.end(), 1.0);
    ++rounds;
  }

  SmcResult result;
  result.distribution = histogram_distribution(set.positions, set.weights, box, config.bins);
  result.particles = std::move(set);
  result.rounds_run = rounds;
  return result;
}

MaxDistribution gmd_ei_proxy(const SsgpPosterior& model, const SearchBox& box, double incumbent,
                             const Eigen::MatrixXd& design) {
  if (design.rows() == 0) throw std::invalid_argument("gmd_ei_proxy: empty design");
  if (design.cols() != box.dim()) throw std::invalid_argument("gmd_ei_proxy: design dimension");
  const BatchPrediction pred = predict_ssgp_batch(model, design, false);
  // Normalized in log space so a posterior far below the incumbent still has a shape.
  std::vector<double> log_ei(static_cast<std::size_t>(design.rows()));
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const double v = log_expected_improvement(pred.mean(i),
                                              std::sqrt(std::max(pred.variance(i), 0.0)), incumbent);
    log_ei[static_cast<std::size_t>(i)] = v;
    top = std::max(top, v);
  }
  MaxDistribution out;
  out.support.reserve(log_ei.size());
  for (Eigen::Index i = 0; i < design.rows(); ++i) out.support.push_back(design.row(i).transpose());
  if (!std::isfinite(top)) {
    spdlog::warn("gmd_ei_proxy: expected improvement vanishes on the design; using uniform PMF");
    out.pmf.assign(log_ei.size(), 1.0 / static_cast<double>(log_ei.size()));
  } else {
    out.pmf.resize(log_ei.size());
    double total = 0.0;
    for (std::size_t i = 0; i < log_ei.size(); ++i) {
      out.pmf[i] = std::exp(log_ei[i] - top);
      total += out.pmf[i];
    }
    for (double& p : out.pmf) p /= total;
  }
  out.entropy = entropy_of(out.pmf);
  return out;
}

Eigen::MatrixXd ei_proxy_design(const SearchBox& box, int grid_points, int scattered_points,
                                std::uint64_t seed) {
  const int d = box.dim();
  if (d <= 2) {
    if (grid_points < 2) throw std::invalid_argument("ei_proxy_design: grid needs >= 2 points");
    const Eigen::Index total = d == 1 ? grid_points : static_cast<Eigen::Index>(grid_points) * grid_points;
    Eigen::MatrixXd design(total, d);
    for (Eigen::Index i = 0; i < total; ++i) {
      Eigen::VectorXd u(d);
      Eigen::Index rest = i;
      for (int l = 0; l < d; ++l) {
        u(l) = static_cast<double>(rest % grid_points) / (grid_points - 1);
        rest /= grid_points;
      }
      design.row(i) = box.from_unit(u).transpose();
    }
    return design;
  }
  if (scattered_points < 1) throw std::invalid_argument("ei_proxy_design: need points");
  boost::random::sobol sobol(static_cast<std::size_t>(d));
  boost::random::uniform_01<double> to_unit;
  Rng rng(seed);
  std::uniform_real_distribution<double> shift_dist(0.0, 1.0);
  Eigen::VectorXd shift(d);
  for (int l = 0; l < d; ++l) shift(l) = shift_dist(rng);
  Eigen::MatrixXd design(scattered_points, d);
  for (int i = 0; i < scattered_points; ++i) {
    Eigen::VectorXd u(d);
    for (int l = 0; l < d; ++l) {
      const double v = to_unit(sobol) + shift(l);
      u(l) = v - std::floor(v);
    }
    design.row(i) = box.from_unit(u).transpose();
  }
  return design;
}

}  // namespace rssgp
