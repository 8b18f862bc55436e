#include "rssgp/bo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "rssgp/acquisition.hpp"
#include "rssgp/errors.hpp"
#include "rssgp/full_gp.hpp"
#include "rssgp/parallel.hpp"
#include "rssgp/ssgp.hpp"

namespace rssgp {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kFullGp:
      return "full_gp";
    case ModelKind::kSsgp:
      return "ssgp";
    case ModelKind::kRssgp:
      return "rssgp";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "full_gp") return ModelKind::kFullGp;
  if (name == "ssgp") return ModelKind::kSsgp;
  if (name == "rssgp") return ModelKind::kRssgp;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

namespace {

double observe(const Objective& objective, const Eigen::VectorXd& x, double noise, Rng& rng) {
  double y = objective.evaluate_for_max(x);
  if (noise > 0.0) y += noise * std::normal_distribution<double>(0.0, 1.0)(rng);
  return y;
}

// Inputs mapped to the unit cube and targets standardized, as configured.
Dataset to_model_space(const Dataset& data, const SearchBox& box, const ModelConfig& model) {
  Dataset out = data;
  if (model.normalize_inputs) {
    out.inputs = ((data.inputs.rowwise() - box.lower().transpose()).array().rowwise() /
                  box.width().transpose().array())
                     .matrix();
  }
  if (model.standardize_outputs) {
    const double mean = data.targets.mean();
    const double sd = std::sqrt((data.targets.array() - mean).square().mean());
    out.targets = (data.targets.array() - mean) / (sd > 0.0 ? sd : 1.0);
  }
  return out;
}

}  // namespace

Dataset initial_design(const Objective& objective, int count, double observation_noise, Rng& rng) {
  if (count < 1) throw std::invalid_argument("initial_design: count must be >= 1");
  Dataset data(objective.dim);
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd x = objective.box.sample_uniform(rng);
    data.append(x, observe(objective, x, observation_noise, rng));
  }
  return data;
}

BoTrace run_bo(const Objective& objective, const ModelConfig& model, const Dataset& init_data,
               int iterations, Rng& rng) {
  if (init_data.empty()) throw std::invalid_argument("run_bo: initial data must be nonempty");
  if (iterations < 1) throw std::invalid_argument("run_bo: iterations must be >= 1");
  if (init_data.dim() != objective.dim) throw std::invalid_argument("run_bo: dimension mismatch");
  if (model.features < 1) throw std::invalid_argument("run_bo: features must be >= 1");
  model.params.validate();
  model.rssgp.validate();

  const SearchBox& box = objective.box;
  const SearchBox model_box = model.normalize_inputs ? SearchBox::cube(objective.dim, 0.0, 1.0) : box;
  Dataset data = init_data;
  data.warn_outside(box);
  double incumbent = data.targets.maxCoeff();
  KernelParams params = model.params;
  std::optional<SpectralBasis> basis;

  RssgpConfig rssgp = model.rssgp;
  if (model.kind == ModelKind::kSsgp) rssgp.lambda = 0.0;

  BoTrace trace;
  trace.records.reserve(static_cast<std::size_t>(iterations));
  for (int it = 1; it <= iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    BoRecord record;
    record.iteration = it;
    record.entropy = std::numeric_limits<double>::quiet_NaN();

    const Dataset scaled = to_model_space(data, box, model);
    const double scaled_incumbent = scaled.targets.maxCoeff();
    AcquisitionResult next;
    if (model.kind == ModelKind::kFullGp) {
      try {
        const FullGpPosterior gp = fit_full_gp(scaled, params);
        next = maximize_acquisition(gp, model_box, scaled_incumbent, model.direct_budget);
      } catch (const IllConditionedError& e) {
        spdlog::warn("run_bo: iteration {}: full GP failed ({}); using the prior", it, e.what());
        record.model_failed = true;
        const double prior_variance = params.signal_variance;
        next = maximize_acquisition(
            [prior_variance](const Eigen::VectorXd&) { return Prediction{0.0, prior_variance}; },
            model_box, scaled_incumbent, model.direct_budget);
      }
    } else {
      if (!basis || !model.warm_start) {
        basis = sample_frequencies(params, model.features, rng);
      }
      const OptimizationResult opt =
          optimize_frequencies(scaled, *basis, params, rssgp, model_box, rng);
      basis = opt.basis;
      params = opt.params;
      record.entropy = opt.best.entropy;
      const SsgpPosterior ssgp = fit_ssgp(scaled, *basis, params);
      next = maximize_acquisition(ssgp, model_box, scaled_incumbent, model.direct_budget);
    }
    if (model.normalize_inputs) next.x_next = box.clamp(box.from_unit(next.x_next));

    record.query = next.x_next;
    record.y = observe(objective, next.x_next, model.observation_noise, rng);
    data.append(record.query, record.y);
    incumbent = std::max(incumbent, record.y);
    record.incumbent = incumbent;
    record.regret = simple_regret(objective.to_native(incumbent), objective);
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(std::move(record));
  }
  return trace;
}

TrialAggregate run_trials(const TrialSpec& spec, int trials, std::uint64_t base_seed,
                          int workers) {
  if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
  std::vector<std::optional<BoTrace>> results(static_cast<std::size_t>(trials));
  parallel_for(results.size(), workers, [&](std::size_t k) {
    Rng rng = make_rng(base_seed, k);
    try {
      const Dataset init =
          initial_design(spec.objective, spec.init_points, spec.model.observation_noise, rng);
      results[k] = run_bo(spec.objective, spec.model, init, spec.iterations, rng);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      spdlog::warn("run_trials: trial {} failed: {}", k, e.what());
    }
  });

  TrialAggregate out;
  std::vector<const BoTrace*> ok;
  for (int k = 0; k < trials; ++k) {
    if (results[k]) {
      out.traces.push_back(*results[k]);
      ok.push_back(&*results[k]);
    } else {
      out.traces.emplace_back();
      out.failed_trials.push_back(k);
    }
  }
  if (!out.failed_trials.empty() && out.failed_trials.size() * 10 >= static_cast<std::size_t>(trials)) {
    throw NumericalError("run_trials: " + std::to_string(out.failed_trials.size()) + " of " +
                         std::to_string(trials) + " trials failed");
  }

  const std::size_t n = ok.size();
  out.mean_regret.assign(static_cast<std::size_t>(spec.iterations), 0.0);
  out.std_error.assign(static_cast<std::size_t>(spec.iterations), 0.0);
  for (int i = 0; i < spec.iterations; ++i) {
    double sum = 0.0;
    for (const BoTrace* t : ok) sum += t->records[i].regret;
    const double mean = sum / static_cast<double>(n);
    double squares = 0.0;
    for (const BoTrace* t : ok) squares += std::pow(t->records[i].regret - mean, 2);
    out.mean_regret[i] = mean;
    out.std_error[i] =
        n > 1 ? std::sqrt(squares / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  }
  return out;
}

}  // namespace rssgp
