#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rssgp/benchmarks.hpp"
#include "rssgp/dataset.hpp"
#include "rssgp/random.hpp"
#include "rssgp/rssgp_objective.hpp"
#include "rssgp/spectral_kernel.hpp"

namespace rssgp {

enum class ModelKind { kFullGp, kSsgp, kRssgp };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelConfig {
  ModelKind kind = ModelKind::kRssgp;
  int features = 20;  // m
  KernelParams params;
  /// Frequency optimization settings. The SSGP arm uses them with lambda = 0.
  RssgpConfig rssgp;
  int direct_budget = 1000;
  /// Standard deviation of additive Gaussian noise on evaluations (0: exact).
  double observation_noise = 0.0;
  /// Start each iteration's frequency optimization from the previous basis.
  bool warm_start = true;
  /// Model inputs on the unit cube; lengthscales are then in unit-cube units.
  /// Off by default: lengthscales are in the objective's native units.
  bool normalize_inputs = false;
  /// Model targets shifted and scaled to zero mean, unit variance each iteration.
  bool standardize_outputs = true;
};

struct BoRecord {
  int iteration = 0;
  Eigen::VectorXd query;
  double y = 0.0;          // maximization convention
  double incumbent = 0.0;  // maximization convention
  double regret = 0.0;     // native sense
  double entropy = 0.0;    // NaN when not computed
  double seconds = 0.0;
  bool model_failed = false;
};

struct BoTrace {
  std::vector<BoRecord> records;
};

/// Algorithm: optimize frequencies (SSGP/RSSGP), fit, maximize EI with DIRECT,
/// evaluate, augment. `init_data` holds targets in the maximization convention.
BoTrace run_bo(const Objective& objective, const ModelConfig& model, const Dataset& init_data,
               int iterations, Rng& rng);

/// Uniform random initial design, evaluated in the maximization convention.
Dataset initial_design(const Objective& objective, int count, double observation_noise, Rng& rng);

struct TrialSpec {
  Objective objective;
  ModelConfig model;
  int init_points = 20;
  int iterations = 50;
};

struct TrialAggregate {
  std::vector<double> mean_regret;  // per iteration
  std::vector<double> std_error;
  std::vector<BoTrace> traces;      // one per trial; empty for failed trials
  std::vector<int> failed_trials;
};

/// Runs independent seeded trials (trial k uses derive_seed(base_seed, k)).
/// Failed trials are excluded from the aggregate when fewer than 10% fail;
/// otherwise NumericalError is thrown.
TrialAggregate run_trials(const TrialSpec& spec, int trials, std::uint64_t base_seed,
                          int workers = 1);

}  // namespace rssgp
