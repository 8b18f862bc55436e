#pragma once

#include "rssgp/benchmarks.hpp"
#include "rssgp/bo.hpp"
#include "rssgp/ssgp.hpp"

namespace fixture {

/// Ten noise-free observations of sinc on [-10, 10] and a prior-sampled basis.
struct SincProblem {
  rssgp::Objective objective = rssgp::make_sinc1();
  rssgp::KernelParams params = rssgp::KernelParams::isotropic(1, 1.0, 1.0, 1e-4);
  rssgp::Dataset data;
  rssgp::SpectralBasis basis;
};

inline SincProblem sinc_problem(std::uint64_t seed, int features = 30, int observations = 10) {
  SincProblem p;
  rssgp::Rng rng(seed);
  p.data = rssgp::initial_design(p.objective, observations, 0.0, rng);
  p.basis = rssgp::sample_frequencies(p.params, features, rng);
  return p;
}

/// A posterior with a single dominant observation at x0: y = 3 there, all
/// other observations 0 far away.
inline rssgp::SsgpPosterior peaked_posterior(double x0, int features, std::uint64_t seed) {
  const rssgp::KernelParams params = rssgp::KernelParams::isotropic(1, 1.0, 1.0, 1e-6);
  rssgp::Rng rng(seed);
  const rssgp::SpectralBasis basis = rssgp::sample_frequencies(params, features, rng);
  rssgp::Dataset data(1);
  data.append(Eigen::VectorXd::Constant(1, x0), 3.0);
  return rssgp::fit_ssgp(data, basis, params);
}

}  // namespace fixture
