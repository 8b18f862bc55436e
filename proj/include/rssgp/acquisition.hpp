#pragma once

#include <functional>

#include <Eigen/Dense>

#include "rssgp/full_gp.hpp"
#include "rssgp/search_box.hpp"
#include "rssgp/ssgp.hpp"

namespace rssgp {

/// sigma * (Z Phi(Z) + phi(Z)) with Z = (mean - incumbent) / sigma; 0 when
/// std == 0. Throws std::invalid_argument for negative std.
double expected_improvement(double mean, double std, double incumbent);

/// Partial derivatives of expected_improvement: d/dmean = Phi(Z), d/dstd = phi(Z).
struct EiPartials {
  double value = 0.0;
  double d_mean = 0.0;
  double d_std = 0.0;
};
EiPartials expected_improvement_partials(double mean, double std, double incumbent);

/// log of expected_improvement, finite wherever std > 0 even when EI itself
/// underflows. Partials are of the log. -inf (with zero partials) when std == 0
/// and mean <= incumbent.
EiPartials log_expected_improvement_partials(double mean, double std, double incumbent);
double log_expected_improvement(double mean, double std, double incumbent);

struct DirectOptions {
  int budget = 1000;       // function evaluations
  double epsilon = 1e-4;   // potential-optimality, relative to |f_min|
  int max_depth = 30;      // trisections per dimension
};

struct DirectResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  /// True when every evaluation returned the same value.
  bool flat = false;
};

/// DIRECT (dividing rectangles) maximization of `f` over the box. Deterministic.
/// For a flat objective returns the center of the largest remaining rectangle.
DirectResult direct_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                             const SearchBox& box, const DirectOptions& options);

struct AcquisitionResult {
  Eigen::VectorXd x_next;
  double acq_value = 0.0;
};

/// Maximizes EI of the latent predictive distribution with DIRECT, working on
/// log EI so that far-below-incumbent regions still rank. Requires budget >= 100 d.
AcquisitionResult maximize_acquisition(const SsgpPosterior& model, const SearchBox& box,
                                       double incumbent, int budget);
AcquisitionResult maximize_acquisition(const FullGpPosterior& model, const SearchBox& box,
                                       double incumbent, int budget);
AcquisitionResult maximize_acquisition(const std::function<Prediction(const Eigen::VectorXd&)>& predict,
                                       const SearchBox& box, double incumbent, int budget);

}  // namespace rssgp
