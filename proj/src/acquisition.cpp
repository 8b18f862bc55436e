#include "rssgp/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace rssgp {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

EiPartials expected_improvement_partials(double mean, double std, double incumbent) {
  if (!(std >= 0.0)) throw std::invalid_argument("expected_improvement: std must be >= 0");
  if (std == 0.0) return {};
  const double z = (mean - incumbent) / std;
  const double cdf = normal_cdf(z);
  const double pdf = normal_pdf(z);
  const double value = std::max(0.0, (mean - incumbent) * cdf + std * pdf);
  return {value, cdf, pdf};
}

double expected_improvement(double mean, double std, double incumbent) {
  return expected_improvement_partials(mean, std, incumbent).value;
}

EiPartials log_expected_improvement_partials(double mean, double std, double incumbent) {
  if (!(std >= 0.0)) throw std::invalid_argument("expected_improvement: std must be >= 0");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (std == 0.0) {
    const double gap = mean - incumbent;
    if (!(gap > 0.0)) return {kNegInf, 0.0, 0.0};
    return {std::log(gap), 1.0 / gap, 0.0};
  }
  const double z = (mean - incumbent) / std;
  // h(z) = z Phi(z) + phi(z); EI = std h(z), dh/dz = Phi(z).
  double log_h = 0.0, cdf_over_h = 0.0, pdf_over_h = 0.0;
  if (z > -25.0) {
    const double h = z * normal_cdf(z) + normal_pdf(z);
    log_h = std::log(h);
    cdf_over_h = normal_cdf(z) / h;
    pdf_over_h = normal_pdf(z) / h;
  } else {
    // Asymptotic Mills-ratio series; truncation error near 1e-10 relative at the cutoff.
    const double r = 1.0 / (z * z);
    const double s_h = 1.0 - r * (3.0 - r * (15.0 - r * (105.0 - r * 945.0)));
    const double s_cdf = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - r * 105.0)));
    log_h = -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(r) + std::log(s_h);
    cdf_over_h = -z * s_cdf / s_h;
    pdf_over_h = s_h > 0.0 ? 1.0 / (r * s_h) : 0.0;
  }
  return {std::log(std) + log_h, cdf_over_h / std, pdf_over_h / std};
}

double log_expected_improvement(double mean, double std, double incumbent) {
  return log_expected_improvement_partials(mean, std, incumbent).value;
}

AcquisitionResult maximize_acquisition(const std::function<Prediction(const Eigen::VectorXd&)>& predict,
                                       const SearchBox& box, double incumbent, int budget) {
  if (budget < 100 * box.dim()) {
    throw std::invalid_argument("maximize_acquisition: budget must be at least 100 * d");
  }
  // Keeps DIRECT's slope arithmetic finite; log EI this low is z^2 ~ 2e6.
  constexpr double floor = -1e6;
  const auto log_ei = [&](const Eigen::VectorXd& x) {
    const Prediction p = predict(x);
    const double v =
        log_expected_improvement(p.mean, std::sqrt(std::max(p.variance, 0.0)), incumbent);
    return std::max(v, floor);
  };
  const DirectResult result = direct_maximize(log_ei, box, DirectOptions{.budget = budget});
  if (result.flat) {
    spdlog::warn("maximize_acquisition: flat acquisition surface ({} evaluations)",
                 result.evaluations);
    return {result.x, 0.0};
  }
  return {result.x, std::exp(result.value)};
}

AcquisitionResult maximize_acquisition(const SsgpPosterior& model, const SearchBox& box,
                                       double incumbent, int budget) {
  return maximize_acquisition(
      [&model](const Eigen::VectorXd& x) { return predict_ssgp(model, x, false); }, box, incumbent,
      budget);
}

AcquisitionResult maximize_acquisition(const FullGpPosterior& model, const SearchBox& box,
                                       double incumbent, int budget) {
  return maximize_acquisition(
      [&model](const Eigen::VectorXd& x) { return predict_full_gp(model, x, false); }, box,
      incumbent, budget);
}

}  // namespace rssgp
