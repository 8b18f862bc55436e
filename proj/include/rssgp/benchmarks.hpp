#pragma once

#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rssgp/search_box.hpp"

namespace rssgp {

enum class Sense { kMinimize, kMaximize };

struct Objective {
  std::string name;
  int dim = 0;
  SearchBox box;
  double optimum_value = 0.0;  // native sense
  std::function<double(const Eigen::VectorXd&)> evaluate;
  Sense sense = Sense::kMinimize;

  /// Value in the maximization convention the BO driver works in.
  double evaluate_for_max(const Eigen::VectorXd& x) const {
    const double v = evaluate(x);
    return sense == Sense::kMaximize ? v : -v;
  }
  double to_native(double maximized) const {
    return sense == Sense::kMaximize ? maximized : -maximized;
  }
};

/// Ackley with a = 20, b = 0.2, c = 2 pi on [-10, 10]^2. Throws
/// std::invalid_argument outside the box.
double ackley2(const Eigen::VectorXd& x);

/// Hartmann-6 on [0, 1]^6 with the canonical alpha, A, P tables.
double hartmann6(const Eigen::VectorXd& x);

/// sin(x) / x with sinc(0) = 1.
double sinc1(double x);

inline constexpr double kHartmann6Minimum = -3.32237;

Objective make_ackley2();
Objective make_hartmann6();
/// Sinc on [-10, 10], maximized (optimum 1 at 0).
Objective make_sinc1();
/// A constant function on [0, 1]^dim; used for smoke tests.
Objective make_constant(int dim, double value);

/// Throws std::invalid_argument for unknown names.
Objective objective_by_name(std::string_view name);

/// Regret of a best-so-far value given in the objective's native sense.
double simple_regret(double best_so_far, const Objective& objective);

}  // namespace rssgp
