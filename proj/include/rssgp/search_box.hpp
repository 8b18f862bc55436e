#pragma once

#include <Eigen/Dense>

#include "rssgp/random.hpp"

namespace rssgp {

/// Axis-aligned search domain. lower < upper elementwise, all finite.
class SearchBox {
 public:
  SearchBox(Eigen::VectorXd lower, Eigen::VectorXd upper);

  static SearchBox cube(int dim, double lower, double upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd width() const { return upper_ - lower_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }
  double volume() const;

  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample_uniform(Rng& rng) const;

  /// Maps a point of the unit cube into the box.
  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace rssgp
