#pragma once

#include <Eigen/Dense>

#include "rssgp/search_box.hpp"

namespace rssgp {

/// Observations D_t: one input per row, one target per row.
struct Dataset {
  Eigen::MatrixXd inputs;   // t x d
  Eigen::VectorXd targets;  // t

  Dataset() = default;
  explicit Dataset(int dim) : inputs(0, dim), targets(0) {}
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y);

  int size() const { return static_cast<int>(inputs.rows()); }
  int dim() const { return static_cast<int>(inputs.cols()); }
  bool empty() const { return size() == 0; }

  void append(const Eigen::VectorXd& x, double y);

  /// Logs a warning for every input outside `box`; returns the count.
  int warn_outside(const SearchBox& box) const;
};

}  // namespace rssgp
