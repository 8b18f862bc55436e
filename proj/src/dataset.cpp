#include "rssgp/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace rssgp {

Dataset::Dataset(Eigen::MatrixXd x, Eigen::VectorXd y) : inputs(std::move(x)), targets(std::move(y)) {
  if (inputs.rows() != targets.size()) {
    throw std::invalid_argument("Dataset: input rows and target count differ");
  }
}

void Dataset::append(const Eigen::VectorXd& x, double y) {
  if (x.size() != inputs.cols()) {
    throw std::invalid_argument("Dataset::append: dimension mismatch");
  }
  const Eigen::Index t = inputs.rows();
  inputs.conservativeResize(t + 1, Eigen::NoChange);
  inputs.row(t) = x.transpose();
  targets.conservativeResize(t + 1);
  targets(t) = y;
}

int Dataset::warn_outside(const SearchBox& box) const {
  int outside = 0;
  for (int i = 0; i < size(); ++i) {
    if (!box.contains(inputs.row(i).transpose())) {
      ++outside;
      spdlog::warn("dataset row {} lies outside the search box", i);
    }
  }
  return outside;
}

}  // namespace rssgp
