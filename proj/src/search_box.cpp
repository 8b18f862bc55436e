#include "rssgp/search_box.hpp"

#include <cmath>
#include <stdexcept>

namespace rssgp {

SearchBox::SearchBox(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw std::invalid_argument("SearchBox: bounds must be non-empty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_(i)) || !std::isfinite(upper_(i)) || !(lower_(i) < upper_(i))) {
      throw std::invalid_argument("SearchBox: require finite lower < upper in every dimension");
    }
  }
}

SearchBox SearchBox::cube(int dim, double lower, double upper) {
  return SearchBox(Eigen::VectorXd::Constant(dim, lower), Eigen::VectorXd::Constant(dim, upper));
}

double SearchBox::volume() const { return (upper_ - lower_).prod(); }

bool SearchBox::contains(const Eigen::VectorXd& x, double slack) const {
  if (x.size() != lower_.size()) return false;
  return ((x.array() >= lower_.array() - slack) && (x.array() <= upper_.array() + slack)).all();
}

Eigen::VectorXd SearchBox::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Eigen::VectorXd SearchBox::sample_uniform(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd u(dim());
  for (int i = 0; i < dim(); ++i) u(i) = unit(rng);
  return from_unit(u);
}

Eigen::VectorXd SearchBox::from_unit(const Eigen::VectorXd& u) const {
  return lower_ + u.cwiseProduct(upper_ - lower_);
}

}  // namespace rssgp
