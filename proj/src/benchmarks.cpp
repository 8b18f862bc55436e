#include "rssgp/benchmarks.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rssgp {

namespace {

const SearchBox& ackley_box() {
  static const SearchBox box = SearchBox::cube(2, -10.0, 10.0);
  return box;
}

const SearchBox& hartmann_box() {
  static const SearchBox box = SearchBox::cube(6, 0.0, 1.0);
  return box;
}

void require_inside(const Eigen::VectorXd& x, const SearchBox& box, const char* name) {
  if (x.size() != box.dim()) throw std::invalid_argument(std::string(name) + ": wrong dimension");
  if (!box.contains(x)) throw std::invalid_argument(std::string(name) + ": point outside the box");
}

constexpr std::array<double, 4> kHartmannAlpha = {1.0, 1.2, 3.0, 3.2};
constexpr std::array<std::array<double, 6>, 4> kHartmannA = {{
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
}};
constexpr std::array<std::array<double, 6>, 4> kHartmannP = {{
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
}};

}  // namespace

double ackley2(const Eigen::VectorXd& x) {
  require_inside(x, ackley_box(), "ackley2");
  constexpr double a = 20.0;
  constexpr double b = 0.2;
  constexpr double c = 2.0 * std::numbers::pi;
  const double n = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (c * x.array()).cos().sum() / n;
  return -a * std::exp(-b * std::sqrt(sq)) - std::exp(cs) + a + std::numbers::e;
}

double hartmann6(const Eigen::VectorXd& x) {
  require_inside(x, hartmann_box(), "hartmann6");
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      const double diff = x(static_cast<Eigen::Index>(j)) - kHartmannP[i][j];
      inner += kHartmannA[i][j] * diff * diff;
    }
    sum += kHartmannAlpha[i] * std::exp(-inner);
  }
  return -sum;
}

double sinc1(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

Objective make_ackley2() {
  return {"ackley2", 2, ackley_box(), 0.0, [](const Eigen::VectorXd& x) { return ackley2(x); },
          Sense::kMinimize};
}

Objective make_hartmann6() {
  return {"hartmann6", 6, hartmann_box(), kHartmann6Minimum,
          [](const Eigen::VectorXd& x) { return hartmann6(x); }, Sense::kMinimize};
}

Objective make_sinc1() {
  return {"sinc1", 1, SearchBox::cube(1, -10.0, 10.0), 1.0,
          [](const Eigen::VectorXd& x) { return sinc1(x(0)); }, Sense::kMaximize};
}

Objective make_constant(int dim, double value) {
  return {"constant", dim, SearchBox::cube(dim, 0.0, 1.0), value,
          [value](const Eigen::VectorXd&) { return value; }, Sense::kMaximize};
}

Objective objective_by_name(std::string_view name) {
  if (name == "ackley2") return make_ackley2();
  if (name == "hartmann6") return make_hartmann6();
  if (name == "sinc1") return make_sinc1();
  if (name == "constant1") return make_constant(1, 0.0);
  if (name == "constant2") return make_constant(2, 0.0);
  throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
}

double simple_regret(double best_so_far, const Objective& objective) {
  return objective.sense == Sense::kMaximize ? objective.optimum_value - best_so_far
                                             : best_so_far - objective.optimum_value;
}

}  // namespace rssgp
