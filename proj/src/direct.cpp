#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rssgp/acquisition.hpp"

namespace rssgp {

namespace {

// A hyperrectangle of the unit cube. Side length in dimension i is 3^-levels[i].
struct Rectangle {
  Eigen::VectorXd center;
  std::vector<int> levels;
  double value = 0.0;  // minimized objective (negated f)
};

double rectangle_size(const std::vector<int>& levels, int max_depth) {
  // Summing by level keeps the result identical for equal level multisets.
  std::vector<int> counts(static_cast<std::size_t>(max_depth) + 2, 0);
  for (int k : levels) ++counts[static_cast<std::size_t>(std::min(k, max_depth + 1))];
  double sum = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) sum += counts[k] * std::pow(9.0, -static_cast<double>(k));
  }
  return 0.5 * std::sqrt(sum);
}

// Indices of potentially optimal rectangles: lower-right convex hull of
// (size, best value per size) with the epsilon sufficient-decrease test.
std::vector<std::size_t> potentially_optimal(const std::vector<Rectangle>& rects,
                                             const std::vector<double>& sizes, double epsilon) {
  std::map<double, std::size_t> best_per_size;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    auto [it, inserted] = best_per_size.try_emplace(sizes[i], i);
    if (!inserted && rects[i].value < rects[it->second].value) it->second = i;
  }
  std::vector<std::size_t> groups;
  groups.reserve(best_per_size.size());
  for (const auto& [size, index] : best_per_size) groups.push_back(index);

  std::size_t start = 0;
  for (std::size_t g = 1; g < groups.size(); ++g) {
    if (rects[groups[g]].value <= rects[groups[start]].value) start = g;
  }
  const double f_min = rects[groups[start]].value;

  std::vector<std::size_t> hull;
  for (std::size_t g = start; g < groups.size(); ++g) {
    const std::size_t p = groups[g];
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2];
      const std::size_t a = hull.back();
      const double cross = (sizes[a] - sizes[o]) * (rects[p].value - rects[o].value) -
                           (rects[a].value - rects[o].value) * (sizes[p] - sizes[o]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }

  std::vector<std::size_t> selected;
  for (std::size_t h = 0; h < hull.size(); ++h) {
    if (h + 1 == hull.size()) {
      selected.push_back(hull[h]);
      break;
    }
    const std::size_t j = hull[h];
    const std::size_t next = hull[h + 1];
    const double slope = (rects[next].value - rects[j].value) / (sizes[next] - sizes[j]);
    if (rects[j].value - slope * sizes[j] <= f_min - epsilon * std::abs(f_min)) {
      selected.push_back(j);
    }
  }
  return selected;
}

}  // namespace

DirectResult direct_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                             const SearchBox& box, const DirectOptions& options) {
  const int d = box.dim();
  if (options.budget < 1) throw std::invalid_argument("direct_maximize: budget must be positive");

  int evaluations = 0;
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  const auto evaluate = [&](const Eigen::VectorXd& unit) {
    const double value = -f(box.from_unit(unit));
    ++evaluations;
    lowest = std::min(lowest, value);
    highest = std::max(highest, value);
    return value;
  };

  std::vector<Rectangle> rects;
  std::vector<double> sizes;
  {
    Rectangle root{Eigen::VectorXd::Constant(d, 0.5), std::vector<int>(d, 0), 0.0};
    root.value = evaluate(root.center);
    sizes.push_back(rectangle_size(root.levels, options.max_depth));
    rects.push_back(std::move(root));
  }
  std::size_t best = 0;

  bool exhausted = false;
  while (!exhausted && evaluations < options.budget) {
    const std::vector<std::size_t> selected = potentially_optimal(rects, sizes, options.epsilon);
    bool divided = false;
    for (std::size_t index : selected) {
      const int min_level = *std::min_element(rects[index].levels.begin(), rects[index].levels.end());
      if (min_level >= options.max_depth) continue;
      std::vector<int> dims;
      for (int i = 0; i < d; ++i) {
        if (rects[index].levels[i] == min_level) dims.push_back(i);
      }
      if (evaluations + 2 * static_cast<int>(dims.size()) > options.budget) {
        exhausted = true;
        break;
      }
      const double delta = std::pow(3.0, -(min_level + 1));
      std::vector<Rectangle> children;
      std::vector<double> side_best;
      for (int i : dims) {
        Rectangle plus{rects[index].center, {}, 0.0};
        Rectangle minus{rects[index].center, {}, 0.0};
        plus.center(i) += delta;
        minus.center(i) -= delta;
        plus.value = evaluate(plus.center);
        minus.value = evaluate(minus.center);
        side_best.push_back(std::min(plus.value, minus.value));
        children.push_back(std::move(plus));
        children.push_back(std::move(minus));
      }
      std::vector<std::size_t> order(dims.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return side_best[a] < side_best[b]; });
      std::vector<int> levels = rects[index].levels;
      for (std::size_t o : order) {
        ++levels[dims[o]];
        for (int s = 0; s < 2; ++s) {
          Rectangle child = std::move(children[2 * o + s]);
          child.levels = levels;
          sizes.push_back(rectangle_size(child.levels, options.max_depth));
          rects.push_back(std::move(child));
          if (rects.back().value < rects[best].value) best = rects.size() - 1;
        }
      }
      rects[index].levels = levels;
      sizes[index] = rectangle_size(levels, options.max_depth);
      divided = true;
    }
    if (!divided) break;
  }

  DirectResult result;
  result.evaluations = evaluations;
  result.flat = lowest == highest;
  if (result.flat) {
    std::size_t largest = 0;
    for (std::size_t i = 1; i < rects.size(); ++i) {
      if (sizes[i] > sizes[largest]) largest = i;
    }
    result.x = box.from_unit(rects[largest].center);
    result.value = -rects[largest].value;
    return result;
  }
  result.x = box.clamp(box.from_unit(rects[best].center));
  result.value = -rects[best].value;
  return result;
}

}  // namespace rssgp
