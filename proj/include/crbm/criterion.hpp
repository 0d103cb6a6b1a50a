#ifndef CRBM_CRITERION_HPP_
#define CRBM_CRITERION_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crbm/regularizer.hpp"

namespace crbm {

template <typename Scalar>
struct Decision {
  Direction direction = Direction::Undecided;
  Scalar gamma = 0;
  Scalar d_x = 0;
  Scalar d_y = 0;
};

/// gamma = d(X*) - d(Y*), boundary hinges excluded. Negative means X -> Y.
template <typename Scalar>
Decision<Scalar> gamma(const RbmParams<Scalar>& p, const RangeBox<Scalar>& ranges) {
  Decision<Scalar> out;
  out.d_x = non_uniformity(center_set(p, Axis::X), ranges.x);
  out.d_y = non_uniformity(center_set(p, Axis::Y), ranges.y);
  out.gamma = out.d_x - out.d_y;
  out.direction = direction_from_score(static_cast<double>(out.gamma));
  return out;
}

template <typename Scalar>
struct GridSpec {
  Scalar lower = 0;
  Scalar upper = 1;
  Index nodes = 2001;
};

/// Grid over [k_j - 4 sigma, l_j + 4 sigma].
template <typename Scalar>
GridSpec<Scalar> capacity_grid(const RbmParams<Scalar>& p, const Interval<Scalar>& range,
                               Index nodes = 2001) {
  return {range.lower - 4 * p.sigma, range.upper + 4 * p.sigma, nodes};
}

/// Area under the ridgeline max_h N(u | center_h, sigma^2) along one
/// coordinate, by the trapezoidal rule.
template <typename Scalar>
Scalar estimation_capacity(const RbmParams<Scalar>& p, Axis axis, const GridSpec<Scalar>& grid) {
  if (grid.nodes < 2 || !(grid.upper > grid.lower))
    throw std::invalid_argument("estimation_capacity: degenerate grid");
  const CenterSet<Scalar> cs = center_set(p, axis);
  const Scalar norm = Scalar(1) / (p.sigma * std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>));
  const Scalar inv2s2 = Scalar(1) / (Scalar(2) * p.sigma * p.sigma);
  const Scalar step = (grid.upper - grid.lower) / static_cast<Scalar>(grid.nodes - 1);

  // The largest density belongs to the nearest center; walk the sorted list.
  Index nearest = 0;
  Scalar area = 0;
  for (Index k = 0; k < grid.nodes; ++k) {
    const Scalar u = grid.lower + step * static_cast<Scalar>(k);
    while (nearest + 1 < cs.size() &&
           std::abs(cs.sorted(nearest + 1) - u) <= std::abs(cs.sorted(nearest) - u))
      ++nearest;
    const Scalar dist = u - cs.sorted(nearest);
    const Scalar density = norm * std::exp(-dist * dist * inv2s2);
    area += (k == 0 || k + 1 == grid.nodes) ? density / 2 : density;
  }
  return area * step;
}

/// True when the first configuration has at least the capacity of the second.
template <typename Scalar>
bool capacity_monotonicity_check(const RbmParams<Scalar>& params_uniform,
                                 const RbmParams<Scalar>& params_clustered, Axis axis,
                                 const GridSpec<Scalar>& grid) {
  if (params_uniform.hidden() != params_clustered.hidden() ||
      params_uniform.sigma != params_clustered.sigma)
    throw std::invalid_argument("capacity_monotonicity_check: configurations differ in m or sigma");
  return estimation_capacity(params_uniform, axis, grid) >=
         estimation_capacity(params_clustered, axis, grid);
}

}  // namespace crbm

#endif  // CRBM_CRITERION_HPP_
