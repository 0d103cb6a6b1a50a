#ifndef CRBM_REGULARIZER_HPP_
#define CRBM_REGULARIZER_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "crbm/rbm.hpp"

namespace crbm {

template <typename Scalar>
struct Interval {
  Scalar lower = 0;
  Scalar upper = 1;

  Scalar width() const { return upper - lower; }
};

/// Per-coordinate data ranges [k_j, l_j].
template <typename Scalar>
struct RangeBox {
  Interval<Scalar> x;
  Interval<Scalar> y;

  const Interval<Scalar>& operator[](Axis a) const { return a == Axis::X ? x : y; }
  Interval<Scalar>& operator[](Axis a) { return a == Axis::X ? x : y; }

  RangeBox swapped() const { return {y, x}; }

  void validate() const {
    if (!(x.upper > x.lower) || !(y.upper > y.lower))
      throw std::invalid_argument("RangeBox: every range needs upper > lower");
  }

  static RangeBox of(const Points<Scalar>& v) {
    RangeBox r;
    r.x = {v.col(0).minCoeff(), v.col(0).maxCoeff()};
    r.y = {v.col(1).minCoeff(), v.col(1).maxCoeff()};
    return r;
  }
};

inline constexpr Index kMaxCenterHidden = 20;

/**
 * Locations of the 2^m decoder modes along one coordinate.
 *
 * `centers[code]` is the mode of the hidden pattern with binary code `code`;
 * `sort_index` lists codes in ascending center order, ties by code.
 */
template <typename Scalar>
struct CenterSet {
  VecX<Scalar> centers;
  std::vector<std::uint32_t> sort_index;

  Index size() const { return centers.size(); }
  /// tau-th smallest center, 0-based.
  Scalar sorted(Index tau) const { return centers(sort_index[static_cast<std::size_t>(tau)]); }
  Scalar front() const { return sorted(0); }
  Scalar back() const { return sorted(size() - 1); }
};

template <typename Scalar>
CenterSet<Scalar> make_center_set(VecX<Scalar> centers) {
  CenterSet<Scalar> cs;
  cs.centers = std::move(centers);
  cs.sort_index.resize(static_cast<std::size_t>(cs.centers.size()));
  std::iota(cs.sort_index.begin(), cs.sort_index.end(), 0u);
  const auto& c = cs.centers;
  std::stable_sort(cs.sort_index.begin(), cs.sort_index.end(),
                   [&c](std::uint32_t a, std::uint32_t b) { return c(a) < c(b); });
  return cs;
}

template <typename Scalar>
CenterSet<Scalar> center_set(const RbmParams<Scalar>& p, Axis axis) {
  const Index m = p.hidden();
  if (m > kMaxCenterHidden)
    throw std::invalid_argument("center_set: refusing to enumerate 2^" + std::to_string(m) + " centers");
  const int j = static_cast<int>(axis);
  const std::uint32_t count = 1u << m;
  VecX<Scalar> centers(count);
  // center(code) = center(code without its top bit) + W(top, j)
  centers(0) = p.vis_bias(j);
  for (std::uint32_t code = 1; code < count; ++code) {
    const auto top = static_cast<std::uint32_t>(std::bit_width(code) - 1);
    centers(code) = centers(code ^ (1u << top)) + p.weights(top, j);
  }
  return make_center_set(std::move(centers));
}

/// Uniform spacing delta_j = (l_j - k_j) / 2^m for a center set of size 2^m.
template <typename Scalar>
Scalar uniform_spacing(const CenterSet<Scalar>& cs, const Interval<Scalar>& range) {
  return range.width() / static_cast<Scalar>(cs.size());
}

/// Sum over consecutive sorted centers of (gap - delta)^2.
template <typename Scalar>
Scalar non_uniformity(const CenterSet<Scalar>& cs, const Interval<Scalar>& range) {
  const Scalar delta = uniform_spacing(cs, range);
  Scalar d = 0;
  for (Index tau = 1; tau < cs.size(); ++tau) {
    const Scalar r = cs.sorted(tau) - cs.sorted(tau - 1) - delta;
    d += r * r;
  }
  return d;
}

/// Squared hinge on the extreme centers leaving [k_j, l_j].
template <typename Scalar>
Scalar boundary_penalty(const CenterSet<Scalar>& cs, const Interval<Scalar>& range) {
  const Scalar lo = std::max(Scalar(0), range.lower - cs.front());
  const Scalar hi = std::max(Scalar(0), cs.back() - range.upper);
  return lo * lo + hi * hi;
}

template <typename Scalar>
Scalar reg_term(const RbmParams<Scalar>& p, const RangeBox<Scalar>& ranges) {
  Scalar r = 0;
  for (Axis a : {Axis::X, Axis::Y}) {
    const CenterSet<Scalar> cs = center_set(p, a);
    r += non_uniformity(cs, ranges[a]) + boundary_penalty(cs, ranges[a]);
  }
  return r;
}

/// d(R)/d(center) for every code, with the sort order frozen.
template <typename Scalar>
VecX<Scalar> reg_center_grad(const CenterSet<Scalar>& cs, const Interval<Scalar>& range) {
  const Index n = cs.size();
  const Scalar delta = uniform_spacing(cs, range);
  VecX<Scalar> g = VecX<Scalar>::Zero(n);
  for (Index tau = 1; tau < n; ++tau) {
    const Scalar r = Scalar(2) * (cs.sorted(tau) - cs.sorted(tau - 1) - delta);
    g(cs.sort_index[static_cast<std::size_t>(tau)]) += r;
    g(cs.sort_index[static_cast<std::size_t>(tau - 1)]) -= r;
  }
  const Scalar lo = std::max(Scalar(0), range.lower - cs.front());
  const Scalar hi = std::max(Scalar(0), cs.back() - range.upper);
  g(cs.sort_index.front()) -= Scalar(2) * lo;
  g(cs.sort_index.back()) += Scalar(2) * hi;
  return g;
}

/// Subgradient of reg_term with respect to W and b (hidden bias untouched).
/// Every center is b_j + sum_i h_i W_ij, so dR/dW_ij sums the center
/// gradients over the patterns with bit i set.
template <typename Scalar>
ParamGrad<Scalar> reg_grad(const RbmParams<Scalar>& p, const RangeBox<Scalar>& ranges) {
  const Index m = p.hidden();
  ParamGrad<Scalar> g = ParamGrad<Scalar>::zeros(m);
  for (Axis a : {Axis::X, Axis::Y}) {
    const int j = static_cast<int>(a);
    const CenterSet<Scalar> cs = center_set(p, a);
    const VecX<Scalar> gc = reg_center_grad(cs, ranges[a]);
    g.vis_bias(j) = gc.sum();
    for (std::uint32_t code = 0; code < static_cast<std::uint32_t>(gc.size()); ++code)
      for (Index i = 0; i < m; ++i)
        if ((code >> i) & 1u) g.weights(i, j) += gc(code);
  }
  return g;
}

}  // namespace crbm

#endif  // CRBM_REGULARIZER_HPP_
