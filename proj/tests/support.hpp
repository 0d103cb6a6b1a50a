// Shared generators and numeric helpers for the test suites.
#ifndef CRBM_TESTS_SUPPORT_HPP_
#define CRBM_TESTS_SUPPORT_HPP_

#include <cmath>
#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "crbm/bench.hpp"
#include "crbm/criterion.hpp"
#include "crbm/data.hpp"
#include "crbm/rbm.hpp"
#include "crbm/trainer.hpp"

namespace crbm::testing {

inline double normal(Rng& rng, double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng); }
inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Params random_params(Rng& rng, Index m, double weight_sd = 1.0) {
  Params p = Params::zeros(m, uniform(rng, 0.5, 1.5));
  for (Index i = 0; i < m; ++i) {
    p.weights(i, 0) = normal(rng, weight_sd);
    p.weights(i, 1) = normal(rng, weight_sd);
    p.hid_bias(i) = normal(rng);
  }
  p.vis_bias << normal(rng), normal(rng);
  return p;
}

inline Points<double> random_points(Rng& rng, Index n, double sd = 1.0) {
  Points<double> v(n, 2);
  for (Index t = 0; t < n; ++t) v.row(t) << normal(rng, sd), normal(rng, sd);
  return v;
}

/// Parameters whose centers along `axis` sit on k + delta/2 + n delta,
/// n = 0..2^m - 1, i.e. consecutive spacing exactly delta.
inline Params uniform_grid_params(Index m, double sigma, const Interval<double>& range, Axis axis,
                                  Params base = Params{}) {
  if (base.hidden() != m) base = Params::zeros(m, sigma);
  const int j = static_cast<int>(axis);
  const double delta = range.width() / static_cast<double>(Index{1} << m);
  for (Index i = 0; i < m; ++i) base.weights(i, j) = delta * static_cast<double>(Index{1} << i);
  base.vis_bias(j) = range.lower + delta / 2;
  return base;
}

/// Central finite-difference gradient of f over (W row-major, b, c).
inline VecX<double> finite_difference(const Params& p, const std::function<double(const Params&)>& f,
                                      double h = 1e-5) {
  const Index m = p.hidden();
  VecX<double> out(3 * m + 2);
  Index k = 0;
  auto probe = [&](auto&& access) {
    Params plus = p;
    Params minus = p;
    access(plus) += h;
    access(minus) -= h;
    out(k++) = (f(plus) - f(minus)) / (2 * h);
  };
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < 2; ++j) probe([i, j](Params& q) -> double& { return q.weights(i, j); });
  for (Index j = 0; j < 2; ++j) probe([j](Params& q) -> double& { return q.vis_bias(j); });
  for (Index i = 0; i < m; ++i) probe([i](Params& q) -> double& { return q.hid_bias(i); });
  return out;
}

/// max |a - b| / max(|a|_inf, |b|_inf).
inline double relative_error(const VecX<double>& a, const VecX<double>& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  if (scale == 0) return 0;
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Two-sided 95% t-interval half width for the mean of 20 values (t_{0.975,19}).
inline double ci95_half_width_20(const std::vector<double>& v) {
  return 2.093024 * sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

/// Points on the diagonal manifold y* = k2 + a (x* - k1) over unit ranges,
/// with the same Gaussian noise on both coordinates, then z-scored.
inline Points<double> diagonal_manifold_sample(Rng& rng, Index n, double noise_sd = 0.05) {
  Points<double> v(n, 2);
  for (Index t = 0; t < n; ++t) {
    const double s = uniform(rng, 0.0, 1.0);
    v(t, 0) = s + normal(rng, noise_sd);
    v(t, 1) = s + normal(rng, noise_sd);
  }
  v.col(0) = zscore(v.col(0));
  v.col(1) = zscore(v.col(1));
  return v;
}

/// Uniform cause through a strongly curved monotonic mechanism, z-scored.
inline Points<double> curved_mechanism_sample(Rng& rng, Index n, double noise_sd = 0.02) {
  Points<double> v(n, 2);
  for (Index t = 0; t < n; ++t) {
    const double x = uniform(rng, 0.0, 1.0);
    v(t, 0) = x;
    v(t, 1) = std::exp(4.0 * x) / std::exp(4.0) + normal(rng, noise_sd);
  }
  v.col(0) = zscore(v.col(0));
  v.col(1) = zscore(v.col(1));
  return v;
}

// Energy written out term by term, independent of the library's matrix code.
inline double energy(const Params& p, const Vec2<double>& v, const VecX<double>& h) {
  const double s2 = p.sigma * p.sigma;
  double e = 0;
  for (int j = 0; j < 2; ++j) e += (v(j) - p.vis_bias(j)) * (v(j) - p.vis_bias(j)) / (2 * s2);
  for (Index i = 0; i < p.hidden(); ++i) {
    e -= p.hid_bias(i) * h(i);
    for (int j = 0; j < 2; ++j) e -= h(i) * p.weights(i, j) * v(j) / s2;
  }
  return e;
}

inline double brute_free_energy(const Params& p, const Vec2<double>& v) {
  const Index m = p.hidden();
  std::vector<double> terms;
  for (std::uint32_t code = 0; code < (1u << m); ++code) {
    VecX<double> h(m);
    for (Index i = 0; i < m; ++i) h(i) = (code >> i) & 1u;
    terms.push_back(-energy(p, v, h));
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double s = 0;
  for (double t : terms) s += std::exp(t - top);
  return -(top + std::log(s));
}

// Sum over (positive, negative) pairs of w+ w- [s+ > s-] + half ties.
inline double rank_statistic(const std::vector<PairResult>& rs) {
  double num = 0;
  double pos = 0;
  double neg = 0;
  for (const auto& a : rs) (a.truth == Direction::XtoY ? pos : neg) += a.weight;
  for (const auto& a : rs) {
    if (a.truth != Direction::XtoY) continue;
    for (const auto& b : rs) {
      if (b.truth == Direction::XtoY) continue;
      const double sa = -a.gamma;
      const double sb = -b.gamma;
      num += a.weight * b.weight * (sa > sb ? 1.0 : sa == sb ? 0.5 : 0.0);
    }
  }
  return num / (pos * neg);
}

}  // namespace crbm::testing

#endif  // CRBM_TESTS_SUPPORT_HPP_
