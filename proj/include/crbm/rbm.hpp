#ifndef CRBM_RBM_HPP_
#define CRBM_RBM_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "crbm/common.hpp"

namespace crbm {

/**
 * Gaussian-Bernoulli RBM with two visible units.
 *
 * The energy used throughout is
 *
 *   E(v, h) = |v - b|^2 / (2 sigma^2) - c.h - h^T W v / sigma^2
 *
 * which gives the encoder phi(c + W v / sigma^2) and the decoder
 * N(b + W^T h, sigma^2 I). EncoderScaling::Unscaled drops the
 * 1/sigma^2 in the encoder; that variant has no exact partition function.
 */
enum class EncoderScaling { EnergyConsistent, Unscaled };

template <typename Scalar>
using WeightMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

/// Binary hidden activations stored as 0/1 scalars so they compose with W.
template <typename Scalar>
using HiddenPattern = VecX<Scalar>;

template <typename Scalar>
struct RbmParams {
  WeightMatrix<Scalar> weights;  // m x 2, row i is W_i
  Vec2<Scalar> vis_bias = Vec2<Scalar>::Zero();
  VecX<Scalar> hid_bias;
  Scalar sigma = Scalar(1);

  Index hidden() const { return weights.rows(); }

  static RbmParams zeros(Index m, Scalar sigma) {
    RbmParams p;
    p.weights = WeightMatrix<Scalar>::Zero(m, 2);
    p.hid_bias = VecX<Scalar>::Zero(m);
    p.sigma = sigma;
    return p;
  }

  void validate() const {
    if (weights.rows() < 1) throw std::invalid_argument("RbmParams: need at least one hidden unit");
    if (hid_bias.size() != weights.rows())
      throw std::invalid_argument("RbmParams: hidden bias length does not match weight rows");
    if (!(sigma > 0) || !std::isfinite(static_cast<double>(sigma)))
      throw std::invalid_argument("RbmParams: sigma must be positive and finite");
    if (!weights.allFinite() || !vis_bias.allFinite() || !hid_bias.allFinite())
      throw std::invalid_argument("RbmParams: non-finite entry");
  }

  /// Exchanges the roles of the two visible coordinates.
  RbmParams swapped() const {
    RbmParams p = *this;
    p.weights.col(0) = weights.col(1);
    p.weights.col(1) = weights.col(0);
    std::swap(p.vis_bias(0), p.vis_bias(1));
    return p;
  }
};

/// Gradient with the same layout as RbmParams (sigma is held fixed).
template <typename Scalar>
struct ParamGrad {
  WeightMatrix<Scalar> weights;
  Vec2<Scalar> vis_bias = Vec2<Scalar>::Zero();
  VecX<Scalar> hid_bias;

  static ParamGrad zeros(Index m) {
    ParamGrad g;
    g.weights = WeightMatrix<Scalar>::Zero(m, 2);
    g.hid_bias = VecX<Scalar>::Zero(m);
    return g;
  }

  ParamGrad& operator+=(const ParamGrad& o) {
    weights += o.weights;
    vis_bias += o.vis_bias;
    hid_bias += o.hid_bias;
    return *this;
  }
  ParamGrad& operator*=(Scalar s) {
    weights *= s;
    vis_bias *= s;
    hid_bias *= s;
    return *this;
  }

  Scalar squared_norm() const {
    return weights.squaredNorm() + vis_bias.squaredNorm() + hid_bias.squaredNorm();
  }
  Scalar max_abs() const {
    Scalar r = weights.cwiseAbs().maxCoeff();
    r = std::max(r, vis_bias.cwiseAbs().maxCoeff());
    return std::max(r, hid_bias.cwiseAbs().maxCoeff());
  }
};

/// Flattens parameters in the order W (row-major), b, c.
template <typename Scalar>
VecX<Scalar> flatten(const ParamGrad<Scalar>& g) {
  const Index m = g.weights.rows();
  VecX<Scalar> out(2 * m + 2 + m);
  for (Index i = 0; i < m; ++i) {
    out(2 * i) = g.weights(i, 0);
    out(2 * i + 1) = g.weights(i, 1);
  }
  out.segment(2 * m, 2) = g.vis_bias;
  out.tail(m) = g.hid_bias;
  return out;
}

/// Adds `step * direction` to the trainable parameters.
template <typename Scalar>
void axpy(RbmParams<Scalar>& p, Scalar step, const ParamGrad<Scalar>& direction) {
  p.weights += step * direction.weights;
  p.vis_bias += step * direction.vis_bias;
  p.hid_bias += step * direction.hid_bias;
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

/// log(1 + exp(x)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

template <typename Scalar>
Scalar encoder_scale(const RbmParams<Scalar>& p, EncoderScaling scaling) {
  return scaling == EncoderScaling::EnergyConsistent ? Scalar(1) / (p.sigma * p.sigma) : Scalar(1);
}

/// Hidden pre-activations for a batch, T x m.
template <typename Scalar>
MatX<Scalar> hidden_preactivation(const RbmParams<Scalar>& p, const Points<Scalar>& v,
                                  EncoderScaling scaling) {
  MatX<Scalar> a = (v * p.weights.transpose()) * encoder_scale(p, scaling);
  a.rowwise() += p.hid_bias.transpose();
  return a;
}

template <typename Scalar>
VecX<Scalar> encode_prob(const RbmParams<Scalar>& p, const Vec2<Scalar>& v,
                         EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  VecX<Scalar> a = p.hid_bias + (p.weights * v) * encoder_scale(p, scaling);
  return a.unaryExpr([](Scalar x) { return sigmoid(x); });
}

template <typename Scalar>
MatX<Scalar> encode_prob(const RbmParams<Scalar>& p, const Points<Scalar>& v,
                         EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  return hidden_preactivation(p, v, scaling).unaryExpr([](Scalar x) { return sigmoid(x); });
}

namespace detail {
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
}  // namespace detail

template <typename Scalar>
HiddenPattern<Scalar> sample_hidden(const RbmParams<Scalar>& p, const Vec2<Scalar>& v, Rng& rng,
                                    EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  const VecX<Scalar> prob = encode_prob(p, v, scaling);
  HiddenPattern<Scalar> h(prob.size());
  for (Index i = 0; i < prob.size(); ++i)
    h(i) = detail::uniform01(rng) < static_cast<double>(prob(i)) ? Scalar(1) : Scalar(0);
  return h;
}

/// Samples one hidden pattern per row; draws are consumed row by row.
template <typename Scalar>
MatX<Scalar> sample_hidden(const RbmParams<Scalar>& p, const Points<Scalar>& v, Rng& rng,
                           EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  const MatX<Scalar> prob = encode_prob(p, v, scaling);
  MatX<Scalar> h(prob.rows(), prob.cols());
  for (Index t = 0; t < prob.rows(); ++t)
    for (Index i = 0; i < prob.cols(); ++i)
      h(t, i) = detail::uniform01(rng) < static_cast<double>(prob(t, i)) ? Scalar(1) : Scalar(0);
  return h;
}

template <typename Scalar>
Vec2<Scalar> decode_mean(const RbmParams<Scalar>& p, const HiddenPattern<Scalar>& h) {
  return p.vis_bias + p.weights.transpose() * h;
}

/// Decoder means for a batch of hidden patterns (T x m) -> T x 2.
template <typename Scalar>
Points<Scalar> decode_mean(const RbmParams<Scalar>& p, const MatX<Scalar>& h) {
  Points<Scalar> out = h * p.weights;
  out.rowwise() += p.vis_bias.transpose();
  return out;
}

template <typename Scalar>
Vec2<Scalar> sample_visible(const RbmParams<Scalar>& p, const HiddenPattern<Scalar>& h, Rng& rng) {
  Vec2<Scalar> v = decode_mean(p, h);
  for (Index j = 0; j < 2; ++j) v(j) += p.sigma * static_cast<Scalar>(detail::standard_normal(rng));
  return v;
}

/// Hidden pattern whose bit i is bit i of `code`.
template <typename Scalar>
HiddenPattern<Scalar> pattern_from_code(std::uint32_t code, Index m) {
  HiddenPattern<Scalar> h(m);
  for (Index i = 0; i < m; ++i) h(i) = (code >> i) & 1u ? Scalar(1) : Scalar(0);
  return h;
}

template <typename Scalar>
VecX<Scalar> free_energy(const RbmParams<Scalar>& p, const Points<Scalar>& v,
                         EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  const Scalar inv2s2 = Scalar(1) / (Scalar(2) * p.sigma * p.sigma);
  const MatX<Scalar> a = hidden_preactivation(p, v, scaling);
  VecX<Scalar> f = (v.rowwise() - p.vis_bias.transpose()).rowwise().squaredNorm() * inv2s2;
  for (Index t = 0; t < v.rows(); ++t) {
    Scalar s = 0;
    for (Index i = 0; i < a.cols(); ++i) s += softplus(a(t, i));
    f(t) -= s;
  }
  return f;
}

template <typename Scalar>
Scalar free_energy(const RbmParams<Scalar>& p, const Vec2<Scalar>& v,
                   EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  Points<Scalar> one(1, 2);
  one.row(0) = v.transpose();
  return free_energy(p, one, scaling)(0);
}

/// Gradient of the batch-mean free energy with respect to (W, b, c).
template <typename Scalar>
ParamGrad<Scalar> free_energy_grad(const RbmParams<Scalar>& p, const Points<Scalar>& v,
                                   EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  const Scalar n = static_cast<Scalar>(v.rows());
  const Scalar inv_s2 = Scalar(1) / (p.sigma * p.sigma);
  const MatX<Scalar> prob = encode_prob(p, v, scaling);
  ParamGrad<Scalar> g;
  g.weights = -(prob.transpose() * v) * (encoder_scale(p, scaling) / n);
  g.vis_bias = -((v.rowwise() - p.vis_bias.transpose()).colwise().sum().transpose()) * (inv_s2 / n);
  g.hid_bias = -prob.colwise().sum().transpose() / n;
  return g;
}

struct CdOptions {
  EncoderScaling scaling = EncoderScaling::EnergyConsistent;
  /// Reconstruct with a Gaussian draw instead of the decoder mean.
  bool sampled_reconstruction = false;
};

/// One Gibbs half-cycle per row: h ~ p(h|v0), v1 = decoder mean (or sample).
template <typename Scalar>
Points<Scalar> cd_reconstruct(const RbmParams<Scalar>& p, const Points<Scalar>& v0, Rng& rng,
                              const CdOptions& opts = {}) {
  const MatX<Scalar> h = sample_hidden(p, v0, rng, opts.scaling);
  Points<Scalar> v1 = decode_mean(p, h);
  if (opts.sampled_reconstruction) {
    for (Index t = 0; t < v1.rows(); ++t)
      for (Index j = 0; j < 2; ++j) v1(t, j) += p.sigma * static_cast<Scalar>(detail::standard_normal(rng));
  }
  return v1;
}

template <typename Scalar>
struct CdResult {
  Scalar loss = 0;
  ParamGrad<Scalar> grad;
};

/// Mean of F(v0) - F(v1) and its gradient with v1 held constant.
template <typename Scalar>
CdResult<Scalar> cd_loss_and_grad(const RbmParams<Scalar>& p, const Points<Scalar>& v0,
                                  const Points<Scalar>& v1,
                                  EncoderScaling scaling = EncoderScaling::EnergyConsistent) {
  CdResult<Scalar> r;
  r.loss = (free_energy(p, v0, scaling) - free_energy(p, v1, scaling)).mean();
  r.grad = free_energy_grad(p, v0, scaling);
  ParamGrad<Scalar> neg = free_energy_grad(p, v1, scaling);
  neg *= Scalar(-1);
  r.grad += neg;
  return r;
}

/// CD-1 loss and gradient on a batch.
template <typename Scalar>
CdResult<Scalar> cd_step(const RbmParams<Scalar>& p, const Points<Scalar>& batch, Rng& rng,
                         const CdOptions& opts = {}) {
  if (batch.rows() == 0) throw std::invalid_argument("cd_step: empty batch");
  const Points<Scalar> v1 = cd_reconstruct(p, batch, rng, opts);
  return cd_loss_and_grad(p, batch, v1, opts.scaling);
}

inline constexpr Index kMaxEnumeratedHidden = 12;

/// log Z under the energy-consistent energy, by enumerating all 2^m patterns
/// and integrating the Gaussian visible factor in closed form.
template <typename Scalar>
Scalar log_partition(const RbmParams<Scalar>& p) {
  const Index m = p.hidden();
  if (m > kMaxEnumeratedHidden)
    throw std::invalid_argument("log_partition: refusing to enumerate 2^" + std::to_string(m) +
                                " hidden patterns");
  const Scalar s2 = p.sigma * p.sigma;
  const std::uint32_t count = 1u << m;
  VecX<Scalar> terms(count);
  for (std::uint32_t code = 0; code < count; ++code) {
    const HiddenPattern<Scalar> h = pattern_from_code<Scalar>(code, m);
    const Vec2<Scalar> mu = decode_mean(p, h);
    terms(code) = p.hid_bias.dot(h) + (mu.squaredNorm() - p.vis_bias.squaredNorm()) / (Scalar(2) * s2);
  }
  const Scalar top = terms.maxCoeff();
  const Scalar lse = top + std::log((terms.array() - top).exp().sum());
  return lse + std::log(Scalar(2) * std::numbers::pi_v<Scalar> * s2);
}

template <typename Scalar>
VecX<Scalar> exact_log_likelihood(const RbmParams<Scalar>& p, const Points<Scalar>& v) {
  const Scalar log_z = log_partition(p);
  return (-free_energy(p, v, EncoderScaling::EnergyConsistent)).array() - log_z;
}

template <typename Scalar>
Scalar exact_log_likelihood(const RbmParams<Scalar>& p, const Vec2<Scalar>& v) {
  Points<Scalar> one(1, 2);
  one.row(0) = v.transpose();
  return exact_log_likelihood(p, one)(0);
}

}  // namespace crbm

#endif  // CRBM_RBM_HPP_
