#ifndef CRBM_TRAINER_HPP_
#define CRBM_TRAINER_HPP_

#include <cstdint>
#include <vector>

#include "crbm/criterion.hpp"
#include "crbm/rbm.hpp"
#include "crbm/regularizer.hpp"

namespace crbm {

using Params = RbmParams<double>;
using Grad = ParamGrad<double>;
using Ranges = RangeBox<double>;

struct TrainConfig {
  Index hidden = 5;
  double sigma = 0.5;
  double lambda = 1.0;
  double eta = 1e-3;
  double decay_q = 0.9;
  int max_epochs = 5000;
  int patience = 50;
  double min_delta = 1e-5;
  double ema_factor = 0.9;
  std::uint64_t seed = 0;
  EncoderScaling encoder_scaling = EncoderScaling::EnergyConsistent;
  bool sampled_reconstruction = false;
  /// Points per gradient step; 0 means one full-batch step per epoch.
  Index batch_size = 0;
  double holdout_fraction = 0.2;
  /// Exchange the two columns of the initial weights. Training on swapped
  /// data with this set mirrors the unswapped run exactly.
  bool mirror_init = false;

  void validate() const;
};

struct EpochLoss {
  double cd = 0;
  double reg = 0;
  double total = 0;
};

struct TrainResult {
  Params params;
  std::vector<EpochLoss> loss_trace;
  /// Step size applied during each epoch.
  std::vector<double> step_sizes;
  int epochs_run = 0;
  double recon_error = 0;
  Ranges ranges;
};

/// W ~ N(0, 0.01^2) i.i.d., zero biases.
Params init_params(const TrainConfig& config, Rng& rng);

struct OptimizeResult {
  Params params;
  std::vector<EpochLoss> loss_trace;
  std::vector<double> step_sizes;
  int epochs_run = 0;
};

/// Runs the descent loop on L = CD + lambda R from a given start point.
OptimizeResult optimize(Params start, const Points<double>& train_set, const Ranges& ranges,
                        const TrainConfig& config, Rng& rng);

/// Full training run on a z-scored pair: split, ranges, init, descent,
/// held-out reconstruction error.
TrainResult train(const Points<double>& pair, const TrainConfig& config, Rng& rng);

TrainResult train(const Points<double>& pair, const TrainConfig& config);

/// Mean squared distance between v and decode_mean(h), h ~ p(h|v),
/// averaged over `samples_per_point` hidden draws.
double reconstruction_error(const Params& params, const Points<double>& data, Rng& rng,
                            EncoderScaling scaling = EncoderScaling::EnergyConsistent,
                            int samples_per_point = 16);

/// Rounds every parameter to `digits` significant digits.
Params truncate_params(const Params& params, int digits = 6);

}  // namespace crbm

#endif  // CRBM_TRAINER_HPP_
