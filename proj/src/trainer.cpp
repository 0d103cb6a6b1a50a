#include "crbm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crbm {

void TrainConfig::validate() const {
  if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden must be >= 1");
  if (hidden > kMaxCenterHidden) throw std::invalid_argument("TrainConfig: hidden too large");
  if (!(sigma > 0)) throw std::invalid_argument("TrainConfig: sigma must be > 0");
  if (!(eta > 0)) throw std::invalid_argument("TrainConfig: eta must be > 0");
  if (!(decay_q > 0 && decay_q <= 1)) throw std::invalid_argument("TrainConfig: decay_q must be in (0, 1]");
  if (!(lambda >= 0)) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
  if (batch_size < 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 0");
  if (!(ema_factor >= 0 && ema_factor < 1)) throw std::invalid_argument("TrainConfig: ema_factor must be in [0, 1)");
  if (!(holdout_fraction >= 0 && holdout_fraction < 1))
    throw std::invalid_argument("TrainConfig: holdout_fraction must be in [0, 1)");
}

Params init_params(const TrainConfig& config, Rng& rng) {
  Params p = Params::zeros(config.hidden, config.sigma);
  std::normal_distribution<double> normal(0.0, 0.01);
  for (Index i = 0; i < config.hidden; ++i)
    for (Index j = 0; j < 2; ++j) p.weights(i, j) = normal(rng);
  if (config.mirror_init) p.weights.col(0).swap(p.weights.col(1));
  return p;
}

namespace {

Points<double> gather_rows(const Points<double>& src, const std::vector<Index>& rows,
                           std::size_t begin, std::size_t end) {
  Points<double> out(static_cast<Index>(end - begin), 2);
  for (std::size_t k = begin; k < end; ++k) out.row(static_cast<Index>(k - begin)) = src.row(rows[k]);
  return out;
}

}  // namespace

OptimizeResult optimize(Params start, const Points<double>& train_set, const Ranges& ranges,
                        const TrainConfig& config, Rng& rng) {
  config.validate();
  start.validate();
  if (train_set.rows() == 0) throw std::invalid_argument("optimize: empty training set");

  OptimizeResult out;
  out.params = std::move(start);
  Params& p = out.params;
  const CdOptions cd_opts{config.encoder_scaling, config.sampled_reconstruction};
  const auto n = static_cast<std::size_t>(train_set.rows());
  const std::size_t batch =
      config.batch_size == 0 ? n : std::min(n, static_cast<std::size_t>(config.batch_size));
  const bool full_batch = batch == n;

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});

  double ema = 0;
  double best = 0;
  int stale = 0;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double step = config.eta * std::pow(config.decay_q, epoch);
    if (!full_batch) std::shuffle(order.begin(), order.end(), rng);

    double cd_sum = 0;
    std::size_t cd_points = 0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      const CdResult<double> cd =
          full_batch ? cd_step(p, train_set, rng, cd_opts)
                     : cd_step(p, gather_rows(train_set, order, begin, end), rng, cd_opts);
      Grad g = cd.grad;
      if (config.lambda > 0) {
        Grad r = reg_grad(p, ranges);
        r *= config.lambda;
        g += r;
      }
      axpy(p, -step, g);
      cd_sum += cd.loss * static_cast<double>(end - begin);
      cd_points += end - begin;
    }
    if (!p.weights.allFinite() || !p.vis_bias.allFinite() || !p.hid_bias.allFinite())
      throw std::runtime_error("optimize: parameters diverged at epoch " + std::to_string(epoch));

    EpochLoss loss;
    loss.cd = cd_sum / static_cast<double>(cd_points);
    loss.reg = config.lambda > 0 ? reg_term(p, ranges) : 0.0;
    loss.total = loss.cd + config.lambda * loss.reg;
    out.loss_trace.push_back(loss);
    out.step_sizes.push_back(step);
    out.epochs_run = epoch + 1;

    if (epoch == 0) {
      ema = best = loss.total;
      continue;
    }
    ema = config.ema_factor * ema + (1 - config.ema_factor) * loss.total;
    if (ema < best - config.min_delta) {
      best = ema;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return out;
}

TrainResult train(const Points<double>& pair, const TrainConfig& config, Rng& rng) {
  config.validate();
  if (pair.rows() < 2) throw std::invalid_argument("train: need at least two observations");
  if (!pair.allFinite()) throw std::invalid_argument("train: non-finite observation");
  for (Index j = 0; j < 2; ++j)
    if (pair.col(j).maxCoeff() == pair.col(j).minCoeff())
      throw std::invalid_argument("train: zero variance in coordinate " + std::to_string(j + 1));

  const auto n = static_cast<std::size_t>(pair.rows());
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto n_hold = static_cast<std::size_t>(std::floor(config.holdout_fraction * static_cast<double>(n)));
  n_hold = std::min(n_hold, n - 2);
  const Points<double> train_set = gather_rows(pair, order, n_hold, n);
  const Points<double> holdout = gather_rows(pair, order, 0, n_hold);

  TrainResult result;
  result.ranges = Ranges::of(train_set);
  if (!(result.ranges.x.width() > 0) || !(result.ranges.y.width() > 0))
    throw std::invalid_argument("train: training split has a degenerate range");

  Params start = init_params(config, rng);
  OptimizeResult opt = optimize(std::move(start), train_set, result.ranges, config, rng);
  result.params = std::move(opt.params);
  result.loss_trace = std::move(opt.loss_trace);
  result.step_sizes = std::move(opt.step_sizes);
  result.epochs_run = opt.epochs_run;
  result.recon_error = reconstruction_error(result.params, holdout.rows() > 0 ? holdout : train_set,
                                            rng, config.encoder_scaling);
  return result;
}

TrainResult train(const Points<double>& pair, const TrainConfig& config) {
  Rng rng = make_rng(config.seed);
  return train(pair, config, rng);
}

double reconstruction_error(const Params& params, const Points<double>& data, Rng& rng,
                            EncoderScaling scaling, int samples_per_point) {
  if (data.rows() == 0) throw std::invalid_argument("reconstruction_error: empty data");
  if (samples_per_point < 1) throw std::invalid_argument("reconstruction_error: need at least one sample");
  double total = 0;
  for (int s = 0; s < samples_per_point; ++s) {
    const MatX<double> h = sample_hidden(params, data, rng, scaling);
    total += (decode_mean(params, h) - data).rowwise().squaredNorm().sum();
  }
  return total / (static_cast<double>(data.rows()) * samples_per_point);
}

Params truncate_params(const Params& params, int digits) {
  auto round_sig = [digits](double v) {
    if (v == 0 || !std::isfinite(v)) return v;
    const double scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::round(v * scale) / scale;
  };
  Params out = params;
  out.weights = out.weights.unaryExpr(round_sig);
  out.vis_bias = out.vis_bias.unaryExpr(round_sig);
  out.hid_bias = out.hid_bias.unaryExpr(round_sig);
  return out;
}

}  // namespace crbm
