// Command-line front end: dataset generation, single-pair training,
// benchmarks and capacity diagnostics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crbm/bench.hpp"
#include "crbm/criterion.hpp"
#include "crbm/data.hpp"
#include "crbm/trainer.hpp"

namespace {

using namespace crbm;

struct CliConfig {
  std::string data_dir;
  std::string out_dir = "results";
  std::string method = "crbm";
  std::string dataset = "SIM-LIN";
  std::string scaling = "energy";
  Index hidden = 5;
  double sigma = 0.5;
  std::optional<double> lambda;
  double eta = 1e-3;
  double q = 0.9;
  int epochs = 5000;
  int patience = 50;
  Index batch_size = TrainConfig{}.batch_size;
  int rounds = 10;
  std::uint64_t base_seed = 0;
  int threads = 0;
  // gen-simlin
  int n_pairs = 100;
  Index n_obs = 1000;
  std::uint64_t data_seed = 0;
  // train-pair / capacity
  std::string pair_file;
  bool swap = false;
  std::string params_out;
};

TrainConfig train_config(const CliConfig& c) {
  TrainConfig t;
  t.hidden = c.hidden;
  t.sigma = c.sigma;
  t.lambda = c.lambda ? *c.lambda : (c.dataset == "SIM" ? 3.0 : 1.0);
  t.eta = c.eta;
  t.decay_q = c.q;
  t.max_epochs = c.epochs;
  t.patience = c.patience;
  t.batch_size = c.batch_size;
  t.seed = c.base_seed;
  if (c.scaling == "energy") {
    t.encoder_scaling = EncoderScaling::EnergyConsistent;
  } else if (c.scaling == "unscaled") {
    t.encoder_scaling = EncoderScaling::Unscaled;
  } else {
    throw std::invalid_argument("--scaling must be 'energy' or 'unscaled'");
  }
  t.validate();
  return t;
}

// Reads the first two columns of a whitespace-separated file as (x, y).
CauseEffectPair read_pair_file(const std::string& path, bool swap) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    double x = 0;
    double y = 0;
    if (!(row >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (!(row >> y)) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected two columns");
    xs.push_back(x);
    ys.push_back(y);
  }
  CauseEffectPair pair;
  pair.id = std::filesystem::path(path).stem().string();
  pair.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size()));
  pair.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Index>(ys.size()));
  pair.source = "file";
  if (swap) std::swap(pair.x, pair.y);
  return pair;
}

struct TrainedPair {
  TrainResult result;
  Decision<double> decision;
};

TrainedPair train_pair(const CliConfig& c) {
  CauseEffectPair pair = read_pair_file(c.pair_file, c.swap);
  TrainConfig config = train_config(c);
  config.mirror_init = c.swap;
  Points<double> pts(pair.size(), 2);
  pts.col(0) = zscore(pair.x);
  pts.col(1) = zscore(pair.y);
  TrainedPair out;
  out.result = train(pts, config);
  out.decision = gamma(out.result.params, out.result.ranges);
  return out;
}

// Capacity of evenly spaced centers covering the same range with the same m and sigma.
double uniform_reference_capacity(const Params& trained, const Interval<double>& range, Axis axis) {
  Params ref = Params::zeros(trained.hidden(), trained.sigma);
  const double delta = range.width() / static_cast<double>(Index{1} << trained.hidden());
  const int j = static_cast<int>(axis);
  for (Index i = 0; i < trained.hidden(); ++i) ref.weights(i, j) = delta * static_cast<double>(Index{1} << i);
  ref.vis_bias(j) = range.lower + delta / 2;
  return estimation_capacity(ref, axis, capacity_grid(ref, range));
}

void write_params(const Params& p, const std::string& path) {
  const Params t = truncate_params(p, 6);
  nlohmann::json j;
  j["sigma"] = t.sigma;
  j["vis_bias"] = {t.vis_bias(0), t.vis_bias(1)};
  j["hid_bias"] = std::vector<double>(t.hid_bias.data(), t.hid_bias.data() + t.hid_bias.size());
  nlohmann::json w = nlohmann::json::array();
  for (Index i = 0; i < t.hidden(); ++i) w.push_back({t.weights(i, 0), t.weights(i, 1)});
  j["weights"] = w;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

int cmd_gen_simlin(const CliConfig& c) {
  if (c.out_dir.empty()) throw std::invalid_argument("gen-simlin needs --out-dir");
  const auto pairs = gen_simlin({c.n_pairs, c.n_obs, c.data_seed});
  write_pairs(c.out_dir, pairs);
  std::printf("wrote %zu pairs of %lld observations to %s\n", pairs.size(), static_cast<long long>(c.n_obs),
              c.out_dir.c_str());
  return 0;
}

int cmd_train_pair(const CliConfig& c) {
  const TrainedPair t = train_pair(c);
  const auto& p = t.result.params;
  std::printf("gamma=%.9g\n", t.decision.gamma);
  std::printf("d_x=%.9g\n", t.decision.d_x);
  std::printf("d_y=%.9g\n", t.decision.d_y);
  std::printf("decision=%s\n", std::string(to_string(t.decision.direction)).c_str());
  std::printf("recon_error=%.9g\n", t.result.recon_error);
  std::printf("capacity_x=%.9g\n", estimation_capacity(p, Axis::X, capacity_grid(p, t.result.ranges.x)));
  std::printf("capacity_y=%.9g\n", estimation_capacity(p, Axis::Y, capacity_grid(p, t.result.ranges.y)));
  std::printf("epochs_run=%d\n", t.result.epochs_run);
  if (!t.result.loss_trace.empty()) std::printf("final_reg=%.9g\n", t.result.loss_trace.back().reg);
  if (!c.params_out.empty()) write_params(p, c.params_out);
  return 0;
}

int cmd_capacity(const CliConfig& c) {
  const TrainedPair t = train_pair(c);
  const auto& p = t.result.params;
  for (Axis a : {Axis::X, Axis::Y}) {
    const auto& range = t.result.ranges[a];
    const char* name = a == Axis::X ? "x" : "y";
    std::printf("capacity_%s=%.9g uniform_reference_%s=%.9g\n", name,
                estimation_capacity(p, a, capacity_grid(p, range)), name,
                uniform_reference_capacity(p, range, a));
  }
  std::printf("gamma=%.9g decision=%s\n", t.decision.gamma, std::string(to_string(t.decision.direction)).c_str());
  return 0;
}

std::vector<CauseEffectPair> load_dataset(const CliConfig& c) {
  if (c.data_dir.empty()) {
    if (c.dataset != "SIM-LIN") throw std::invalid_argument("--data-dir is required for dataset " + c.dataset);
    return gen_simlin({c.n_pairs, c.n_obs, c.data_seed});
  }
  LoadReport report = c.dataset == "CEP" ? load_tuebingen(c.data_dir) : load_pair_directory(c.data_dir, c.dataset);
  for (const auto& d : report.diagnostics) std::fprintf(stderr, "warning: %s\n", d.c_str());
  if (report.pairs.empty()) throw std::runtime_error("no usable pairs in " + c.data_dir);
  return std::move(report.pairs);
}

int cmd_bench(const CliConfig& c) {
  const auto pairs = load_dataset(c);
  const TrainConfig config = train_config(c);
  BenchOptions options;
  options.dataset = c.dataset;
  options.n_rounds = c.rounds;
  options.base_seed = c.base_seed;
  options.threads = c.threads;
  const BenchOutput out = run_benchmark(pairs, method_from_string(c.method), config, options);
  persist_results(out, c.out_dir);
  std::printf("%s\n", summary_line(out.summary).c_str());
  if (out.partial) {
    for (const auto& r : out.records)
      if (r.failed) std::fprintf(stderr, "error: %s round %d: %s\n", r.pair_id.c_str(), r.round, r.diagnostic.c_str());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal direction from mode placement in a regularized Gaussian-Bernoulli RBM"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.allow_config_extras(false);

  CliConfig c;
  app.add_option("-m,--hidden", c.hidden, "hidden units")->capture_default_str();
  app.add_option("--sigma", c.sigma, "decoder standard deviation")->capture_default_str();
  app.add_option("--lambda", c.lambda, "regularization weight (default 1, or 3 for SIM)");
  app.add_option("--eta", c.eta, "initial step size")->capture_default_str();
  app.add_option("--q", c.q, "per-epoch step-size multiplier")->capture_default_str();
  app.add_option("--epochs", c.epochs, "maximum epochs")->capture_default_str();
  app.add_option("--patience", c.patience, "epochs without improvement before stopping")->capture_default_str();
  app.add_option("--batch-size", c.batch_size, "points per gradient step, 0 = full batch")->capture_default_str();
  app.add_option("--scaling", c.scaling, "encoder scaling: energy or unscaled")->capture_default_str();
  app.add_option("--rounds", c.rounds, "training rounds per pair")->capture_default_str();
  app.add_option("--base-seed", c.base_seed, "seed for training streams")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--dataset", c.dataset, "dataset tag: CEP, SIM, SIM-C, SIM-LIN")->capture_default_str();
  app.add_option("--method", c.method, "crbm, igci1 or igci2")->capture_default_str();
  app.add_option("--data-dir", c.data_dir, "directory with pairXXXX.txt and pairmeta.txt");
  app.add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  app.add_option("--pairs", c.n_pairs, "number of generated pairs")->capture_default_str();
  app.add_option("--obs", c.n_obs, "observations per generated pair")->capture_default_str();
  app.add_option("--data-seed", c.data_seed, "seed for dataset generation")->capture_default_str();

  auto* gen = app.add_subcommand("gen-simlin", "generate the linear SCM dataset");
  auto* train_cmd = app.add_subcommand("train-pair", "train one cRBM and report gamma and diagnostics");
  train_cmd->add_option("pair_file", c.pair_file, "two-column pair file")->required();
  train_cmd->add_flag("--swap", c.swap, "exchange the columns (and mirror the initialization)");
  train_cmd->add_option("--params-out", c.params_out, "write trained parameters as JSON");
  auto* bench = app.add_subcommand("bench", "run a benchmark and write results.json and roc.csv");
  auto* cap = app.add_subcommand("capacity", "estimation capacity of a trained cRBM per coordinate");
  cap->add_option("pair_file", c.pair_file, "two-column pair file")->required();
  cap->add_flag("--swap", c.swap, "exchange the columns");
  for (auto* sub : {gen, train_cmd, bench, cap}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_simlin(c);
    if (train_cmd->parsed()) return cmd_train_pair(c);
    if (bench->parsed()) return cmd_bench(c);
    if (cap->parsed()) return cmd_capacity(c);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
