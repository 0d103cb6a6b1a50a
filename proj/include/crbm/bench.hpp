#ifndef CRBM_BENCH_HPP_
#define CRBM_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crbm/data.hpp"
#include "crbm/trainer.hpp"

namespace crbm {

enum class Method { Crbm, IgciSlope, IgciEntropy };

std::string method_name(Method m);
Method method_from_string(std::string_view s);

struct PairResult {
  std::string pair_id;
  int round = 0;
  /// gamma for crbm, IGCI score otherwise; negative favours X -> Y.
  double gamma = 0;
  Direction decision = Direction::Undecided;
  Direction truth = Direction::XtoY;
  double weight = 1;
  double correct = 0.5;
  std::string method;
  int epochs_run = 0;
  /// Set when scoring threw; the record then counts as Undecided.
  bool failed = false;
  std::string diagnostic;
};

/// 1 if decision matches truth, 0.5 if undecided, 0 otherwise.
double score_decision(Direction decision, Direction truth);

/// sum(weight * correct) / sum(weight).
double weighted_accuracy(std::span<const PairResult> results);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0;
};

/// Weighted ROC for "truth is XtoY" scored by -gamma. Points run from the
/// +inf threshold (0, 0) through every distinct score to the -inf threshold
/// (1, 1); tied scores move together. Throws unless both classes occur.
RocCurve roc_auc(std::span<const PairResult> results);

/// Each record plus its coordinate-swapped image (gamma negated, truth and
/// decision flipped). Makes ROC defined on single-orientation datasets.
std::vector<PairResult> with_mirrors(std::span<const PairResult> results);

struct BenchSummary {
  std::string method;
  std::string dataset;
  double accuracy_mean = 0;
  double accuracy_std = 0;
  double auc_mean = 0;
  double auc_std = 0;
  int n_rounds = 1;
  std::string per_pair_table = "results.json#records";
};

struct BenchOutput {
  BenchSummary summary;
  /// Sorted by (pair id, round).
  std::vector<PairResult> records;
  /// Pooled over all rounds, mirrors included.
  RocCurve roc;
  /// True when at least one task failed.
  bool partial = false;
};

struct Verdict {
  double gamma = 0;
  Direction decision = Direction::Undecided;
  int epochs_run = 0;
  std::string diagnostic;
};

/// Scores one pair in one round. `rng` is the task's own stream.
using PairScorer = std::function<Verdict(const CauseEffectPair& pair, int round, Rng& rng)>;

struct BenchOptions {
  std::string dataset = "custom";
  int n_rounds = 10;
  std::uint64_t base_seed = 0;
  /// 0 picks the hardware concurrency.
  int threads = 0;
};

/// z-scores the pair, trains a cRBM and evaluates gamma.
Verdict crbm_verdict(const CauseEffectPair& pair, const TrainConfig& config, Rng& rng);

BenchOutput run_benchmark(const std::vector<CauseEffectPair>& pairs, Method method,
                          const TrainConfig& config, const BenchOptions& options);

/// Generic harness; `deterministic` methods run a single round.
BenchOutput run_benchmark(const std::vector<CauseEffectPair>& pairs, const PairScorer& scorer,
                          const std::string& method, bool deterministic, const BenchOptions& options);

/// Aggregates records that already exist (any order).
BenchOutput summarize(std::vector<PairResult> records, const std::string& method, const std::string& dataset,
                      int n_rounds);

/// Stable 64-bit key for a pair id, used to derive per-task seeds.
std::uint64_t pair_key(const std::string& id);

/// Writes results.json and roc.csv into `dir`.
void persist_results(const BenchOutput& output, const std::filesystem::path& dir);

/// Reads back what persist_results wrote.
BenchOutput load_results(const std::filesystem::path& dir);

/// `<dataset> <method> acc=<mean>±<std> auc=<mean>`
std::string summary_line(const BenchSummary& s);

}  // namespace crbm

#endif  // CRBM_BENCH_HPP_
