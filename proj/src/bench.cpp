#include "crbm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "crbm/criterion.hpp"
#include "crbm/igci.hpp"

namespace crbm {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::Crbm:
      return "crbm";
    case Method::IgciSlope:
      return "igci1";
    case Method::IgciEntropy:
      return "igci2";
  }
  return "crbm";
}

Method method_from_string(std::string_view s) {
  if (s == "crbm") return Method::Crbm;
  if (s == "igci1") return Method::IgciSlope;
  if (s == "igci2") return Method::IgciEntropy;
  throw std::invalid_argument("unknown method '" + std::string(s) + "' (expected crbm, igci1 or igci2)");
}

double score_decision(Direction decision, Direction truth) {
  if (decision == Direction::Undecided) return 0.5;
  return decision == truth ? 1.0 : 0.0;
}

double weighted_accuracy(std::span<const PairResult> results) {
  if (results.empty()) throw std::invalid_argument("weighted_accuracy: no results");
  double num = 0;
  double den = 0;
  for (const auto& r : results) {
    if (!(r.weight > 0)) throw std::invalid_argument("weighted_accuracy: non-positive weight for " + r.pair_id);
    num += r.weight * r.correct;
    den += r.weight;
  }
  return num / den;
}

RocCurve roc_auc(std::span<const PairResult> results) {
  struct Scored {
    double score;
    double weight;
    bool positive;
  };
  std::vector<Scored> items;
  double pos = 0;
  double neg = 0;
  for (const auto& r : results) {
    if (r.truth == Direction::Undecided) throw std::invalid_argument("roc_auc: undecided ground truth");
    const bool positive = r.truth == Direction::XtoY;
    items.push_back({-r.gamma, r.weight, positive});
    (positive ? pos : neg) += r.weight;
  }
  if (!(pos > 0) || !(neg > 0)) throw std::invalid_argument("roc_auc: need both truth classes");
  std::sort(items.begin(), items.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  double tp = 0;
  double fp = 0;
  for (std::size_t k = 0; k < items.size();) {
    const double threshold = items[k].score;
    for (; k < items.size() && items[k].score == threshold; ++k) (items[k].positive ? tp : fp) += items[k].weight;
    roc.points.push_back({fp / neg, tp / pos});
  }
  roc.points.push_back({1.0, 1.0});
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    const auto& a = roc.points[k - 1];
    const auto& b = roc.points[k];
    roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2;
  }
  return roc;
}

std::vector<PairResult> with_mirrors(std::span<const PairResult> results) {
  std::vector<PairResult> out(results.begin(), results.end());
  out.reserve(2 * results.size());
  for (const auto& r : results) {
    PairResult m = r;
    m.pair_id += "~";
    m.gamma = -r.gamma;
    m.truth = flip(r.truth);
    m.decision = flip(r.decision);
    out.push_back(std::move(m));
  }
  return out;
}

std::uint64_t pair_key(const std::string& id) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Verdict crbm_verdict(const CauseEffectPair& pair, const TrainConfig& config, Rng& rng) {
  Points<double> pts(pair.size(), 2);
  pts.col(0) = zscore(pair.x);
  pts.col(1) = zscore(pair.y);
  const TrainResult result = train(pts, config, rng);
  const Decision<double> d = gamma(result.params, result.ranges);
  return {d.gamma, d.direction, result.epochs_run, {}};
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

BenchOutput summarize(std::vector<PairResult> records, const std::string& method, const std::string& dataset,
                      int n_rounds) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::sort(records.begin(), records.end(), [](const PairResult& a, const PairResult& b) {
    return a.pair_id != b.pair_id ? a.pair_id < b.pair_id : a.round < b.round;
  });

  std::map<int, std::vector<PairResult>> by_round;
  for (const auto& r : records) by_round[r.round].push_back(r);

  std::vector<double> accuracies;
  std::vector<double> aucs;
  for (const auto& [round, rs] : by_round) {
    accuracies.push_back(weighted_accuracy(rs));
    aucs.push_back(roc_auc(with_mirrors(rs)).auc);
  }

  BenchOutput out;
  out.summary.method = method;
  out.summary.dataset = dataset;
  out.summary.n_rounds = n_rounds;
  out.summary.accuracy_mean = mean_of(accuracies);
  out.summary.accuracy_std = sample_std(accuracies);
  out.summary.auc_mean = mean_of(aucs);
  out.summary.auc_std = sample_std(aucs);
  out.roc = roc_auc(with_mirrors(records));
  out.partial = std::any_of(records.begin(), records.end(), [](const PairResult& r) { return r.failed; });
  out.records = std::move(records);
  return out;
}

BenchOutput run_benchmark(const std::vector<CauseEffectPair>& pairs, const PairScorer& scorer,
                          const std::string& method, bool deterministic, const BenchOptions& options) {
  if (pairs.empty()) throw std::invalid_argument("run_benchmark: no pairs");
  if (options.n_rounds < 1) throw std::invalid_argument("run_benchmark: n_rounds must be >= 1");
  const int rounds = deterministic ? 1 : options.n_rounds;
  const std::size_t tasks = pairs.size() * static_cast<std::size_t>(rounds);
  std::vector<PairResult> records(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const auto& pair = pairs[t / static_cast<std::size_t>(rounds)];
      const int round = static_cast<int>(t % static_cast<std::size_t>(rounds));
      PairResult& rec = records[t];
      rec.pair_id = pair.id;
      rec.round = round;
      rec.truth = pair.truth;
      rec.weight = pair.weight;
      rec.method = method;
      Rng rng = make_rng(options.base_seed, pair_key(pair.id), static_cast<std::uint64_t>(round));
      try {
        const Verdict v = scorer(pair, round, rng);
        rec.gamma = v.gamma;
        rec.decision = v.decision;
        rec.epochs_run = v.epochs_run;
        rec.diagnostic = v.diagnostic;
      } catch (const std::exception& e) {
        rec.gamma = 0;
        rec.decision = Direction::Undecided;
        rec.failed = true;
        rec.diagnostic = std::string("failed: ") + e.what();
      }
      rec.correct = score_decision(rec.decision, rec.truth);
    }
  };

  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::min<std::size_t>(tasks, 256)));
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  return summarize(std::move(records), method, options.dataset, rounds);
}

BenchOutput run_benchmark(const std::vector<CauseEffectPair>& pairs, Method method, const TrainConfig& config,
                          const BenchOptions& options) {
  switch (method) {
    case Method::Crbm:
      return run_benchmark(
          pairs, [&config](const CauseEffectPair& p, int, Rng& rng) { return crbm_verdict(p, config, rng); },
          method_name(method), false, options);
    case Method::IgciSlope:
    case Method::IgciEntropy:
      return run_benchmark(
          pairs,
          [method](const CauseEffectPair& p, int, Rng&) {
            const IgciScore s = method == Method::IgciSlope ? igci_slope(p.x, p.y) : igci_entropy(p.x, p.y);
            return Verdict{s.score, s.direction, 0, s.diagnostic};
          },
          method_name(method), true, options);
  }
  throw std::invalid_argument("run_benchmark: unknown method");
}

namespace {

json record_to_json(const PairResult& r) {
  return json{{"pair", r.pair_id},       {"round", r.round},
              {"gamma", r.gamma},        {"decision", std::string(to_string(r.decision))},
              {"truth", std::string(to_string(r.truth))},
              {"weight", r.weight},      {"correct", r.correct},
              {"method", r.method},      {"epochs_run", r.epochs_run},
              {"failed", r.failed},      {"diagnostic", r.diagnostic}};
}

PairResult record_from_json(const json& j) {
  PairResult r;
  r.pair_id = j.at("pair").get<std::string>();
  r.round = j.at("round").get<int>();
  r.gamma = j.at("gamma").get<double>();
  r.decision = direction_from_string(j.at("decision").get<std::string>());
  r.truth = direction_from_string(j.at("truth").get<std::string>());
  r.weight = j.at("weight").get<double>();
  r.correct = j.at("correct").get<double>();
  r.method = j.at("method").get<std::string>();
  r.epochs_run = j.at("epochs_run").get<int>();
  r.failed = j.at("failed").get<bool>();
  r.diagnostic = j.at("diagnostic").get<std::string>();
  return r;
}

}  // namespace

void persist_results(const BenchOutput& output, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  const auto& s = output.summary;
  json doc;
  doc["summary"] = json{{"method", s.method},
                        {"dataset", s.dataset},
                        {"accuracy_mean", s.accuracy_mean},
                        {"accuracy_std", s.accuracy_std},
                        {"auc_mean", s.auc_mean},
                        {"auc_std", s.auc_std},
                        {"n_rounds", s.n_rounds},
                        {"per_pair_table", s.per_pair_table}};
  doc["partial"] = output.partial;
  json recs = json::array();
  for (const auto& r : output.records) recs.push_back(record_to_json(r));
  doc["records"] = std::move(recs);

  const auto json_path = dir / "results.json";
  {
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot write " + json_path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + json_path.string());
  }

  const auto csv_path = dir / "roc.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  csv << "fpr,tpr\n";
  char buf[64];
  for (const auto& p : output.roc.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.fpr, p.tpr);
    csv << buf;
  }
  if (!csv) throw std::runtime_error("write failed for " + csv_path.string());
}

BenchOutput load_results(const std::filesystem::path& dir) {
  const auto json_path = dir / "results.json";
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(json_path.string() + ": " + e.what());
  }
  BenchOutput out;
  const auto& s = doc.at("summary");
  out.summary.method = s.at("method").get<std::string>();
  out.summary.dataset = s.at("dataset").get<std::string>();
  out.summary.accuracy_mean = s.at("accuracy_mean").get<double>();
  out.summary.accuracy_std = s.at("accuracy_std").get<double>();
  out.summary.auc_mean = s.at("auc_mean").get<double>();
  out.summary.auc_std = s.at("auc_std").get<double>();
  out.summary.n_rounds = s.at("n_rounds").get<int>();
  out.summary.per_pair_table = s.at("per_pair_table").get<std::string>();
  out.partial = doc.at("partial").get<bool>();
  for (const auto& r : doc.at("records")) out.records.push_back(record_from_json(r));

  const auto csv_path = dir / "roc.csv";
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  std::getline(csv, line);
  if (line != "fpr,tpr") throw std::runtime_error(csv_path.string() + ": unexpected header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(csv_path.string() + ": malformed row");
    out.roc.points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  for (std::size_t k = 1; k < out.roc.points.size(); ++k) {
    const auto& a = out.roc.points[k - 1];
    const auto& b = out.roc.points[k];
    out.roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2;
  }
  return out;
}

std::string summary_line(const BenchSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s acc=%.4f±%.4f auc=%.4f", s.dataset.c_str(), s.method.c_str(),
                s.accuracy_mean, s.accuracy_std, s.auc_mean);
  return buf;
}

}  // namespace crbm
