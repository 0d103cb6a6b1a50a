#include "crbm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crbm {

Direction direction_from_string(std::string_view s) {
  if (s == "XtoY") return Direction::XtoY;
  if (s == "YtoX") return Direction::YtoX;
  if (s == "Undecided") return Direction::Undecided;
  throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

void CauseEffectPair::validate() const {
  if (x.size() != y.size()) throw std::invalid_argument(id + ": x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument(id + ": need at least two observations");
  if (!(weight > 0) || !std::isfinite(weight)) throw std::invalid_argument(id + ": weight must be positive");
  if (truth == Direction::Undecided) throw std::invalid_argument(id + ": ground truth must be a direction");
  if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument(id + ": non-finite observation");
}

Points<double> CauseEffectPair::points() const {
  Points<double> p(x.size(), 2);
  p.col(0) = x;
  p.col(1) = y;
  return p;
}

CauseEffectPair CauseEffectPair::swapped() const {
  CauseEffectPair out = *this;
  std::swap(out.x, out.y);
  out.truth = flip(truth);
  return out;
}

Eigen::VectorXd zscore(const Eigen::VectorXd& s) {
  if (s.size() == 0) throw std::invalid_argument("zscore: empty series");
  const double mean = s.mean();
  const Eigen::VectorXd centered = s.array() - mean;
  const double var = centered.squaredNorm() / static_cast<double>(s.size());
  if (!(var > 0)) throw std::invalid_argument("zscore: zero variance");
  return centered / std::sqrt(var);
}

Eigen::VectorXd first_pc(const Eigen::MatrixXd& data) {
  const Index t = data.rows();
  const Index d = data.cols();
  if (d < 1) throw std::invalid_argument("first_pc: no columns");
  if (t <= d) throw std::invalid_argument("first_pc: need more rows than columns");
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  if (centered.cwiseAbs().maxCoeff() == 0) throw std::invalid_argument("first_pc: rank-0 matrix");
  if (d == 1) return centered.col(0);

  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(t);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("first_pc: eigen-solve failed");
  Eigen::VectorXd axis = eig.eigenvectors().col(d - 1);
  Index top = 0;
  axis.cwiseAbs().maxCoeff(&top);
  if (axis(top) < 0) axis = -axis;
  return centered * axis;
}

std::vector<MixtureComponent> random_mixture(Rng& rng) {
  const int k = std::uniform_int_distribution<int>(1, 5)(rng);
  std::uniform_real_distribution<double> mean(-2.0, 2.0);
  std::uniform_real_distribution<double> sd(0.2, 1.0);
  std::exponential_distribution<double> gamma1(1.0);
  std::vector<MixtureComponent> mix(static_cast<std::size_t>(k));
  double total = 0;
  for (auto& c : mix) {
    c.mean = mean(rng);
    c.stddev = sd(rng);
    c.weight = gamma1(rng);
    total += c.weight;
  }
  for (auto& c : mix) c.weight /= total;
  return mix;
}

Eigen::VectorXd sample_mixture(const std::vector<MixtureComponent>& mixture, Rng& rng, Index n) {
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be >= 1");
  if (mixture.empty()) throw std::invalid_argument("sample_mixture: empty mixture");
  std::vector<double> weights;
  for (const auto& c : mixture) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(n);
  for (Index t = 0; t < n; ++t) {
    const auto& c = mixture[pick(rng)];
    out(t) = c.mean + c.stddev * normal(rng);
  }
  if (n == 1) return Eigen::VectorXd::Zero(1);
  return zscore(out);
}

Eigen::VectorXd sample_random_distribution(Rng& rng, Index n) {
  const auto mixture = random_mixture(rng);
  return sample_mixture(mixture, rng, n);
}

namespace {

double population_variance(const Eigen::VectorXd& s) {
  return (s.array() - s.mean()).square().mean();
}

}  // namespace

CauseEffectPair make_simlin_pair(const std::string& id, Index n_obs, Rng& rng,
                                 std::optional<double> forced_slope) {
  CauseEffectPair pair;
  pair.id = id;
  pair.source = "SIM-LIN";
  pair.truth = Direction::XtoY;
  pair.weight = 1.0;
  const Eigen::VectorXd n1 = sample_random_distribution(rng, n_obs);
  const Eigen::VectorXd n2 = sample_random_distribution(rng, n_obs);
  const double slope = forced_slope ? *forced_slope : std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  const double noise_scale =
      std::sqrt(std::max(0.0, 1.0 - slope * slope) * population_variance(n1) / population_variance(n2));
  pair.x = n1;
  pair.y = slope * n1 + noise_scale * n2;
  return pair;
}

std::string pair_name(int number) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pair%04d", number);
  return buf;
}

std::vector<CauseEffectPair> gen_simlin(const SimLinSpec& spec) {
  if (spec.n_pairs < 1 || spec.n_obs < 2) throw std::invalid_argument("gen_simlin: counts must be positive");
  std::vector<CauseEffectPair> pairs;
  pairs.reserve(static_cast<std::size_t>(spec.n_pairs));
  for (int k = 0; k < spec.n_pairs; ++k) {
    Rng rng = make_rng(spec.seed, static_cast<std::uint64_t>(k));
    pairs.push_back(make_simlin_pair(pair_name(k + 1), spec.n_obs, rng));
  }
  return pairs;
}

namespace {

struct MetaRow {
  int number = 0;
  int cause_first = 0;
  int cause_last = 0;
  int effect_first = 0;
  int effect_last = 0;
  double weight = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

Eigen::MatrixXd read_numeric_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    std::vector<double> row;
    for (auto tok : toks) {
      double v = 0;
      if (!parse_number(tok, v))
        throw std::runtime_error(file.filename().string() + ":" + std::to_string(line_no) +
                                 ": non-numeric value '" + std::string(tok) + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(file.filename().string() + ":" + std::to_string(line_no) +
                               ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(file.filename().string() + ": no observations");
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return out;
}

Eigen::VectorXd reduce_columns(const Eigen::MatrixXd& table, int first, int last) {
  if (first == last) return table.col(first - 1);
  return first_pc(table.middleCols(first - 1, last - first + 1));
}

}  // namespace

LoadReport load_pair_directory(const std::filesystem::path& dir, const std::string& source) {
  const auto meta_path = dir / "pairmeta.txt";
  std::ifstream meta(meta_path);
  if (!meta) throw std::runtime_error("missing meta file " + meta_path.string());

  LoadReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(meta, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    MetaRow row;
    if (toks.size() < 6 || !parse_number(toks[0], row.number) || !parse_number(toks[1], row.cause_first) ||
        !parse_number(toks[2], row.cause_last) || !parse_number(toks[3], row.effect_first) ||
        !parse_number(toks[4], row.effect_last) || !parse_number(toks[5], row.weight)) {
      report.diagnostics.push_back("pairmeta.txt:" + std::to_string(line_no) + ": malformed meta row");
      continue;
    }
    const std::string id = pair_name(row.number);
    try {
      const Eigen::MatrixXd table = read_numeric_table(dir / (id + ".txt"));
      const int cols = static_cast<int>(table.cols());
      auto check_span = [&](int first, int last, const char* what) {
        if (first < 1 || last < first || last > cols)
          throw std::runtime_error(std::string(what) + " columns " + std::to_string(first) + "-" +
                                   std::to_string(last) + " out of range (file has " + std::to_string(cols) +
                                   " columns)");
      };
      check_span(row.cause_first, row.cause_last, "cause");
      check_span(row.effect_first, row.effect_last, "effect");
      if (!(row.weight > 0)) throw std::runtime_error("non-positive weight");

      CauseEffectPair pair;
      pair.id = id;
      pair.source = source;
      pair.weight = row.weight;
      const Eigen::VectorXd cause = reduce_columns(table, row.cause_first, row.cause_last);
      const Eigen::VectorXd effect = reduce_columns(table, row.effect_first, row.effect_last);
      if (row.cause_first <= row.effect_first) {
        pair.x = cause;
        pair.y = effect;
        pair.truth = Direction::XtoY;
      } else {
        pair.x = effect;
        pair.y = cause;
        pair.truth = Direction::YtoX;
      }
      pair.validate();
      report.pairs.push_back(std::move(pair));
    } catch (const std::exception& e) {
      report.diagnostics.push_back(id + ": skipped: " + e.what());
    }
  }
  return report;
}

LoadReport load_tuebingen(const std::filesystem::path& dir) { return load_pair_directory(dir, "CEP"); }

LoadReport load_simulated(const std::filesystem::path& dir, const std::string& tag) {
  if (tag.rfind("SIM", 0) != 0) throw std::invalid_argument("load_simulated: unexpected tag '" + tag + "'");
  return load_pair_directory(dir, tag);
}

namespace {

int pair_number(const std::string& id, std::size_t fallback) {
  int n = 0;
  if (id.rfind("pair", 0) == 0 && parse_number(std::string_view(id).substr(4), n) && n > 0) return n;
  return static_cast<int>(fallback);
}

}  // namespace

void write_pairs(const std::filesystem::path& dir, const std::vector<CauseEffectPair>& pairs) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  std::ofstream meta(dir / "pairmeta.txt");
  if (!meta) throw std::runtime_error("cannot write " + (dir / "pairmeta.txt").string());
  char buf[128];
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& pair = pairs[k];
    pair.validate();
    const int number = pair_number(pair.id, k + 1);
    const auto path = dir / (pair_name(number) + ".txt");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (Index t = 0; t < pair.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", pair.x(t), pair.y(t));
      out << buf;
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
    const bool forward = pair.truth == Direction::XtoY;
    std::snprintf(buf, sizeof buf, "%04d %d %d %d %d %.17g\n", number, forward ? 1 : 2, forward ? 1 : 2,
                  forward ? 2 : 1, forward ? 2 : 1, pair.weight);
    meta << buf;
  }
  if (!meta) throw std::runtime_error("write failed for pairmeta.txt");
}

}  // namespace crbm
