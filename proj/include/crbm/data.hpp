#ifndef CRBM_DATA_HPP_
#define CRBM_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crbm/common.hpp"

namespace crbm {

struct CauseEffectPair {
  std::string id;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Direction truth = Direction::XtoY;
  double weight = 1.0;
  std::string source;

  Index size() const { return x.size(); }
  /// Throws if the pair violates its invariants.
  void validate() const;
  /// Both series as a T x 2 point list.
  Points<double> points() const;
  /// Same pair with the two variables exchanged (truth flipped).
  CauseEffectPair swapped() const;
};

/// Population z-score (divisor T). Throws on zero variance.
Eigen::VectorXd zscore(const Eigen::VectorXd& s);

/// Projection of the centered columns onto the leading principal axis, sign
/// fixed so the largest-magnitude loading is positive. D = 1 returns the
/// centered column.
Eigen::VectorXd first_pc(const Eigen::MatrixXd& data);

struct MixtureComponent {
  double weight = 1;
  double mean = 0;
  double stddev = 1;
};

/// K ~ U{1..5}, means ~ U[-2, 2], standard deviations ~ U[0.2, 1],
/// weights ~ flat Dirichlet.
std::vector<MixtureComponent> random_mixture(Rng& rng);

/// Draws n points from the mixture and standardizes them (mean 0, variance 1).
Eigen::VectorXd sample_mixture(const std::vector<MixtureComponent>& mixture, Rng& rng, Index n);

/// sample_mixture(random_mixture(rng), rng, n).
Eigen::VectorXd sample_random_distribution(Rng& rng, Index n);

struct SimLinSpec {
  int n_pairs = 100;
  Index n_obs = 1000;
  std::uint64_t seed = 0;
};

/// X := N1, Y := slope X + noise_scale N2, slope ~ U[-1, 1], noise_scale chosen
/// so that var(Y) = var(X). A fixed slope can be forced for testing.
CauseEffectPair make_simlin_pair(const std::string& id, Index n_obs, Rng& rng,
                                 std::optional<double> forced_slope = std::nullopt);

std::vector<CauseEffectPair> gen_simlin(const SimLinSpec& spec);

struct LoadReport {
  std::vector<CauseEffectPair> pairs;
  /// One line per skipped or suspicious pair, prefixed with its id.
  std::vector<std::string> diagnostics;
};

/// Reads pairXXXX.txt files described by pairmeta.txt rows
/// `<id> <cause_first> <cause_last> <effect_first> <effect_last> <weight>`
/// (1-based columns). The variable whose columns come first in the file
/// becomes x; multi-column variables are reduced with first_pc.
LoadReport load_pair_directory(const std::filesystem::path& dir, const std::string& source);

LoadReport load_tuebingen(const std::filesystem::path& dir);

/// Simulated benchmark sets; tag is "SIM" or "SIM-C" (or another SIM-* tag).
LoadReport load_simulated(const std::filesystem::path& dir, const std::string& tag);

/// Writes pair files and pairmeta.txt in the format read by load_pair_directory.
void write_pairs(const std::filesystem::path& dir, const std::vector<CauseEffectPair>& pairs);

/// File stem for a numeric pair id: 7 -> "pair0007".
std::string pair_name(int number);

}  // namespace crbm

#endif  // CRBM_DATA_HPP_
