#ifndef CRBM_COMMON_HPP_
#define CRBM_COMMON_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace crbm {

using Eigen::Index;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-major list of two-dimensional points, one observation per row.
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

/// Single deterministic stream type used everywhere sampling happens.
using Rng = std::mt19937_64;

/// Builds an independent stream from a base seed and up to two task keys
/// (e.g. pair index and round index).
inline Rng make_rng(std::uint64_t base, std::uint64_t key_a = 0,
                    std::uint64_t key_b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(base),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(key_a),
                    static_cast<std::uint32_t>(key_a >> 32),
                    static_cast<std::uint32_t>(key_b),
                    static_cast<std::uint32_t>(key_b >> 32)};
  return Rng(seq);
}

/// Visible coordinate: X is the first column of a pair, Y the second.
enum class Axis : int { X = 0, Y = 1 };

inline Axis other(Axis a) { return a == Axis::X ? Axis::Y : Axis::X; }

enum class Direction { XtoY, YtoX, Undecided };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::XtoY:
      return "XtoY";
    case Direction::YtoX:
      return "YtoX";
    case Direction::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

Direction direction_from_string(std::string_view s);

/// Negative score favours X -> Y, positive favours Y -> X, exact zero abstains.
inline Direction direction_from_score(double score) {
  if (score < 0) return Direction::XtoY;
  if (score > 0) return Direction::YtoX;
  return Direction::Undecided;
}

inline Direction flip(Direction d) {
  switch (d) {
    case Direction::XtoY:
      return Direction::YtoX;
    case Direction::YtoX:
      return Direction::XtoY;
    case Direction::Undecided:
      return Direction::Undecided;
  }
  return Direction::Undecided;
}

}  // namespace crbm

#endif  // CRBM_COMMON_HPP_
