#ifndef CRBM_IGCI_HPP_
#define CRBM_IGCI_HPP_

#include <string>

#include "crbm/common.hpp"

namespace crbm {

/// Result of an IGCI estimator; score = c_xy - c_yx, negative means X -> Y.
struct IgciScore {
  double c_xy = 0;
  double c_yx = 0;
  double score = 0;
  Direction direction = Direction::Undecided;
  /// Non-empty when the estimator had to abstain (e.g. too few usable segments).
  std::string diagnostic;
};

/// Affine map of a series onto [0, 1]. Throws on a constant series.
Eigen::VectorXd rescale_unit(const Eigen::VectorXd& s);

/// Slope-based IGCI with uniform reference measure.
IgciScore igci_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// m-spacing (Vasicek) differential entropy of a sample with m = round(sqrt(T)).
/// Zero spacings are skipped and the average taken over the rest.
double spacing_entropy(const Eigen::VectorXd& s);

/// Entropy-based IGCI with uniform reference measure.
IgciScore igci_entropy(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace crbm

#endif  // CRBM_IGCI_HPP_
