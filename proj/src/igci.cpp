#include "crbm/igci.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace crbm {

Eigen::VectorXd rescale_unit(const Eigen::VectorXd& s) {
  if (s.size() == 0) throw std::invalid_argument("rescale_unit: empty series");
  const double lo = s.minCoeff();
  const double hi = s.maxCoeff();
  if (!(hi > lo)) throw std::invalid_argument("rescale_unit: constant series");
  return (s.array() - lo) / (hi - lo);
}

namespace {

std::vector<Index> argsort(const Eigen::VectorXd& s) {
  std::vector<Index> idx(static_cast<std::size_t>(s.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&s](Index a, Index b) { return s(a) < s(b); });
  return idx;
}

struct SlopeSum {
  double value = 0;
  Index used = 0;
};

// Mean of log|d(to)/d(from)| along the ordering of `from`.
SlopeSum mean_log_slope(const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
  const std::vector<Index> order = argsort(from);
  SlopeSum out;
  double sum = 0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double dfrom = std::abs(from(order[k]) - from(order[k - 1]));
    const double dto = std::abs(to(order[k]) - to(order[k - 1]));
    if (dfrom == 0 || dto == 0) continue;
    sum += std::log(dto) - std::log(dfrom);
    ++out.used;
  }
  if (out.used > 0) out.value = sum / static_cast<double>(out.used);
  return out;
}

void check_lengths(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Index min_len, const char* who) {
  if (x.size() != y.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
  if (x.size() < min_len)
    throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(min_len) +
                                " observations");
}

}  // namespace

IgciScore igci_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_lengths(x, y, 3, "igci_slope");
  const Eigen::VectorXd xs = rescale_unit(x);
  const Eigen::VectorXd ys = rescale_unit(y);
  const SlopeSum fwd = mean_log_slope(xs, ys);
  const SlopeSum bwd = mean_log_slope(ys, xs);

  IgciScore out;
  if (fwd.used < 2 || bwd.used < 2) {
    out.diagnostic = "fewer than 2 usable segments";
    return out;
  }
  out.c_xy = fwd.value;
  out.c_yx = bwd.value;
  out.score = out.c_xy - out.c_yx;
  out.direction = direction_from_score(out.score);
  return out;
}

double spacing_entropy(const Eigen::VectorXd& s) {
  const Index n = s.size();
  if (n < 2) throw std::invalid_argument("spacing_entropy: need at least two observations");
  std::vector<double> sorted(s.data(), s.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const auto m = std::max<Index>(1, static_cast<Index>(std::lround(std::sqrt(static_cast<double>(n)))));
  const double scale = static_cast<double>(n) / (2.0 * static_cast<double>(m));

  double sum = 0;
  Index used = 0;
  for (Index i = 0; i < n; ++i) {
    const double hi = sorted[static_cast<std::size_t>(std::min(n - 1, i + m))];
    const double lo = sorted[static_cast<std::size_t>(std::max<Index>(0, i - m))];
    const double spacing = hi - lo;
    if (spacing <= 0) continue;
    sum += std::log(scale * spacing);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("spacing_entropy: all spacings are zero");
  return sum / static_cast<double>(used);
}

IgciScore igci_entropy(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_lengths(x, y, 8, "igci_entropy");
  const double hx = spacing_entropy(rescale_unit(x));
  const double hy = spacing_entropy(rescale_unit(y));
  IgciScore out;
  out.c_xy = hy - hx;
  out.c_yx = hx - hy;
  out.score = out.c_xy - out.c_yx;
  out.direction = direction_from_score(out.score);
  return out;
}

}  // namespace crbm
