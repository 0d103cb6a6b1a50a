#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "crbm/criterion.hpp"
#include "crbm/trainer.hpp"
#include "support.hpp"

namespace crbm {
namespace {

using testing::normal;
using testing::random_params;
using testing::uniform;
using testing::uniform_grid_params;

double brute_d(const Params& p, int j, const Interval<double>& range) {
  const Index m = p.hidden();
  std::vector<double> c;
  for (std::uint32_t code = 0; code < (1u << m); ++code) {
    double u = p.vis_bias(j);
    for (Index i = 0; i < m; ++i)
      if ((code >> i) & 1u) u += p.weights(i, j);
    c.push_back(u);
  }
  std::sort(c.begin(), c.end());
  const double delta = range.width() / static_cast<double>(c.size());
  double d = 0;
  for (std::size_t t = 1; t < c.size(); ++t) d += (c[t] - c[t - 1] - delta) * (c[t] - c[t - 1] - delta);
  return d;
}

TEST(Gamma, SwapNegatesExactly) {
  Rng rng = make_rng(1);
  for (int draw = 0; draw < 100; ++draw) {
    const Params p = random_params(rng, 1 + draw % 5);
    const Ranges r{{uniform(rng, -2, -1), uniform(rng, 1, 2)}, {uniform(rng, -2, -1), uniform(rng, 1, 2)}};
    const Decision<double> a = gamma(p, r);
    const Decision<double> b = gamma(p.swapped(), r.swapped());
    EXPECT_EQ(b.gamma, -a.gamma);
    EXPECT_EQ(b.direction, flip(a.direction));
  }
}

TEST(Gamma, UniformXClusteredYMeansXtoY) {
  const Ranges r{{-1.0, 1.0}, {-1.0, 1.0}};
  Params p = uniform_grid_params(4, 0.5, r.x, Axis::X);
  p.weights.col(1).setConstant(0.01);
  const Decision<double> d = gamma(p, r);
  EXPECT_NEAR(d.d_x, 0.0, 1e-24);
  EXPECT_GT(d.d_y, 0.0);
  EXPECT_LT(d.gamma, 0.0);
  EXPECT_EQ(d.direction, Direction::XtoY);
}

TEST(Gamma, ZeroIsUndecided) {
  const Ranges r{{-1.0, 1.0}, {-1.0, 1.0}};
  Params p = Params::zeros(3, 1.0);
  p.weights.col(0) << 0.1, 0.2, 0.3;
  p.weights.col(1) << 0.1, 0.2, 0.3;
  const Decision<double> d = gamma(p, r);
  EXPECT_EQ(d.gamma, 0.0);
  EXPECT_EQ(d.direction, Direction::Undecided);
}

TEST(Gamma, MatchesEnumerationOracle) {
  Rng rng = make_rng(2);
  for (int draw = 0; draw < 100; ++draw) {
    const Params p = random_params(rng, 1 + draw % 5);
    const Ranges r{{-1.5, 1.0}, {-0.7, 2.2}};
    const double oracle = brute_d(p, 0, r.x) - brute_d(p, 1, r.y);
    EXPECT_NEAR(gamma(p, r).gamma, oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(Gamma, IgnoresBoundaryHingesAndBiasShifts) {
  Rng rng = make_rng(3);
  const Ranges r{{-1.0, 1.0}, {-1.0, 1.0}};
  for (int draw = 0; draw < 20; ++draw) {
    Params p = random_params(rng, 3, 0.1);
    p.vis_bias.setZero();
    const double g = gamma(p, r).gamma;
    p.vis_bias << 0.05, -0.05;
    EXPECT_NEAR(gamma(p, r).gamma, g, 1e-12);
    p.vis_bias << 40.0, -40.0;
    EXPECT_NEAR(gamma(p, r).gamma, g, 1e-10);
  }
}

TEST(Capacity, SingleGaussianHasUnitArea) {
  const Params p = Params::zeros(3, 0.5);
  const Interval<double> range{-1.0, 1.0};
  EXPECT_NEAR(estimation_capacity(p, Axis::X, capacity_grid(p, range)), 1.0, 1e-3);
}

TEST(Capacity, TwoSeparatedCentersHaveArea2) {
  Params p = Params::zeros(1, 0.1);
  p.weights << 3.0, 0.0;
  const Interval<double> range{0.0, 3.0};
  EXPECT_NEAR(estimation_capacity(p, Axis::X, capacity_grid(p, range)), 2.0, 1e-2);
}

TEST(Capacity, CoincidentCentersHaveUnitArea) {
  Params p = Params::zeros(2, 0.3);
  p.weights.col(1) << 0.0, 0.0;
  const Interval<double> range{-1.0, 1.0};
  EXPECT_NEAR(estimation_capacity(p, Axis::Y, capacity_grid(p, range)), 1.0, 1e-3);
}

TEST(Capacity, MatchesBruteForceRidgeline) {
  Rng rng = make_rng(4);
  for (int draw = 0; draw < 10; ++draw) {
    const Params p = random_params(rng, 3);
    const Interval<double> range{-2.0, 2.0};
    const GridSpec<double> grid = capacity_grid(p, range, 1001);
    const CenterSet<double> cs = center_set(p, Axis::X);
    const double step = (grid.upper - grid.lower) / (grid.nodes - 1);
    double area = 0;
    for (Index k = 0; k < grid.nodes; ++k) {
      const double u = grid.lower + step * k;
      double best = 0;
      for (Index c = 0; c < cs.size(); ++c) {
        const double z = (u - cs.centers(c)) / p.sigma;
        best = std::max(best, std::exp(-z * z / 2) / (p.sigma * std::sqrt(2 * M_PI)));
      }
      area += (k == 0 || k + 1 == grid.nodes) ? best / 2 : best;
    }
    EXPECT_NEAR(estimation_capacity(p, Axis::X, grid), area * step, 1e-12);
  }
}

TEST(Capacity, MonotonicityExamples) {
  const Interval<double> range{-1.0, 1.0};
  const Params uniform_p = uniform_grid_params(3, 0.15, range, Axis::X);
  const GridSpec<double> grid = capacity_grid(uniform_p, range);

  Params coincident = uniform_p;
  coincident.weights.col(0).setZero();
  EXPECT_TRUE(capacity_monotonicity_check(uniform_p, coincident, Axis::X, grid));

  Params perturbed = uniform_p;
  perturbed.weights(0, 0) *= 1.2;
  perturbed.weights(1, 0) *= 0.95;
  EXPECT_TRUE(capacity_monotonicity_check(uniform_p, perturbed, Axis::X, grid));

  EXPECT_TRUE(capacity_monotonicity_check(uniform_p, uniform_p, Axis::X, grid));

  Params other_sigma = uniform_p;
  other_sigma.sigma = 0.2;
  EXPECT_THROW(capacity_monotonicity_check(uniform_p, other_sigma, Axis::X, grid), std::invalid_argument);
}

// Clustered center sets sharing the uniform grid's extremes never beat it.
TEST(Capacity, UniformGridDominatesClusteredConfigurations) {
  Rng rng = make_rng(5);
  for (Index m : {2, 3, 4}) {
    const Interval<double> range{0.0, 1.0};
    const double sigma = 0.5 / static_cast<double>(Index{1} << m);
    const Params uniform_p = uniform_grid_params(m, sigma, range, Axis::X);
    const CenterSet<double> ucs = center_set(uniform_p, Axis::X);
    const GridSpec<double> grid = capacity_grid(uniform_p, range, 4001);
    const double reference = estimation_capacity(uniform_p, Axis::X, grid);
    for (int draw = 0; draw < 50; ++draw) {
      // Random positive weights rescaled to the same total span.
      Params q = uniform_p;
      for (Index i = 0; i < m; ++i) q.weights(i, 0) = uniform(rng, 0.01, 1.0);
      q.weights.col(0) *= (ucs.back() - ucs.front()) / q.weights.col(0).sum();
      const CenterSet<double> qcs = center_set(q, Axis::X);
      ASSERT_NEAR(qcs.front(), ucs.front(), 1e-12);
      ASSERT_NEAR(qcs.back(), ucs.back(), 1e-12);
      EXPECT_LE(estimation_capacity(q, Axis::X, grid), reference + 1e-9) << "m=" << m << " draw " << draw;
    }
  }
}

TrainConfig manifold_config(std::uint64_t seed) {
  TrainConfig c;
  c.seed = seed;
  return c;
}

TEST(DegenerateManifold, DiagonalManifoldGivesNoSystematicDirection) {
  std::vector<double> gammas;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng data_rng = make_rng(1000, seed);
    const Points<double> v = testing::diagonal_manifold_sample(data_rng, 500);
    const TrainResult r = train(v, manifold_config(seed));
    gammas.push_back(gamma(r.params, r.ranges).gamma);
  }
  const double mean = testing::mean(gammas);
  const double half = testing::ci95_half_width_20(gammas);
  EXPECT_LE(std::abs(mean), half) << "mean " << mean << " half-width " << half;
}

TEST(DegenerateManifold, CurvedMechanismHasStableSign) {
  std::vector<double> gammas;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng data_rng = make_rng(2000, seed);
    const Points<double> v = testing::curved_mechanism_sample(data_rng, 500);
    const TrainResult r = train(v, manifold_config(seed));
    gammas.push_back(gamma(r.params, r.ranges).gamma);
  }
  const double mean = testing::mean(gammas);
  EXPECT_GT(std::abs(mean), testing::ci95_half_width_20(gammas));
}

}  // namespace
}  // namespace crbm
