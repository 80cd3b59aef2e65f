#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "monodiss/attractor.hpp"
#include "monodiss/elliptic.hpp"
#include "monodiss/error.hpp"
#include "monodiss/rng.hpp"

using namespace monodiss;
using std::numbers::pi;

namespace {

EvolutionConfig chafee(double lambda, int N = 32, double dt = 1e-3) {
  EvolutionConfig c;
  c.grid = make_grid(1, 1.0, N, 1);
  c.a = Eigen::MatrixXd::Identity(1, 1);
  c.f = lambda == 0.0 ? builtin("zero", {{"k", 1}}) : builtin("cubic_scalar", {{"lambda", lambda}});
  c.g = SpectralField(c.grid);
  c.dt = dt;
  return c;
}

std::vector<SpectralField> ensemble(const Grid& g, int count, std::uint64_t seed, std::vector<double> scales) {
  std::vector<SpectralField> out;
  for (int i = 0; i < count; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    SpectralField u(g);
    for (std::size_t m = 0; m < g.modes(); ++m) u.at(0, m) = rng.normal() / std::pow(m + 1.0, 2);
    out.push_back((scales[i % scales.size()] / l2_norm(u)) * u);
  }
  return out;
}

std::vector<double> geometric(double hi, double lo, int n) {
  std::vector<double> e;
  for (int i = 0; i < n; ++i) e.push_back(hi * std::pow(lo / hi, i / (n - 1.0)));
  return e;
}

}  // namespace

TEST(BoxCounting, SinglePointHasDimensionZero) {
  std::vector<std::vector<double>> pts(300, {0.3, -0.2});
  const BoxCount b = box_counting_dimension(pts, geometric(1e-1, 1e-4, 6));
  EXPECT_NEAR(b.dimension, 0.0, 1e-12);
}

TEST(BoxCounting, SegmentAndCircleAreOneDimensional) {
  SplitMix64 rng(3);
  std::vector<std::vector<double>> seg, circ;
  for (int i = 0; i < 20000; ++i) {
    const double t = rng.uniform();
    seg.push_back({t, 0.5 * t});
    circ.push_back({std::cos(2 * pi * t), std::sin(2 * pi * t)});
  }
  const auto eps = geometric(1e-1, 2e-3, 6);
  EXPECT_NEAR(box_counting_dimension(seg, eps).dimension, 1.0, 0.1);
  EXPECT_NEAR(box_counting_dimension(circ, eps).dimension, 1.0, 0.1);
}

TEST(BoxCounting, FilledSquareIsTwoDimensional) {
  SplitMix64 rng(5);
  std::vector<std::vector<double>> sq;
  for (int i = 0; i < 100000; ++i) sq.push_back({rng.uniform(), rng.uniform()});
  const BoxCount b = box_counting_dimension(sq, geometric(2e-1, 1e-2, 5));
  EXPECT_NEAR(b.dimension, 2.0, 0.15);
  EXPECT_GT(b.r_squared, 0.99);
}

TEST(BoxCounting, SaturatedScalesAreDropped) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({i / 50.0});
  const BoxCount b = box_counting_dimension(pts, {0.5, 0.25, 1e-6});
  EXPECT_TRUE(b.truncated);
  EXPECT_EQ(b.eps.size(), 2u);
}

TEST(BoxCounting, CloudNeedsEnoughSnapshots) {
  AttractorCloud c;
  c.snapshots.assign(10, SpectralField(make_grid(1, 1.0, 4, 1)));
  EXPECT_THROW(box_counting_dimension(c, {0.1, 0.01}), Refusal);
}

TEST(AttractionRate, HeatDecaysAtFirstEigenvalue) {
  const EvolutionConfig c = chafee(0.0);
  AttractorCloud cloud;
  cloud.snapshots = {SpectralField(c.grid)};
  const auto probes = ensemble(c.grid, 4, 11, {1.0, 3.0});
  const AttractionRate r = attraction_rate(c, cloud, probes, {.T = 3.0, .samples = 60});
  EXPECT_GT(r.alpha, 0.95 * pi * pi);
  EXPECT_LT(r.alpha, 1.05 * pi * pi);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    EXPECT_LE(r.distances[i], r.Q * std::exp(-r.alpha * r.times[i]) * (1 + 1e-12));
  }
}

TEST(Attractor, SubcriticalChafeeInfanteCollapsesToZero) {
  const EvolutionConfig c = chafee(5.0);
  const auto init = ensemble(c.grid, 8, 21, {0.5, 2.0, 8.0});
  const AttractorCloud cloud =
      sample_cloud(c, init, {.burn_in = 3.0, .snapshots_per_trajectory = 25, .spacing = 0.1});
  ASSERT_EQ(cloud.snapshots.size(), 200u);
  for (const auto& s : cloud.snapshots) EXPECT_LT(l2_norm(s), 1e-4);
  const BoxCount b = box_counting_dimension(cloud, geometric(1e-1, 1e-4, 7));
  EXPECT_LT(b.dimension, 0.2);

  const auto probes = ensemble(c.grid, 4, 22, {1.0});
  const AttractionRate r = attraction_rate(c, cloud, probes, {.T = 3.0, .samples = 60});
  EXPECT_NEAR(r.alpha, pi * pi - 5.0, 0.1 * (pi * pi - 5.0));
  EXPECT_GE(r.fitted_points, 3);
}

TEST(Attractor, SupercriticalCentroidsAreSteadyStates) {
  const EvolutionConfig c = chafee(15.0);
  std::vector<SpectralField> init = ensemble(c.grid, 8, 31, {1.0, 4.0});
  for (auto& u : init) u.at(0, 0) = std::abs(u.at(0, 0)) + 0.1;
  for (std::size_t i = 0; i < init.size(); i += 2) init[i] *= -1.0;
  const AttractorCloud cloud =
      sample_cloud(c, init, {.burn_in = 4.0, .snapshots_per_trajectory = 5, .spacing = 0.1});
  const auto centers = cluster_centroids(cloud.snapshots, 2);
  ASSERT_EQ(centers.size(), 2u);
  EllipticProblem steady{c.a, c.f, 0.0, SpectralField(c.grid), 1.0};
  for (const auto& v : centers) {
    EXPECT_GT(l2_norm(v), 0.1);
    EXPECT_LT(l2_norm(elliptic_residual(steady, v)), 1e-3);
  }
  EXPECT_LT(l2_norm(centers[0] + centers[1]), 1e-6);
}

TEST(Attractor, CloudIsIndependentOfWorkerCount) {
  const EvolutionConfig c = chafee(15.0);
  const auto init = ensemble(c.grid, 4, 41, {1.0, 3.0});
  const auto a = sample_cloud(c, init, {.burn_in = 0.5, .snapshots_per_trajectory = 3, .workers = 1});
  const auto b = sample_cloud(c, init, {.burn_in = 0.5, .snapshots_per_trajectory = 3, .workers = 3});
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) EXPECT_EQ(a.snapshots[i], b.snapshots[i]);
  EXPECT_EQ(cloud_json(a).dump(), cloud_json(b).dump());
}

TEST(Absorbing, EnsembleEntersFittedBall) {
  const EvolutionConfig c = chafee(1.0);
  const auto init = ensemble(c.grid, 9, 51, {1.0, 4.0, 16.0});
  const AbsorbingReport r = absorbing_radius(c, init, {.T = 4.0, .samples = 40});
  EXPECT_GT(r.R_l2, 0.0);
  ASSERT_EQ(r.entry_l2.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_LE(r.entry_l2[i], 4.0);
    EXPECT_FALSE(r.re_exit[i]);
  }
}

TEST(Absorbing, RefusesNarrowEnsembleAndUnreachedBall) {
  const EvolutionConfig c = chafee(1.0);
  EXPECT_THROW(absorbing_radius(c, ensemble(c.grid, 4, 61, {1.0, 1.5})), Refusal);
  const auto init = ensemble(c.grid, 3, 62, {1.0, 4.0, 16.0});
  EXPECT_THROW(absorbing_radius(c, init, {.T = 0.5, .samples = 5, .radius_l2 = 1e-12, .radius_h1 = 1e-12}),
               Refusal);
}
