#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ergolab/ergodic_stats.hpp"

using namespace ergolab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double golden() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double cos_bump(const Point& p) { return 0.5 * (1.0 + std::cos(kTwoPi * p[0])); }

}  // namespace

TEST(Checkpoints, GeometricScheduleEndsAtN) {
  EXPECT_EQ(geometric_checkpoints(1024), (std::vector<std::size_t>{8, 16, 32, 64, 128, 256, 512, 1024}));
  EXPECT_EQ(geometric_checkpoints(3), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(geometric_checkpoints(1000).back(), 1000u);
}

TEST(Birkhoff, FixedPointGivesConstantSeries) {
  const System ns = make_system("north_south");
  const auto s = birkhoff_average(ns, make_point({0.5}), cos_bump, 500);
  for (double v : s.values) EXPECT_DOUBLE_EQ(v, 0.0);
  EXPECT_FALSE(s.escaped_at.has_value());
}

// |sum_{j<n} cos(2 pi (x + j alpha))| <= 1 / |sin(pi alpha)|.
TEST(Birkhoff, RotationObeysGeometricSumBound) {
  const double alpha = golden();
  const System rot = make_system("rotation", {{"alpha", alpha}});
  const auto s = birkhoff_average(rot, make_point({0.3}), cos_bump, 100000);
  for (std::size_t k = 0; k < s.checkpoints.size(); ++k) {
    const double n = static_cast<double>(s.checkpoints[k]);
    const double bound = 1.0 / (2.0 * n * std::fabs(std::sin(std::numbers::pi * alpha)));
    EXPECT_LE(std::fabs(s.values[k] - 0.5), bound + 1e-12) << s.checkpoints[k];
  }
}

TEST(Birkhoff, NorthSouthAveragesOfDistanceToSouthVanish) {
  const System ns = make_system("north_south");
  auto dist_s = [](const Point& p) { return std::fabs(p[0] - 0.5); };
  for (double x : {0.01, 0.2, 0.77, 0.999}) {
    const auto s = birkhoff_average(ns, make_point({x}), dist_s, 100000);
    EXPECT_LT(s.values.back(), 1e-3) << x;
  }
}

TEST(Birkhoff, AveragesStayWithinOrbitRange) {
  const System cat = make_system("cat_map");
  auto psi = [](const Point& p) { return std::sin(kTwoPi * p[0]) * p[1]; };
  const auto s = birkhoff_average(cat, make_point({0.1234, 0.5678}), psi, 5000, {1, 2, 7, 100, 4999, 6000});
  EXPECT_EQ(s.checkpoints.back(), 5000u);
  for (double v : s.values) {
    EXPECT_GE(v, s.orbit_min);
    EXPECT_LE(v, s.orbit_max);
  }
}

TEST(Birkhoff, ShiftConsistency) {
  const System tent = make_system("tent", {{"exact", 1}});
  const Point x = tent.space().exact_point({987654321});
  const Point fx = *tent.forward(x);
  const auto a = birkhoff_average(tent, x, cos_bump, 20000);
  const auto b = birkhoff_average(tent, fx, cos_bump, 20000);
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    EXPECT_LE(std::fabs(a.values[k] - b.values[k]), 2.0 / static_cast<double>(a.checkpoints[k]));
  }
}

TEST(Birkhoff, EscapeTruncatesWithFlag) {
  const System h = make_system("horseshoe");
  const auto s = birkhoff_average(h, horseshoe_cylinder_point("0110"), [](const Point&) { return 1.0; }, 100);
  ASSERT_TRUE(s.escaped_at.has_value());
  EXPECT_GE(*s.escaped_at, 4u);
  EXPECT_LT(*s.escaped_at, 100u);
  EXPECT_THROW(birkhoff_average(h, make_point({0.5, 0.5}), cos_bump, 0), std::invalid_argument);
}

TEST(Sojourn, WholeSpaceAndComplement) {
  const System cat = make_system("cat_map", {{"exact", 1}});
  const Partition part(cat.space(), 8);
  GridSet a(part);
  for (std::size_t i = 0; i < 64; i += 3) a.insert(i);
  GridSet b(part);
  for (std::size_t i = 0; i < 64; ++i) {
    if (!a.contains_cell(i)) b.insert(i);
  }
  const Point x = cat.space().exact_point({11, 2024});
  EXPECT_EQ(sojourn_frequency(cat, x, GridSet::all(part), 1000), 1.0);
  EXPECT_EQ(sojourn_frequency(cat, x, a, 1000) + sojourn_frequency(cat, x, b, 1000), 1.0);
}

// For Fibonacci n the points j * golden (j < n) put one point in each interval
// [i/n, (i+1)/n) up to boundary effects, so [0, 1/2) gets n/2 within 2.
TEST(Sojourn, RotationHalfIntervalAtFibonacciTimes) {
  const System rot = make_system("rotation", {{"alpha", golden()}});
  GridSet half(Partition(rot.space(), 2));
  half.insert(0);
  for (std::size_t n : {89u, 987u, 10946u, 121393u}) {
    EXPECT_LE(std::fabs(sojourn_frequency(rot, make_point({0.0}), half, n) - 0.5), 2.0 / static_cast<double>(n)) << n;
  }
}

TEST(Sojourn, NorthSouthConcentratesAtSouth) {
  const System ns = make_system("north_south");
  const Partition part(ns.space(), 64);
  GridSet s(part);
  s.insert(part.cell_index(make_point({0.5})));
  EXPECT_GT(sojourn_frequency(ns, make_point({0.9}), s, 100000), 0.999);
}

TEST(Recurrence, CatMapCellsRecur) {
  const System cat = make_system("cat_map", {{"exact", 1}});
  const Partition part(cat.space(), 16);
  for (std::size_t cell : {0u, 37u, 255u}) {
    GridSet a(part);
    a.insert(cell);
    const auto samples = grid_samples_in_box(cat.space(), part.cell_box(cell), 8, true);
    EXPECT_GE(recurrence_fraction(cat, a, samples, 100000, 3), 0.999) << cell;
  }
}

TEST(Recurrence, RotationAlwaysReturns) {
  const System rot = make_system("rotation");
  const Partition part(rot.space(), 10);
  GridSet a(part);
  a.insert(0);
  const auto samples = grid_samples_in_box(rot.space(), part.cell_box(0), 50, false);
  EXPECT_EQ(recurrence_fraction(rot, a, samples, 10000, 10), 1.0);
}

TEST(Recurrence, NorthSouthWanderingCellNeverReturns) {
  const System ns = make_system("north_south");
  const Partition part(ns.space(), 100);
  const std::size_t cell = part.cell_index(make_point({0.3}));
  GridSet a(part);
  a.insert(cell);
  const auto samples = grid_samples_in_box(ns.space(), part.cell_box(cell), 50, false);
  EXPECT_EQ(recurrence_fraction(ns, a, samples, 10000, 1), 0.0);
  EXPECT_THROW(recurrence_fraction(ns, a, {make_point({0.9})}, 10, 1), std::invalid_argument);
}

TEST(POmega, FixedPointHasOneDiracCluster) {
  const System ns = make_system("north_south");
  const auto fam = default_family(ns.space());
  const auto est = p_omega_estimate(ns, make_point({0.5}), {10, 100, 1000}, fam);
  ASSERT_EQ(est.cluster_measures.size(), 1u);
  EXPECT_LT(weak_star_distance(est.cluster_measures[0], DiracMeasure{make_point({0.5})}, fam), 1e-15);
}

TEST(POmega, RotationAndCatConvergeToLebesgue) {
  const System rot = make_system("rotation");
  const System cat = make_system("cat_map", {{"exact", 1}});
  const std::vector<std::size_t> cps{1000, 5000, 20000, 100000};
  for (const auto& [sys, x] : {std::pair{rot, make_point({0.123})}, std::pair{cat, cat.space().exact_point({123456789, 987654})}}) {
    const auto fam = default_family(sys.space());
    const auto est = p_omega_estimate(sys, x, cps, fam);
    ASSERT_EQ(est.cluster_measures.size(), 1u) << sys.name();
    std::vector<double> lebesgue(64);
    for (std::size_t i = 1; i <= 64; ++i) lebesgue[i - 1] = fam.box_mean(i);
    EXPECT_LT(weak_star_distance(integrate_family(est.cluster_measures[0], fam), lebesgue), 0.02) << sys.name();
    // The representative is the longest prefix of the same orbit.
    const auto seg = orbit(sys, x, cps.back());
    const auto& rep = est.cluster_measures[0].samples;
    ASSERT_EQ(rep.size(), cps.back());
    for (std::size_t j = 0; j < rep.size(); j += 997) EXPECT_EQ(rep[j], seg.points[j]);
  }
}

TEST(POmega, PairwiseDistancesMatchMetric) {
  const System tent = make_system("tent", {{"exact", 1}});
  const auto fam = default_family(tent.space());
  const Point x = tent.space().exact_point({31415926});
  const std::vector<std::size_t> cps{100, 1000, 10000};
  const auto est = p_omega_estimate(tent, x, cps, fam);
  const auto seg = orbit(tent, x, cps.back());
  for (std::size_t a = 0; a < cps.size(); ++a) {
    for (std::size_t b = 0; b < cps.size(); ++b) {
      const EmpiricalMeasure ma{std::vector<Point>(seg.points.begin(), seg.points.begin() + static_cast<long>(cps[a]))};
      const EmpiricalMeasure mb{std::vector<Point>(seg.points.begin(), seg.points.begin() + static_cast<long>(cps[b]))};
      EXPECT_NEAR(est.pairwise_distances[a][b], weak_star_distance(ma, mb, fam), 1e-12);
    }
  }
  EXPECT_THROW(p_omega_estimate(tent, x, {100}, fam), std::invalid_argument);
}
