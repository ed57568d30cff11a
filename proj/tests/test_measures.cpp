#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ergolab/measures.hpp"

using namespace ergolab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Direct evaluation of the first few circle test functions, written out by hand.
double circle_psi(std::size_t i, double x) {
  if (i == 1) return 0.5;
  const std::size_t m = i - 1;  // psi_{m+1} = phi_m
  const double k = static_cast<double>((m + 1) / 2);
  return m % 2 == 1 ? 0.5 * (1.0 + std::cos(kTwoPi * k * x)) : 0.5 * (1.0 + std::sin(kTwoPi * k * x));
}

EmpiricalMeasure random_empirical(const PhaseSpace& s, std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EmpiricalMeasure m;
  for (std::size_t i = 0; i < count; ++i) m.samples.push_back(s.point({u(rng), u(rng)}));
  return m;
}

}  // namespace

TEST(TestFunctionFamily, CircleOrderingMatchesHandWrittenFormulas) {
  const auto fam = default_family(PhaseSpace::circle());
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.93}) {
    for (std::size_t i = 1; i <= 9; ++i) EXPECT_NEAR(fam(i, make_point({x})), circle_psi(i, x), 1e-15) << i;
  }
}

TEST(TestFunctionFamily, TorusUsesDiagonalTensorOrder) {
  const auto fam = default_family(PhaseSpace::torus2());
  const Point p = make_point({0.2, 0.7});
  // Order 1: (0,1) then (1,0); order 2: (0,2), (1,1), (2,0).
  const double c0 = 0.5 * (1 + std::cos(kTwoPi * 0.2));
  const double c1 = 0.5 * (1 + std::cos(kTwoPi * 0.7));
  const double s1 = 0.5 * (1 + std::sin(kTwoPi * 0.7));
  EXPECT_NEAR(fam(2, p), c1, 1e-15);
  EXPECT_NEAR(fam(3, p), c0, 1e-15);
  EXPECT_NEAR(fam(4, p), s1, 1e-15);
  EXPECT_NEAR(fam(5, p), c0 * c1, 1e-15);
}

TEST(TestFunctionFamily, FastEvaluationAgreesWithDirect) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& space : {PhaseSpace::circle(), PhaseSpace::torus2(), PhaseSpace::disc(), PhaseSpace::solid_torus()}) {
    const auto fam = default_family(space);
    std::vector<double> out(4096);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> c(space.dim());
      for (std::size_t a = 0; a < space.dim(); ++a) {
        c[a] = space.bounds().lower[a] + u(rng) * (space.bounds().upper[a] - space.bounds().lower[a]);
      }
      const Point p = make_point(c);
      fam.evaluate(p, out);
      for (std::size_t i = 1; i <= out.size(); i += 7) {
        EXPECT_NEAR(out[i - 1], fam(i, p), 1e-10);
        EXPECT_GE(out[i - 1], 0.0);
        EXPECT_LE(out[i - 1], 1.0);
      }
    }
  }
}

TEST(TestFunctionFamily, BoxMeanMatchesMidpointQuadrature) {
  const auto fam = default_family(PhaseSpace::torus2());
  const Measure uniform = HistogramMeasure::uniform(Partition(PhaseSpace::torus2(), 256));
  const auto ints = integrate_family(uniform, fam, 64);
  for (std::size_t i = 1; i <= 64; ++i) EXPECT_NEAR(ints[i - 1], fam.box_mean(i), 1e-12) << i;
}

TEST(WeakStar, DiracDistanceAgainstDirectSum) {
  const auto fam = default_family(PhaseSpace::circle());
  const double x = 0.12;
  const double y = 0.61;
  double oracle = 0.0;
  for (std::size_t i = 1; i <= 64; ++i) oracle += std::ldexp(std::fabs(circle_psi(i, x) - circle_psi(i, y)), -static_cast<int>(i));
  EXPECT_NEAR(weak_star_distance(DiracMeasure{make_point({x})}, DiracMeasure{make_point({y})}, fam), oracle, 1e-13);
}

TEST(WeakStar, MetricAxiomsOnRandomTriples) {
  const PhaseSpace s = PhaseSpace::torus2();
  const auto fam = default_family(s);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  for (int t = 0; t < 1000; ++t) {
    const Measure a = random_empirical(s, rng, size(rng));
    const Measure b = random_empirical(s, rng, size(rng));
    const Measure c = random_empirical(s, rng, size(rng));
    const double ab = weak_star_distance(a, b, fam);
    const double ba = weak_star_distance(b, a, fam);
    const double bc = weak_star_distance(b, c, fam);
    const double ac = weak_star_distance(a, c, fam);
    EXPECT_NEAR(weak_star_distance(a, a, fam), 0.0, 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_LE(ac, ab + bc + 1e-12);
    EXPECT_LT(ab, 1.0);
  }
}

TEST(WeakStar, SeparatesDistinctPointsAndIsContinuous) {
  const PhaseSpace s = PhaseSpace::circle();
  const auto fam = default_family(s);
  const Measure x = DiracMeasure{s.point({0.3})};
  EXPECT_GT(weak_star_distance(x, DiracMeasure{s.point({0.3001})}, fam), 0.0);
  EXPECT_LT(weak_star_distance(x, DiracMeasure{s.point({0.3000001})}, fam), 1e-5);
  EXPECT_THROW(weak_star_distance(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(Measures, ValidateRejectsBadInput) {
  EXPECT_THROW(validate(EmpiricalMeasure{}), std::invalid_argument);
  const Partition part(PhaseSpace::circle(), 4);
  EXPECT_THROW(validate(HistogramMeasure{part, {0.5, 0.5}}), std::invalid_argument);
  EXPECT_THROW(validate(HistogramMeasure{part, {0.5, 0.5, 0.5, -0.5}}), std::invalid_argument);
  EXPECT_THROW(validate(HistogramMeasure{part, {0.5, 0.5, 0.5, 0.5}}), std::invalid_argument);
  EXPECT_NO_THROW(validate(HistogramMeasure::uniform(part)));
}

TEST(Measures, UniformHistogramOnDiscDropsOutsideCells) {
  const Partition part(PhaseSpace::disc(1.5), 4);
  const auto h = HistogramMeasure::uniform(part);
  // Corner centres of the 4x4 grid sit at radius 1.125 * sqrt(2) > 1.5.
  std::size_t nonzero = 0;
  for (double w : h.weights) nonzero += w > 0 ? 1 : 0;
  EXPECT_EQ(nonzero, 12u);
  EXPECT_NEAR(total_mass(h), 1.0, 1e-15);
}

TEST(Measures, IntegrateMatchesDefinitions) {
  const PhaseSpace s = PhaseSpace::circle();
  auto sq = [](const Point& p) { return p[0] * p[0]; };
  EXPECT_DOUBLE_EQ(integrate(DiracMeasure{s.point({0.5})}, sq), 0.25);
  EXPECT_DOUBLE_EQ(integrate(EmpiricalMeasure{{s.point({0.0}), s.point({0.5})}}, sq), 0.125);
  // Midpoint rule for x^2 on k cells: 1/3 - 1/(12 k^2).
  EXPECT_NEAR(integrate(HistogramMeasure::uniform(Partition(s, 10)), sq), 1.0 / 3.0 - 1.0 / 1200.0, 1e-15);
}

TEST(Pushforward, DiracAndEmpirical) {
  const System rot = make_system("rotation", {{"alpha", 0.25}});
  const auto d = pushforward(rot, DiracMeasure{make_point({0.5})});
  EXPECT_NEAR(std::get<DiracMeasure>(d.measure).atom[0], 0.75, 1e-15);
  const System h = make_system("horseshoe");
  const EmpiricalMeasure e{{make_point({0.5, 0.3}), make_point({0.5, 0.5}), make_point({0.5, 0.7}), make_point({0.1, 0.9})}};
  const auto r = pushforward(h, e);
  EXPECT_DOUBLE_EQ(r.escaped_mass, 0.5);
  EXPECT_EQ(std::get<EmpiricalMeasure>(r.measure).samples.size(), 2u);
  EXPECT_THROW(pushforward(h, DiracMeasure{make_point({0.5, 0.5})}), std::runtime_error);
}

TEST(Pushforward, HistogramUnderRotationByWholeCells) {
  const System rot = make_system("rotation", {{"alpha", 0.25}});
  const Partition part(PhaseSpace::circle(), 8);
  HistogramMeasure h{part, std::vector<double>(8, 0.0)};
  h.weights[1] = 1.0;
  const auto r = pushforward(rot, h);
  const auto& w = std::get<HistogramMeasure>(r.measure).weights;
  EXPECT_NEAR(w[3], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.escaped_mass, 0.0);
}

TEST(Pushforward, HistogramEscapeForHorseshoe) {
  const System h = make_system("horseshoe");
  const Partition part(PhaseSpace::square(), 10);
  const auto r = pushforward(h, HistogramMeasure::uniform(part));
  // Only the strips 0.2 <= y <= 0.4 and 0.6 <= y <= 0.8 survive: 40% of the mass.
  EXPECT_NEAR(r.escaped_mass, 0.6, 1e-12);
  EXPECT_NEAR(total_mass(r.measure), 0.4, 1e-12);
}

TEST(Pushforward, LebesgueIsInvariantForTent) {
  const System tent = make_system("tent");
  const Partition part(PhaseSpace::circle(), 1024);
  const auto fam = default_family(PhaseSpace::circle());
  EXPECT_LT(invariance_residual(tent, HistogramMeasure::uniform(part), fam), 1e-10);
}

TEST(KrylovBogoliubov, DiracBecomesOrbitAverage) {
  const System rot = make_system("rotation", {{"alpha", 0.25}});
  const Measure m = krylov_bogoliubov(rot, DiracMeasure{make_point({0.1})}, 4);
  const auto& s = std::get<EmpiricalMeasure>(m).samples;
  ASSERT_EQ(s.size(), 4u);
  EXPECT_NEAR(s[3][0], 0.85, 1e-15);
}

TEST(KrylovBogoliubov, HistogramAverageStaysNormalized) {
  const System ns = make_system("north_south");
  const Partition part(PhaseSpace::circle(), 64);
  const Measure m = krylov_bogoliubov(ns, HistogramMeasure::uniform(part), 20);
  EXPECT_NO_THROW(validate(m));
}

// Residual of the Cesaro average of delta_x is at most 1/n; 2/n leaves room.
TEST(KrylovBogoliubov, ResidualBoundOnContinuousSystems) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<std::pair<std::string, Params>> systems = {
      {"rotation", {}},  {"tent", {{"exact", 1}}}, {"expanding_k", {{"eps", 0.3}}}, {"cat_map", {}},
      {"north_south", {}}, {"disc_A", {}},          {"disc_B", {}},                {"disc_rot", {}},
      {"solenoid", {}},  {"identity", {}},         {"linear_torus", {{"a11", 3}, {"a12", 2}, {"a21", 1}, {"a22", 1}}}};
  for (const auto& [name, params] : systems) {
    const System s = make_system(name, params);
    const auto fam = default_family(s.space());
    for (std::size_t n : {10u, 100u, 1000u}) {
      Point x;
      do {
        std::vector<double> c(s.dim());
        for (std::size_t a = 0; a < s.dim(); ++a) {
          c[a] = s.space().bounds().lower[a] + u(rng) * (s.space().bounds().upper[a] - s.space().bounds().lower[a]);
        }
        x = make_point(c);
      } while (!s.space().contains(x));
      if (s.exact_mode()) x = s.space().to_exact(x);
      const Measure kb = krylov_bogoliubov(s, DiracMeasure{x}, n);
      EXPECT_LE(invariance_residual(s, kb, fam), 2.0 / static_cast<double>(n)) << name << " n=" << n;
    }
  }
}

TEST(EmpiricalIntegrals, PrefixProperty) {
  const System cat = make_system("cat_map", {{"exact", 1}});
  const auto fam = default_family(cat.space());
  const Point x = cat.space().exact_point({12345, 67890});
  const std::vector<std::size_t> cps{10, 100, 1000};
  const auto rows = empirical_integrals(cat, x, cps, fam);
  ASSERT_EQ(rows.size(), 3u);
  const auto seg = orbit(cat, x, 1000);
  for (std::size_t k = 0; k < cps.size(); ++k) {
    const EmpiricalMeasure prefix{std::vector<Point>(seg.points.begin(), seg.points.begin() + static_cast<long>(cps[k]))};
    const auto direct = integrate_family(prefix, fam);
    EXPECT_LT(weak_star_distance(rows[k], direct), 1e-13);
  }
  EXPECT_THROW(empirical_integrals(cat, x, std::vector<std::size_t>{5, 3}, fam), std::invalid_argument);
}

TEST(SingleLinkage, ChainsJoinAndLabelsFollowFirstAppearance) {
  const std::vector<std::vector<double>> v = {{0.0}, {1.0}, {0.05}, {0.1}, {1.02}};
  // Distances are |a - b| / 2 for one coordinate.
  const auto labels = single_linkage(v, 0.03);
  EXPECT_EQ(labels, (std::vector<std::size_t>{0, 1, 0, 0, 1}));
  const auto apart = single_linkage(v, 0.005);
  EXPECT_EQ(apart, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}
