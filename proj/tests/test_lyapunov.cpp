#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "ergolab/lyapunov.hpp"

using namespace ergolab;

namespace {

const double kCat = std::log((3.0 + std::sqrt(5.0)) / 2.0);

Jacobian random_orthonormal(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng);
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

}  // namespace

TEST(ScalarExponent, ClosedForms) {
  EXPECT_EQ(scalar_exponent(make_system("rotation"), make_point({0.2}), 1000), 0.0);
  EXPECT_NEAR(scalar_exponent(make_system("tent"), make_point({0.1234}), 1000), std::log(2.0), 1e-12);
  const System tent_exact = make_system("tent", {{"exact", 1}});
  EXPECT_NEAR(scalar_exponent(tent_exact, tent_exact.space().exact_point({12345}), 10000), std::log(2.0), 1e-12);
  EXPECT_THROW(scalar_exponent(make_system("cat_map"), make_point({0.1, 0.2}), 10), std::invalid_argument);
}

TEST(ScalarExponent, NorthSouthAtAttractorMatchesFiniteDifference) {
  const double beta = 0.5;
  const System ns = make_system("north_south", {{"beta", beta}});
  const double h = 1e-6;
  const double fd = (ns.forward(make_point({0.5 + h})).value()[0] - ns.forward(make_point({0.5 - h})).value()[0]) / (2 * h);
  EXPECT_NEAR(scalar_exponent(ns, make_point({0.5}), 100), std::log(std::fabs(fd)), 1e-8);
  EXPECT_NEAR(scalar_exponent(ns, make_point({0.5}), 100), std::log(1.0 - beta), 1e-12);
}

TEST(SpectrumQr, CatMap) {
  const System cat = make_system("cat_map", {{"exact", 1}});
  const auto s = spectrum_qr(cat, cat.space().exact_point({1, 2}), 10000);
  ASSERT_EQ(s.exponents.size(), 2u);
  EXPECT_NEAR(s.exponents[0], kCat, 1e-9);
  EXPECT_NEAR(s.exponents[1], -kCat, 1e-9);
}

TEST(SpectrumQr, HorseshoeDeepCylinder) {
  const System h = make_system("horseshoe");
  const auto s = spectrum_qr(h, horseshoe_cylinder_point("0110100111001011"), 12, {.transient = 0});
  EXPECT_EQ(s.n_used, 12u);
  EXPECT_NEAR(s.exponents[0], std::log(5.0), 1e-12);
  EXPECT_NEAR(s.exponents[1], -std::log(5.0), 1e-12);
}

TEST(SpectrumQr, IdentityIsZero) {
  const auto s = spectrum_qr(make_system("identity", {{"dim", 2}}), make_point({0.3, 0.4}), 100);
  EXPECT_EQ(s.exponents, (std::vector<double>{0.0, 0.0}));
}

TEST(SpectrumQr, SortedAndSized) {
  const auto s = spectrum_qr(make_system("solenoid"), make_point({0.4, 0.3, 0.1}), 2000);
  ASSERT_EQ(s.exponents.size(), 3u);
  EXPECT_GE(s.exponents[0], s.exponents[1]);
  EXPECT_GE(s.exponents[1], s.exponents[2]);
  // Float doubling settles on the fixed circle after ~50 steps; the remaining
  // error is the O(1/n) coboundary term of the Cartesian embedding.
  EXPECT_NEAR(s.exponents[0], std::log(2.0), 1e-3);
  EXPECT_NEAR(s.exponents[1] + s.exponents[2], 2 * std::log(0.25), 1e-3);
  EXPECT_EQ(s.transient, 200u);
}

TEST(SpectrumQr, SumRuleMatchesLogDeterminant) {
  struct Case {
    std::string name;
    Params params;
    Point x;
  };
  const std::vector<Case> cases = {
      {"disc_A", {}, make_point({0.7, -0.2})},
      {"disc_rot", {}, make_point({-0.3, 0.9})},
      {"disc_B", {}, make_point({0.1, 0.6})},
      {"solenoid", {}, make_point({0.2, 0.1, -0.15})},
      {"expanding_k", {{"k", 3}, {"eps", 0.5}}, make_point({0.3})},
      {"north_south", {}, make_point({0.11})},
      {"linear_torus", {{"a11", 3}, {"a12", 2}, {"a21", 1}, {"a22", 1}}, make_point({0.1, 0.7})},
  };
  for (const auto& c : cases) {
    const System sys = make_system(c.name, c.params);
    for (std::size_t transient : {std::size_t{0}, std::size_t{100}}) {
      const std::size_t n = 1000;
      const auto s = spectrum_qr(sys, c.x, n, {.transient = transient});
      double logdet = 0.0;
      std::size_t j = 0;
      visit_orbit(sys, c.x, n, [&](std::size_t i, const Point& p) {
        if (i < transient) return;
        logdet += std::log(std::fabs(sys.jacobian(p)->determinant()));
        ++j;
      });
      double sum = 0.0;
      for (double e : s.exponents) sum += e;
      EXPECT_NEAR(sum, logdet / static_cast<double>(j), 1e-9) << c.name << " transient " << transient;
    }
  }
}

TEST(SpectrumQr, ConstantJacobianMatchesEigenvalues) {
  for (const auto& m : {std::array<double, 4>{2, 1, 1, 1}, std::array<double, 4>{3, 2, 1, 1}, std::array<double, 4>{5, 2, 2, 1}}) {
    const System sys = make_system("linear_torus", {{"a11", m[0]}, {"a12", m[1]}, {"a21", m[2]}, {"a22", m[3]}, {"exact", 1}});
    Eigen::Matrix2d a;
    a << m[0], m[1], m[2], m[3];
    const Eigen::Vector2d ev = Eigen::EigenSolver<Eigen::Matrix2d>(a).eigenvalues().real().cwiseAbs();
    const double hi = std::log(ev.maxCoeff());
    const double lo = std::log(ev.minCoeff());
    const auto s = spectrum_qr(sys, sys.space().exact_point({7, 8}), 5000);
    EXPECT_NEAR(s.exponents[0], hi, 1e-9);
    EXPECT_NEAR(s.exponents[1], lo, 1e-9);
  }
}

TEST(SpectrumQr, InvariantUnderInitialFrame) {
  std::mt19937_64 rng(5);
  const std::vector<std::pair<System, Point>> cases = {
      {make_system("cat_map"), make_point({0.31, 0.62})},
      {make_system("disc_A"), make_point({0.5, 0.5})},
      {make_system("disc_B"), make_point({0.1, 0.6})},
      {make_system("linear_torus", {{"a11", 3}, {"a12", 2}, {"a21", 1}, {"a22", 1}}), make_point({0.1, 0.7})},
  };
  for (const auto& [sys, x] : cases) {
    const auto base = spectrum_qr(sys, x, 4000);
    for (int t = 0; t < 5; ++t) {
      const auto s = spectrum_qr(sys, x, 4000, {.initial_frame = random_orthonormal(sys.dim(), rng)});
      for (std::size_t i = 0; i < s.exponents.size(); ++i) EXPECT_NEAR(s.exponents[i], base.exponents[i], 1e-9) << sys.name();
    }
  }
}

// The solenoid's two contracting exponents coincide, so only their sum (and
// the simple top exponent) is determined independently of the frame.
TEST(SpectrumQr, DegenerateBlockSumIsFrameInvariant) {
  std::mt19937_64 rng(6);
  const System sol = make_system("solenoid");
  const Point x = make_point({0.2, 0.1, -0.15});
  const auto base = spectrum_qr(sol, x, 4000);
  for (int t = 0; t < 5; ++t) {
    const auto s = spectrum_qr(sol, x, 4000, {.initial_frame = random_orthonormal(3, rng)});
    EXPECT_NEAR(s.exponents[0], base.exponents[0], 1e-9);
    EXPECT_NEAR(s.exponents[1] + s.exponents[2], base.exponents[1] + base.exponents[2], 1e-9);
  }
}

TEST(SpectrumQr, ReorthonormalizationIntervalDoesNotMatter) {
  const System cat = make_system("cat_map", {{"exact", 1}});
  const Point x = cat.space().exact_point({5, 9});
  const auto a = spectrum_qr(cat, x, 2000);
  const auto b = spectrum_qr(cat, x, 2000, {.reorth_every = 5});
  EXPECT_NEAR(a.exponents[0], b.exponents[0], 1e-9);
}

TEST(SpectrumQr, Errors) {
  EXPECT_THROW(spectrum_qr(make_system("cat_map"), make_point({0.1, 0.2}), 0), std::invalid_argument);
  const System h = make_system("horseshoe");
  EXPECT_THROW(spectrum_qr(h, make_point({0.5, 0.5}), 100), std::runtime_error);  // in the gap
  EXPECT_THROW(spectrum_qr(h, make_point({0.5, 0.3}), 100), std::runtime_error);  // escapes at once
}

TEST(Hyperbolicity, CatMapEigendirectionsPassWithZeroSlack) {
  const System cat = make_system("cat_map");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  HyperbolicityOptions o;
  o.lambda = (3.0 - std::sqrt(5.0)) / 2.0;
  o.sigma = (3.0 + std::sqrt(5.0)) / 2.0;
  o.c = 1.0;
  o.unstable = Eigen::Vector2d(phi, 1.0);
  o.stable = Eigen::Vector2d(1.0, -phi);
  // Rounding in s picks up an unstable component of relative size ~1e-16 that
  // grows by sigma^{2j} against the stable one; j <= 8 keeps it below rtol.
  const auto r = hyperbolicity_check(cat, make_point({0.2, 0.3}), 8, o);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.stable_slack, 0.0, 1e-6);
  EXPECT_NEAR(r.unstable_slack, 0.0, 1e-6);
  EXPECT_NEAR(r.tightest_lambda, o.lambda, 1e-9);
  EXPECT_NEAR(r.tightest_sigma, o.sigma, 1e-9);
}

TEST(Hyperbolicity, CatMapEstimatedSplitting) {
  HyperbolicityOptions o;
  o.lambda = 0.4;
  o.sigma = 2.5;
  EXPECT_TRUE(hyperbolicity_check(make_system("cat_map"), make_point({0.2, 0.3}), 15, o).passed);
}

TEST(Hyperbolicity, HorseshoePassesExactly) {
  HyperbolicityOptions o;
  o.lambda = 0.2;
  o.sigma = 5.0;
  const auto r = hyperbolicity_check(make_system("horseshoe"), horseshoe_cylinder_point("011010011100101101"), 15, o);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.tightest_lambda, 0.2, 1e-12);
  EXPECT_NEAR(r.tightest_sigma, 5.0, 1e-12);
}

TEST(Hyperbolicity, RotationFails) {
  HyperbolicityOptions o;
  o.lambda = 0.99;
  o.sigma = 1.01;
  const auto r = hyperbolicity_check(make_system("rotation"), make_point({0.1}), 50, o);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.tightest_sigma, 1.0, 1e-12);
}

TEST(PesinRegion, ClosedFormCases) {
  const System cat = make_system("cat_map");
  const auto cat_samples = grid_samples(cat.space(), 5, false);
  EXPECT_EQ(pesin_region_fraction(cat, cat_samples, 2000, 0.5), 1.0);
  const System rot = make_system("rotation");
  EXPECT_EQ(pesin_region_fraction(rot, grid_samples(rot.space(), 20, false), 2000, 0.01), 0.0);
  const double beta = 0.5;
  const System ns = make_system("north_south", {{"beta", beta}});
  const double gap = std::min(std::fabs(std::log(1 - beta)), std::log(1 + beta)) / 2;
  EXPECT_GE(pesin_region_fraction(ns, grid_samples(ns.space(), 64, false), 20000, gap), 0.95);
}
