#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ergolab/entropy_mixing.hpp"

using namespace ergolab;

namespace {

struct Interval {
  double lo;
  double hi;
};

// Preimages of [lo, hi) under the tent map; endpoints are dyadic, so exact.
std::vector<Interval> tent_preimage(const std::vector<Interval>& set) {
  std::vector<Interval> out;
  for (const auto& [lo, hi] : set) {
    out.push_back({lo / 2, hi / 2});
    out.push_back({1 - hi / 2, 1 - lo / 2});
  }
  return out;
}

std::vector<Point> midpoints(std::size_t m) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(make_point({(static_cast<double>(i) + 0.5) / static_cast<double>(m)}));
  return out;
}

GridSet half_cell(const Partition& part) {
  GridSet a(part);
  a.insert(0);
  return a;
}

}  // namespace

TEST(Correlation, TentMatchesDyadicIntervalOracle) {
  const System tent = make_system("tent");
  const Partition part(tent.space(), 2);
  const GridSet a = half_cell(part);
  const std::size_t m = std::size_t{1} << 16;
  const auto samples = midpoints(m);
  const auto s = correlation_series(tent, a, a, samples, 14);
  std::vector<Interval> pre{{0.0, 0.5}};
  for (std::size_t n = 0; n <= 14; ++n) {
    double measure = 0.0;
    std::size_t count = 0;
    for (const auto& iv : pre) {
      const double lo = std::max(iv.lo, 0.0);
      const double hi = std::min(iv.hi, 0.5);
      if (hi <= lo) continue;
      measure += hi - lo;
      for (const auto& p : samples) count += (p[0] >= lo && p[0] < hi) ? 1 : 0;
    }
    EXPECT_EQ(s.values[n], static_cast<double>(count) / static_cast<double>(m)) << n;
    if (n >= 1) {
      EXPECT_EQ(measure, 0.25) << n;
      EXPECT_EQ(s.values[n], 0.25) << n;
    }
    pre = tent_preimage(pre);
  }
  EXPECT_EQ(s.values[0], 0.5);
  EXPECT_EQ(s.target, 0.25);
  EXPECT_EQ(mixing_verdict(s), MixingVerdict::mixing_consistent);
}

TEST(Correlation, RotationIsErgodicButNotMixing) {
  const System rot = make_system("rotation");
  const Partition part(rot.space(), 2);
  const GridSet a = half_cell(part);
  const auto s = correlation_series(rot, a, a, midpoints(1 << 14), 500);
  double spread = 0.0;
  for (std::size_t n = 375; n <= 500; ++n) spread = std::max(spread, std::fabs(s.values[n] - 0.25));
  EXPECT_GT(spread, 0.1);
  EXPECT_NEAR(s.cesaro.back(), 0.25, 0.02);
  EXPECT_EQ(mixing_verdict(s), MixingVerdict::ergodic_only);
}

TEST(Correlation, InvariantsAndTrivialCases) {
  const System cat = make_system("cat_map");
  const Partition part(cat.space(), 4);
  GridSet b(part);
  b.insert(1);
  b.insert(6);
  GridSet a(part);
  a.insert(6);
  const auto samples = grid_samples(cat.space(), 64, false);
  const auto whole = correlation_series(cat, GridSet::all(part), b, samples, 20);
  for (double v : whole.values) EXPECT_EQ(v, whole.mu_b);
  const auto s = correlation_series(cat, a, b, samples, 20);
  // c_0 = mu(A and B) = mu(A) here since A is inside B.
  EXPECT_EQ(s.values[0], s.mu_a);
  double running = 0.0;
  for (std::size_t n = 0; n < s.values.size(); ++n) {
    EXPECT_GE(s.values[n], 0.0);
    EXPECT_LE(s.values[n], 1.0);
    running += s.values[n];
    EXPECT_NEAR(s.cesaro[n], running / static_cast<double>(n + 1), 1e-15);
  }
}

TEST(Correlation, AtomicReferenceIsTriviallyMixing) {
  const System ns = make_system("north_south");
  const Partition part(ns.space(), 16);
  GridSet s_cell(part);
  s_cell.insert(part.cell_index(make_point({0.5})));
  const auto s = correlation_series(ns, s_cell, s_cell, std::vector<Point>(100, make_point({0.5})), 40);
  for (double v : s.values) EXPECT_EQ(v, s.target);
  EXPECT_EQ(mixing_verdict(s), MixingVerdict::mixing_consistent);
}

TEST(MixingVerdict, ClassifiesSyntheticSeries) {
  CorrelationSeries s;
  s.target = 0.25;
  auto fill = [&](auto f) {
    s.values.clear();
    s.cesaro.clear();
    double run = 0.0;
    for (std::size_t n = 0; n <= 100; ++n) {
      s.values.push_back(f(n));
      run += s.values.back();
      s.cesaro.push_back(run / static_cast<double>(n + 1));
    }
  };
  fill([](std::size_t) { return 0.25; });
  EXPECT_EQ(mixing_verdict(s), MixingVerdict::mixing_consistent);
  fill([](std::size_t n) { return n % 2 ? 0.0 : 0.5; });
  EXPECT_EQ(mixing_verdict(s), MixingVerdict::ergodic_only);
  fill([](std::size_t) { return 0.6; });
  EXPECT_EQ(mixing_verdict(s), MixingVerdict::neither);
  EXPECT_EQ(to_string(MixingVerdict::ergodic_only), "ergodic-only");
}

TEST(Entropy, TentBinaryPartitionGivesLogTwo) {
  const System tent = make_system("tent");
  const Partition part(tent.space(), 2);
  const auto e = entropy_estimate(tent, midpoints(100000), part, 12);
  EXPECT_EQ(e.n_reliable, 11u);
  EXPECT_NEAR(e.slope, std::log(2.0), 0.1 * std::log(2.0));
  for (std::size_t n = 1; n < e.h.size(); ++n) EXPECT_GE(e.h[n], e.h[n - 1] - 1e-12);
}

TEST(Entropy, RotationSlopeVanishes) {
  const System rot = make_system("rotation");
  const Partition part(rot.space(), 2);
  const auto e = entropy_estimate(rot, midpoints(100000), part, 200);
  EXPECT_EQ(e.n_reliable, 200u);
  // 2n cylinders of length n: H_n ~ log 2n.
  EXPECT_LT(e.slope, 0.01);
  EXPECT_GE(e.slope, -1e-12);
}

TEST(Entropy, IdentityIsConstant) {
  const System id = make_system("identity");
  const Partition part(id.space(), 4);
  const auto e = entropy_estimate(id, midpoints(1000), part, 8);
  for (std::size_t n = 2; n < e.h.size(); ++n) EXPECT_NEAR(e.h[n], e.h[1], 1e-12);
  EXPECT_NEAR(e.h[1], std::log(4.0), 1e-12);
  EXPECT_NEAR(e.slope, 0.0, 1e-12);
}

TEST(Entropy, SubadditiveWithinNoise) {
  const System sys = make_system("expanding_k", {{"k", 3}, {"eps", 0.5}});
  const Partition part(sys.space(), 3);
  const auto e = entropy_estimate(sys, midpoints(200000), part, 8);
  for (std::size_t n = 1; n <= e.n_reliable; ++n) {
    for (std::size_t m = 1; n + m <= e.n_reliable; ++m) EXPECT_LE(e.h[n + m], e.h[n] + e.h[m] + 0.02);
  }
}

TEST(Entropy, TooFewSamplesWarns) {
  const System tent = make_system("tent");
  const auto e = entropy_estimate(tent, midpoints(20), Partition(tent.space(), 2), 5);
  EXPECT_EQ(e.n_reliable, 0u);
  EXPECT_EQ(e.slope, 0.0);
  EXPECT_FALSE(e.warning.empty());
}

TEST(Pesin, CatMapTentAndRotation) {
  const System cat = make_system("cat_map");
  // H_n - H_{n-1} decreases to the entropy from above; 640^2 samples reach n = 7.
  const auto cat_r = pesin_residual(cat, grid_samples(cat.space(), 640, false), Partition(cat.space(), 2), 10);
  const double chi = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  EXPECT_NEAR(cat_r.slope, chi, 0.15 * chi);
  EXPECT_NEAR(cat_r.positive_exponent_sum, chi, 1e-6);
  EXPECT_LE(cat_r.residual, 0.05);

  const System tent = make_system("tent");
  const auto tent_r = pesin_residual(tent, midpoints(100000), Partition(tent.space(), 2), 12);
  EXPECT_NEAR(tent_r.slope, std::log(2.0), 0.1 * std::log(2.0));
  EXPECT_NEAR(tent_r.positive_exponent_sum, std::log(2.0), 1e-12);

  const System rot = make_system("rotation");
  const auto rot_r = pesin_residual(rot, midpoints(100000), Partition(rot.space(), 2), 200);
  EXPECT_EQ(rot_r.positive_exponent_sum, 0.0);
  EXPECT_NEAR(rot_r.residual, 0.0, 0.01);
}

TEST(Distortion, LinearMapAndCoincidentPoints) {
  const System lin = make_system("expanding_k", {{"k", 3}});
  EXPECT_EQ(distortion_ratio(lin, make_point({0.1}), make_point({0.1000001}), 10), 1.0);
  const System nl = make_system("expanding_k", {{"k", 2}, {"eps", 0.3}});
  EXPECT_EQ(distortion_ratio(nl, make_point({0.37}), make_point({0.37}), 25), 1.0);
  EXPECT_THROW(distortion_ratio(nl, make_point({0.1}), make_point({0.9}), 3), std::invalid_argument);
}

// log f' has Lipschitz constant L = 2 pi eps / (k - eps) and f expands by at
// least sigma = k - eps, so |log h_n| <= L sum_j sigma^{-j} = L / (sigma - 1).
TEST(Distortion, BoundedOnThousandCylinderPairs) {
  const double k = 2.0;
  const double eps = 0.3;
  const System sys = make_system("expanding_k", {{"k", k}, {"eps", eps}});
  const double sigma = k - eps;
  const double bound = 2.0 * std::numbers::pi * eps / (k - eps) / (sigma - 1.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t pairs = 0;
  double worst = 0.0;
  double drift = 0.0;
  while (pairs < 1000) {
    const double x = u(rng);
    const double y = x + (u(rng) - 0.5) * std::pow(sigma + eps, -12.0);
    if (y < 0.0 || y >= 1.0) continue;
    double h12 = 0.0;
    double h10 = 0.0;
    try {
      h12 = std::log(distortion_ratio(sys, make_point({x}), make_point({y}), 12));
      h10 = std::log(distortion_ratio(sys, make_point({x}), make_point({y}), 10));
    } catch (const std::invalid_argument&) {
      continue;  // the pair straddles a cylinder boundary
    }
    worst = std::max(worst, std::fabs(h12));
    drift = std::max(drift, std::fabs(h12 - h10));
    ++pairs;
  }
  EXPECT_LE(worst, bound);
  EXPECT_LE(drift, bound);
}
