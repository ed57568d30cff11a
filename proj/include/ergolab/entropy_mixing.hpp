#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/phase_space.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

struct CorrelationSeries {
  /// c_n = fraction of samples x with x in B and f^n x in A, n = 0..n_max.
  std::vector<double> values;
  /// mu(A) mu(B) from sample fractions.
  double target = 0.0;
  /// cesaro[n] = mean of values[0..n].
  std::vector<double> cesaro;
  double mu_a = 0.0;
  double mu_b = 0.0;
};

/// The samples stand in for the reference invariant measure. An escaped
/// orbit never counts as landing in A.
CorrelationSeries correlation_series(const System& system, const GridSet& a, const GridSet& b,
                                     const std::vector<Point>& samples, std::size_t n_max);

enum class MixingVerdict { mixing_consistent, ergodic_only, neither };

std::string_view to_string(MixingVerdict v);

/// Over the last `window` fraction of n = 1..n_max: mixing_consistent if every
/// |c_n - target| < tol; otherwise ergodic_only if every Cesaro mean is within
/// tol of the target; otherwise neither.
MixingVerdict mixing_verdict(const CorrelationSeries& series, double tol = 0.02, double window = 0.25);

struct EntropyEstimate {
  /// H[n] = -sum p log p over the cylinders of length n; H[0] = 0.
  std::vector<double> h;
  /// H[n_reliable] - H[n_reliable - 1]; 0 when n_reliable = 0.
  double slope = 0.0;
  /// Largest n with at least min_per_cylinder samples per occupied cylinder.
  std::size_t n_reliable = 0;
  std::vector<std::size_t> occupied;
  std::string warning;
};

inline constexpr std::size_t kMinSamplesPerCylinder = 30;

/// Cylinder frequencies of the itineraries (cells of f^0 x, ..., f^{n-1} x)
/// for n = 1..n_max. Escape is an extra symbol that repeats once reached.
EntropyEstimate entropy_estimate(const System& system, const std::vector<Point>& samples, const Partition& partition,
                                 std::size_t n_max, std::size_t min_per_cylinder = kMinSamplesPerCylinder);

struct PesinResidual {
  EntropyEstimate entropy;
  double slope = 0.0;
  /// Mean over evenly spaced samples (at most 256) of the sum of positive exponents.
  double positive_exponent_sum = 0.0;
  /// slope - positive_exponent_sum.
  double residual = 0.0;
};

PesinResidual pesin_residual(const System& system, const std::vector<Point>& samples, const Partition& partition,
                             std::size_t n_max, std::size_t lyapunov_n = 2000);

/// prod_{j<n} f'(f^j x) / f'(f^j y) for a 1D map. Throws std::invalid_argument
/// when f^j x and f^j y lie on different branches for some j < n.
double distortion_ratio(const System& system, const Point& x, const Point& y, std::size_t n);

}  // namespace ergolab
