#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ergolab/measures.hpp"
#include "ergolab/phase_space.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// Partial Birkhoff averages a_n = (1/n) sum_{j<n} psi(f^j x) at each checkpoint.
struct BirkhoffSeries {
  std::vector<std::size_t> checkpoints;
  std::vector<double> values;
  /// Range of psi over the visited orbit points.
  double orbit_min = 0.0;
  double orbit_max = 0.0;
  /// Number of points visited before the orbit left the space, if it did.
  std::optional<std::size_t> escaped_at;
};

/// n_k = ceil(n * 2^{k-K}) for k = 1..K, deduplicated, always ending at n.
std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t levels = 8);

/// Checkpoints beyond n are ignored; n itself is always recorded last.
/// Empty `checkpoints` means geometric_checkpoints(n).
BirkhoffSeries birkhoff_average(const System& system, const Point& x, const TestFunction& psi, std::size_t n,
                                std::vector<std::size_t> checkpoints = {});

/// (1/n) #{0 <= j < n : f^j x in cells}. An escaped orbit counts its missing
/// iterates as outside.
double sojourn_frequency(const System& system, const Point& x, const GridSet& cells, std::size_t n);

/// Fraction of samples whose orbit re-enters A at least r times among
/// f^1 x, ..., f^n x. Throws std::invalid_argument if a sample is not in A.
double recurrence_fraction(const System& system, const GridSet& a, const std::vector<Point>& samples, std::size_t n,
                           std::size_t r);

struct POmegaEstimate {
  std::vector<EmpiricalMeasure> cluster_measures;
  /// Weak* distances between sigma_{n,x} for every pair of checkpoints.
  std::vector<std::vector<double>> pairwise_distances;
  std::vector<std::size_t> n_checkpoints;
  /// Cluster label of each checkpoint.
  std::vector<std::size_t> labels;
};

inline constexpr double kDefaultClusterEps = 0.05;

POmegaEstimate p_omega_estimate(const System& system, const Point& x, const std::vector<std::size_t>& n_checkpoints,
                                const TestFunctionFamily& family, std::size_t truncation = kDefaultTruncation,
                                double cluster_eps = kDefaultClusterEps);

}  // namespace ergolab
