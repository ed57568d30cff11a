#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ergolab/measures.hpp"
#include "ergolab/phase_space.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

/// Per-sample attraction data over the window [burn_in, n).
struct AttractionSample {
  double cesaro_distance = 0.0;  ///< mean of dist(f^j x, K) over the window
  double max_distance = 0.0;     ///< sup of dist(f^j x, K) over the window
  bool escaped = false;
  bool topological = false;  ///< max_distance < tol
  bool statistical = false;  ///< cesaro_distance < tol
};

/// Classifies one orbit against K with a common window and tolerance, so
/// topological attraction implies statistical attraction by construction.
AttractionSample classify_attraction(const System& system, const GridSet& k, const Point& x, std::size_t n,
                                     std::size_t burn_in, double tol);

/// Fraction of samples with dist(f^j x, K) < tol for all j in [burn_in, n).
/// Requires tol > cell diameter.
double topological_basin_fraction(const System& system, const GridSet& k, const std::vector<Point>& samples,
                                  std::size_t n, std::size_t burn_in, double tol);

/// Fraction of samples whose mean distance to K over [burn_in, n) is < tol.
double statistical_basin_fraction(const System& system, const GridSet& k, const std::vector<Point>& samples,
                                  std::size_t n, double tol, std::size_t burn_in = 0);

struct VisitFrequencyReport {
  std::vector<double> eps;
  /// sigma_{n,x}(V(eps)) with V(eps) = {dist(., K) < eps}.
  std::vector<double> frequencies;
  double cesaro_distance = 0.0;
  double margin = 0.1;
  /// cesaro_distance <= margin * min(eps).
  bool cesaro_attracted = false;
  /// every frequency >= 1 - margin.
  bool frequency_attracted = false;
  /// False only if the Cesaro criterion accepts while the frequency criterion
  /// rejects, which Markov's inequality rules out.
  bool consistent = true;
};

VisitFrequencyReport visit_frequency_equivalence(const System& system, const GridSet& k, const Point& x,
                                                 std::size_t n, const std::vector<double>& eps, double margin = 0.1);

struct AttractorReport {
  GridSet candidate;
  double topological_basin_fraction = 0.0;
  double statistical_basin_fraction = 0.0;
  double alpha = 1.0;
  std::size_t n = 0;
  std::size_t burn_in = 0;
  double tolerance = 0.0;
  double topological_tolerance = 0.0;
  /// False when even the initial candidate misses the alpha level.
  bool attained = false;
  std::size_t initial_cells = 0;
};

struct AttractorOptions {
  /// Defaults to n / 10.
  std::optional<std::size_t> burn_in;
  /// Cesaro tolerance; defaults to 0.01 * h^{dim+1}, h the cell side.
  std::optional<double> tol;
};

/// Greedy shrink: start from the cells visited by the sampled orbits after
/// burn-in; try removing cells in ascending (visit count, cell index) order,
/// keeping a removal when the statistical basin fraction stays >= alpha;
/// repeat passes until none succeeds. The result is grid-minimal at the
/// partition's resolution.
AttractorReport minimal_statistical_attractor(const System& system, const std::vector<Point>& samples, std::size_t n,
                                              double alpha, const Partition& partition,
                                              const AttractorOptions& options = {});

struct SRBLikeCluster {
  EmpiricalMeasure representative;
  Point start;
  std::size_t representative_sample = 0;
  double basin_fraction = 0.0;
  std::vector<double> integrals;
  double invariance_residual = 0.0;
};

struct SRBLikeReport {
  std::vector<SRBLikeCluster> clusters;
  double epsilon = 0.0;
  GridSet support_cells;
  /// Cluster label per sample.
  std::vector<std::size_t> labels;
  /// 4/n: every representative's residual must stay below it.
  double residual_bound = 0.0;
  bool residuals_ok = true;
};

/// Clusters the empirical measures sigma_{n,x} of the samples under the weak*
/// distance. Support cells: cells holding at least 0.1/cell_count of the
/// aggregated visit mass over [n/10, n).
SRBLikeReport srb_like_estimate(const System& system, const std::vector<Point>& samples, std::size_t n,
                                const TestFunctionFamily& family, const Partition& partition,
                                std::size_t truncation = kDefaultTruncation, double eps = 0.05);

/// Jaccard overlap of the SRB-like support cells and the attractor cells.
double support_attractor_correspondence(const SRBLikeReport& report, const AttractorReport& attractor);

struct StabilityProbe {
  double delta = 0.0;
  std::size_t samples_used = 0;
  double max_excursion = 0.0;
  bool stable = false;
};

/// For each delta, the samples within delta of K are iterated n times and the
/// largest dist(f^j x, K) is recorded; stable when it stays below eps.
/// Throws if no sample lies within some delta.
std::vector<StabilityProbe> orbital_stability_probe(const System& system, const GridSet& k,
                                                    const std::vector<double>& deltas, double eps,
                                                    const std::vector<Point>& samples, std::size_t n);

/// Grid points (per_axis per axis in each cell box grown by delta) lying in
/// the space within distance delta of K.
std::vector<Point> neighbourhood_samples(const GridSet& k, double delta, std::size_t per_axis);

}  // namespace ergolab
