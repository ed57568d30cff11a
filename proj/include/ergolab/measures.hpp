#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "ergolab/phase_space.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

inline constexpr std::size_t kDefaultTruncation = 64;

/// Countable family psi_1, psi_2, ... of continuous functions X -> [0,1]
/// whose weighted series metrizes the weak* topology.
///
/// psi_1 is the constant 1/2. The remaining functions are tensor products of
/// one-dimensional factors phi_0 = 1, enumerated by increasing total order
/// (diagonal traversal), lexicographic within one order:
///   periodic axis:     phi_{2k-1} = (1 + cos 2 pi k x)/2,  phi_{2k} = (1 + sin 2 pi k x)/2
///   non-periodic axis: phi_k = (1 + cos pi k t)/2 with t the coordinate rescaled
///                      from the bounding box to [0,1].
class TestFunctionFamily {
 public:
  static constexpr std::size_t kMaxFunctions = 4096;

  explicit TestFunctionFamily(PhaseSpace space);

  const PhaseSpace& space() const { return space_; }

  /// psi_i(x) for 1-based index i.
  double operator()(std::size_t i, const Point& x) const;
  /// Writes psi_1(x), ..., psi_{out.size()}(x).
  void evaluate(const Point& x, std::span<double> out) const;
  /// Mean of psi_i under the uniform measure on the bounding box (the
  /// fundamental domain for circle/torus). Every nonconstant factor averages to 1/2.
  double box_mean(std::size_t i) const;

 private:
  void axis_factors(const Point& x, std::size_t axis, std::size_t max_order, double* out) const;

  PhaseSpace space_;
  // orders_[i] holds the factor orders of psi_{i+2}.
  std::vector<std::array<std::uint16_t, kMaxDim>> orders_;
};

TestFunctionFamily default_family(const PhaseSpace& space);

struct DiracMeasure {
  Point atom;
};

/// sigma = (1/n) sum delta_{samples[j]}.
struct EmpiricalMeasure {
  std::vector<Point> samples;
};

/// Cell masses on a partition, integrated by the midpoint rule.
struct HistogramMeasure {
  Partition partition;
  std::vector<double> weights;

  /// Normalized Lebesgue measure restricted to the space (disc/solid torus
  /// cells weighted by whether their centre lies inside).
  static HistogramMeasure uniform(const Partition& partition);
};

using Measure = std::variant<DiracMeasure, EmpiricalMeasure, HistogramMeasure>;

/// Validates a measure's invariants (nonempty samples, weights summing to 1).
void validate(const Measure& mu);

double total_mass(const Measure& mu);

using TestFunction = std::function<double(const Point&)>;

double integrate(const Measure& mu, const TestFunction& psi);

/// (int psi_1 dmu, ..., int psi_N dmu).
std::vector<double> integrate_family(const Measure& mu, const TestFunctionFamily& family,
                                     std::size_t truncation = kDefaultTruncation);

/// sum_{i<=N} 2^{-i} |a_i - b_i| for precomputed integral vectors.
double weak_star_distance(std::span<const double> a, std::span<const double> b);

/// sum_{i=1..N} 2^{-i} |int psi_i dmu - int psi_i dnu|. The tail beyond N
/// contributes at most 2^{-N}.
double weak_star_distance(const Measure& mu, const Measure& nu, const TestFunctionFamily& family,
                          std::size_t truncation = kDefaultTruncation);

struct PushforwardResult {
  Measure measure;
  /// Mass whose image left the phase space (horseshoe).
  double escaped_mass = 0.0;
};

/// T*mu. Histograms are transported by mapping `subsamples` stratified points
/// per cell (rounded to a per-axis count m = round(S^{1/dim})).
PushforwardResult pushforward(const System& system, const Measure& mu, std::size_t subsamples = 16);

/// Cesaro average (1/n) sum_{j<n} (T*)^j rho in rho's representation.
Measure krylov_bogoliubov(const System& system, const Measure& rho, std::size_t n, std::size_t subsamples = 16);

/// weak_star_distance(T*mu, mu).
double invariance_residual(const System& system, const Measure& mu, const TestFunctionFamily& family,
                           std::size_t truncation = kDefaultTruncation, std::size_t subsamples = 16);

/// Integral vectors of the empirical measures sigma_{n,x} at each checkpoint
/// along one orbit. Returns fewer rows if the orbit escapes first.
std::vector<std::vector<double>> empirical_integrals(const System& system, const Point& x,
                                                     std::span<const std::size_t> checkpoints,
                                                     const TestFunctionFamily& family,
                                                     std::size_t truncation = kDefaultTruncation);

/// Single-linkage clustering under the weak* distance: two items share a
/// label when joined by a chain of pairs at distance < eps. Labels are
/// 0..k-1 numbered by first appearance.
std::vector<std::size_t> single_linkage(const std::vector<std::vector<double>>& integrals, double eps);

}  // namespace ergolab
