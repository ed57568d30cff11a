#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ergolab/phase_space.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

struct LyapunovSpectrum {
  /// Sorted descending, nats per iterate.
  std::vector<double> exponents;
  std::size_t n_used = 0;
  /// Iterates excluded from the averages.
  std::size_t transient = 0;
  /// Half-range of the last 10% of partial estimates, per exponent.
  std::vector<double> convergence_halfwidth;
};

/// (1/n) sum_{j<n} log |f'(f^j x)| for a 1D system. A zero derivative along
/// the orbit yields -infinity.
double scalar_exponent(const System& system, const Point& x, std::size_t n);

struct QrOptions {
  std::size_t reorth_every = 1;
  /// Leading iterates that only align the frame and are left out of the
  /// averages; defaults to n / 10.
  std::optional<std::size_t> transient;
  /// Must be square with the system's dimension; orthonormalized before use.
  std::optional<Jacobian> initial_frame;
};

/// Discrete QR method over the iterates x, ..., f^{n-1} x. The exponents are
/// averages of log |R_ii| over the iterates after the transient. Stops early
/// (n_used < n) if the orbit escapes. Throws std::runtime_error on a singular
/// Jacobian and std::invalid_argument if the system has no Jacobian.
LyapunovSpectrum spectrum_qr(const System& system, const Point& x, std::size_t n, const QrOptions& options = {});

struct HyperbolicityReport {
  bool passed = false;
  std::size_t n_used = 0;
  /// Smallest lambda with |df^j s| <= C lambda^j |s| for all tested j.
  double tightest_lambda = 0.0;
  /// Largest sigma with |df^j u| >= C^{-1} sigma^j |u| for all tested j.
  double tightest_sigma = 0.0;
  /// min_j of the relative margins; negative means violated.
  double stable_slack = 0.0;
  double unstable_slack = 0.0;
  /// Smallest C for which the given (lambda, sigma) pass.
  double feasible_c = 0.0;
};

struct HyperbolicityOptions {
  double lambda = 0.5;
  double sigma = 2.0;
  double c = 1.0;
  /// Explicit splitting at x; estimated from the SVD of df^n_x when absent.
  std::optional<Eigen::VectorXd> stable;
  std::optional<Eigen::VectorXd> unstable;
  /// Relative tolerance absorbing rounding in the products.
  double rtol = 1e-8;
};

/// Checks |df^j s| <= C lambda^j |s| and |df^j u| >= C^{-1} sigma^j |u| for
/// j = 1..n. In dimension 1 the single direction passes if it satisfies
/// either inequality. Returns passed = false instead of throwing when no
/// splitting works.
HyperbolicityReport hyperbolicity_check(const System& system, const Point& x, std::size_t n,
                                        const HyperbolicityOptions& options);

/// Fraction of samples whose exponents all satisfy |chi| >= gap with
/// convergence halfwidth < gap/2.
double pesin_region_fraction(const System& system, const std::vector<Point>& samples, std::size_t n, double gap);

}  // namespace ergolab
