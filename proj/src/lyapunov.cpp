#include "ergolab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ergolab/parallel.hpp"

namespace ergolab {

namespace {

Jacobian require_jacobian(const System& system, const Point& x) {
  auto j = system.jacobian(x);
  if (!j) throw std::invalid_argument("system '" + system.name() + "' has no Jacobian at this point");
  return *j;
}

// Jacobian at a point whose image exists; nullopt marks an escaping point.
std::optional<Jacobian> jacobian_unless_escaping(const System& system, const Point& x) {
  auto j = system.jacobian(x);
  if (j) return j;
  if (!system.forward(x)) return std::nullopt;
  return require_jacobian(system, x);
}

}  // namespace

double scalar_exponent(const System& system, const Point& x, std::size_t n) {
  if (system.dim() != 1) throw std::invalid_argument("scalar_exponent needs a 1D system");
  if (!system.has_jacobian()) throw std::invalid_argument("system has no derivative");
  if (n == 0) throw std::invalid_argument("scalar_exponent needs n >= 1");
  double sum = 0.0;
  const std::size_t used = visit_orbit(system, x, n, [&](std::size_t, const Point& p) {
    sum += std::log(std::fabs(require_jacobian(system, p)(0, 0)));
  });
  return sum / static_cast<double>(used);
}

LyapunovSpectrum spectrum_qr(const System& system, const Point& x, std::size_t n, const QrOptions& options) {
  if (!system.has_jacobian()) throw std::invalid_argument("system has no Jacobian");
  if (n == 0) throw std::invalid_argument("spectrum_qr needs n >= 1");
  const std::size_t reorth_every = options.reorth_every;
  if (reorth_every == 0) throw std::invalid_argument("reorth_every must be >= 1");
  const std::size_t transient = options.transient.value_or(n / 10);
  if (transient >= n) throw std::invalid_argument("transient must be smaller than n");
  const auto d = static_cast<Eigen::Index>(system.dim());

  Jacobian frame = Jacobian::Identity(d, d);
  if (options.initial_frame) {
    const auto& f = *options.initial_frame;
    if (f.rows() != d || f.cols() != d) throw std::invalid_argument("initial frame has the wrong shape");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(f)};
    if (std::fabs(qr.matrixQR().diagonal().prod()) == 0.0) throw std::invalid_argument("initial frame is singular");
    frame = Eigen::MatrixXd(qr.householderQ());
  }

  std::vector<double> sums(static_cast<std::size_t>(d), 0.0);
  std::vector<std::vector<double>> partial;  // estimates after each reorthonormalization
  Jacobian m = frame;
  Point y = x;
  std::size_t steps = 0;
  auto reorthonormalize = [&] {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(m)};
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    Eigen::MatrixXd q = qr.householderQ();
    for (Eigen::Index i = 0; i < d; ++i) {
      const double rii = r(i, i);
      if (rii == 0.0 || !std::isfinite(rii)) throw std::runtime_error("singular Jacobian along the orbit");
      if (steps > transient) sums[static_cast<std::size_t>(i)] += std::log(std::fabs(rii));
      if (rii < 0.0) q.col(i) = -q.col(i);
    }
    m = q;
    if (steps > transient) {
      std::vector<double> est(sums.size());
      for (std::size_t i = 0; i < sums.size(); ++i) est[i] = sums[i] / static_cast<double>(steps - transient);
      partial.push_back(std::move(est));
    }
  };
  std::size_t since = 0;
  while (steps < n) {
    const auto jac = jacobian_unless_escaping(system, y);
    if (!jac) {
      if (since > 0) reorthonormalize();
      break;
    }
    m = *jac * m;
    ++steps;
    ++since;
    // The frame is always renormalized when the transient ends so that the
    // averages start from a clean block.
    if (since == reorth_every || steps == n || steps == transient) {
      reorthonormalize();
      since = 0;
    }
    if (steps == n) break;
    auto next = system.forward(y);
    if (!next) {
      if (since > 0) reorthonormalize();
      break;
    }
    y = *next;
  }
  if (partial.empty()) throw std::runtime_error("orbit escaped before the transient ended");

  LyapunovSpectrum out;
  out.n_used = steps;
  out.transient = transient;
  const std::size_t tail = std::max<std::size_t>(1, partial.size() / 10);
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = partial.size() - tail; k < partial.size(); ++k) {
      lo = std::min(lo, partial[k][i]);
      hi = std::max(hi, partial[k][i]);
    }
    pairs.emplace_back(partial.back()[i], 0.5 * (hi - lo));
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [e, h] : pairs) {
    out.exponents.push_back(e);
    out.convergence_halfwidth.push_back(h);
  }
  return out;
}

HyperbolicityReport hyperbolicity_check(const System& system, const Point& x, std::size_t n,
                                        const HyperbolicityOptions& opt) {
  if (!system.has_jacobian()) throw std::invalid_argument("system has no Jacobian");
  if (n == 0) throw std::invalid_argument("hyperbolicity_check needs n >= 1");
  if (!(opt.lambda > 0.0) || !(opt.sigma > 0.0) || !(opt.c > 0.0)) {
    throw std::invalid_argument("lambda, sigma and C must be positive");
  }
  const auto d = static_cast<Eigen::Index>(system.dim());
  if (d > 2) throw std::invalid_argument("hyperbolicity_check supports 1D and 2D systems");

  // Products df^j_x for j = 1..n_used.
  std::vector<Eigen::MatrixXd> products;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(d, d);
  Point y = x;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jac = jacobian_unless_escaping(system, y);
    if (!jac) break;
    acc = Eigen::MatrixXd(*jac) * acc;
    products.push_back(acc);
    if (j + 1 == n) break;
    auto next = system.forward(y);
    if (!next) break;
    y = *next;
  }

  if (products.empty()) throw std::runtime_error("orbit escapes at the first iterate");
  Eigen::VectorXd s;
  Eigen::VectorXd u;
  if (d == 1) {
    s = u = Eigen::VectorXd::Ones(1);
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(products.back(), Eigen::ComputeFullV);
    u = opt.unstable ? *opt.unstable : Eigen::VectorXd(svd.matrixV().col(0));
    s = opt.stable ? *opt.stable : Eigen::VectorXd(svd.matrixV().col(d - 1));
  }
  if (s.size() != d || u.size() != d || s.norm() == 0.0 || u.norm() == 0.0) {
    throw std::invalid_argument("splitting vectors must be nonzero with the system's dimension");
  }

  HyperbolicityReport rep;
  rep.n_used = products.size();
  rep.tightest_lambda = 0.0;
  rep.tightest_sigma = std::numeric_limits<double>::infinity();
  rep.stable_slack = std::numeric_limits<double>::infinity();
  rep.unstable_slack = std::numeric_limits<double>::infinity();
  double c_stable = 0.0;
  double c_unstable = 0.0;
  for (std::size_t k = 0; k < products.size(); ++k) {
    const double j = static_cast<double>(k + 1);
    const double gs = (products[k] * s).norm() / s.norm();
    const double gu = (products[k] * u).norm() / u.norm();
    const double ls = std::pow(opt.lambda, j);
    const double su = std::pow(opt.sigma, j);
    rep.tightest_lambda = std::max(rep.tightest_lambda, std::pow(gs / opt.c, 1.0 / j));
    rep.tightest_sigma = std::min(rep.tightest_sigma, std::pow(opt.c * gu, 1.0 / j));
    rep.stable_slack = std::min(rep.stable_slack, (opt.c * ls - gs) / (opt.c * ls));
    rep.unstable_slack = std::min(rep.unstable_slack, (gu - su / opt.c) / (su / opt.c));
    c_stable = std::max(c_stable, gs / ls);
    c_unstable = std::max(c_unstable, su / gu);
  }
  const bool stable_ok = rep.stable_slack >= -opt.rtol && opt.lambda < 1.0;
  const bool unstable_ok = rep.unstable_slack >= -opt.rtol && opt.sigma > 1.0;
  if (d == 1) {
    rep.passed = stable_ok || unstable_ok;
    rep.feasible_c = std::min(c_stable, c_unstable);
  } else {
    rep.passed = stable_ok && unstable_ok;
    rep.feasible_c = std::max(c_stable, c_unstable);
  }
  return rep;
}

double pesin_region_fraction(const System& system, const std::vector<Point>& samples, std::size_t n, double gap) {
  if (samples.empty()) throw std::invalid_argument("pesin_region_fraction needs samples");
  if (!(gap > 0.0)) throw std::invalid_argument("gap must be positive");
  std::vector<char> inside(samples.size(), 0);
  parallel_for(samples.size(), [&](std::size_t i) {
    const auto lyap = spectrum_qr(system, samples[i], n);
    bool ok = true;
    for (std::size_t k = 0; k < lyap.exponents.size(); ++k) {
      if (!(std::fabs(lyap.exponents[k]) >= gap) || !(lyap.convergence_halfwidth[k] < gap / 2.0)) ok = false;
    }
    inside[i] = ok ? 1 : 0;
  });
  return static_cast<double>(std::count(inside.begin(), inside.end(), 1)) / static_cast<double>(samples.size());
}

}  // namespace ergolab
