#include "ergolab/entropy_mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "ergolab/lyapunov.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab {

CorrelationSeries correlation_series(const System& system, const GridSet& a, const GridSet& b,
                                     const std::vector<Point>& samples, std::size_t n_max) {
  if (samples.empty()) throw std::invalid_argument("correlation_series needs samples");
  if (a.partition() != b.partition()) throw std::invalid_argument("A and B use different partitions");
  // hits[i][n]: sample i is in B and f^n x_i in A.
  std::vector<std::vector<char>> hits(samples.size());
  std::vector<char> in_a(samples.size(), 0);
  std::vector<char> in_b(samples.size(), 0);
  parallel_for(samples.size(), [&](std::size_t i) {
    in_a[i] = a.contains(samples[i]) ? 1 : 0;
    in_b[i] = b.contains(samples[i]) ? 1 : 0;
    if (!in_b[i]) return;
    auto& row = hits[i];
    row.assign(n_max + 1, 0);
    visit_orbit(system, samples[i], n_max + 1, [&](std::size_t j, const Point& p) { row[j] = a.contains(p) ? 1 : 0; });
  });
  CorrelationSeries s;
  const double m = static_cast<double>(samples.size());
  s.mu_a = static_cast<double>(std::count(in_a.begin(), in_a.end(), 1)) / m;
  s.mu_b = static_cast<double>(std::count(in_b.begin(), in_b.end(), 1)) / m;
  s.target = s.mu_a * s.mu_b;
  std::vector<std::size_t> counts(n_max + 1, 0);
  for (const auto& row : hits) {
    for (std::size_t j = 0; j < row.size(); ++j) counts[j] += static_cast<std::size_t>(row[j]);
  }
  double running = 0.0;
  for (std::size_t j = 0; j <= n_max; ++j) {
    s.values.push_back(static_cast<double>(counts[j]) / m);
    running += s.values.back();
    s.cesaro.push_back(running / static_cast<double>(j + 1));
  }
  return s;
}

std::string_view to_string(MixingVerdict v) {
  switch (v) {
    case MixingVerdict::mixing_consistent:
      return "mixing-consistent";
    case MixingVerdict::ergodic_only:
      return "ergodic-only";
    case MixingVerdict::neither:
      return "neither";
  }
  return "neither";
}

MixingVerdict mixing_verdict(const CorrelationSeries& series, double tol, double window) {
  if (series.values.size() < 2) throw std::invalid_argument("series needs n_max >= 1");
  if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("window must lie in (0,1]");
  const std::size_t n_max = series.values.size() - 1;
  const auto len = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(window * static_cast<double>(n_max))));
  const std::size_t from = n_max + 1 - std::min(len, n_max);
  bool mixing = true;
  bool cesaro = true;
  for (std::size_t n = from; n <= n_max; ++n) {
    if (!(std::fabs(series.values[n] - series.target) < tol)) mixing = false;
    if (!(std::fabs(series.cesaro[n] - series.target) < tol)) cesaro = false;
  }
  if (mixing) return MixingVerdict::mixing_consistent;
  if (cesaro) return MixingVerdict::ergodic_only;
  return MixingVerdict::neither;
}

EntropyEstimate entropy_estimate(const System& system, const std::vector<Point>& samples, const Partition& partition,
                                 std::size_t n_max, std::size_t min_per_cylinder) {
  if (samples.empty()) throw std::invalid_argument("entropy_estimate needs samples");
  if (n_max == 0) throw std::invalid_argument("n_max must be >= 1");
  if (min_per_cylinder == 0) throw std::invalid_argument("min_per_cylinder must be >= 1");
  const std::size_t escape = partition.cell_count();
  const std::size_t m = samples.size();
  std::vector<std::size_t> symbols(m * n_max, escape);
  parallel_for(m, [&](std::size_t i) {
    visit_orbit(system, samples[i], n_max,
                [&](std::size_t j, const Point& p) { symbols[i * n_max + j] = partition.cell_index(p); });
  });

  EntropyEstimate est;
  est.h.push_back(0.0);
  est.occupied.push_back(1);
  std::vector<std::size_t> labels(m, 0);
  std::size_t label_count = 1;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::unordered_map<std::size_t, std::size_t> relabel;
    relabel.reserve(label_count * 2);
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t key = labels[i] * (escape + 1) + symbols[i * n_max + n - 1];
      auto [it, inserted] = relabel.try_emplace(key, counts.size());
      if (inserted) counts.push_back(0);
      ++counts[it->second];
      labels[i] = it->second;
    }
    label_count = counts.size();
    double h = 0.0;
    for (std::size_t c : counts) {
      const double p = static_cast<double>(c) / static_cast<double>(m);
      h -= p * std::log(p);
    }
    est.h.push_back(h);
    est.occupied.push_back(label_count);
    if (m >= min_per_cylinder * label_count) est.n_reliable = n;
  }
  if (est.n_reliable == 0) {
    est.warning = "insufficient samples: fewer than " + std::to_string(min_per_cylinder) +
                  " samples per occupied cylinder at n = 1";
  } else {
    est.slope = est.h[est.n_reliable] - est.h[est.n_reliable - 1];
  }
  return est;
}

PesinResidual pesin_residual(const System& system, const std::vector<Point>& samples, const Partition& partition,
                             std::size_t n_max, std::size_t lyapunov_n) {
  PesinResidual r;
  r.entropy = entropy_estimate(system, samples, partition, n_max);
  r.slope = r.entropy.slope;
  const std::size_t count = std::min<std::size_t>(256, samples.size());
  std::vector<double> sums(count, 0.0);
  parallel_for(count, [&](std::size_t t) {
    const std::size_t i = t * samples.size() / count;
    const auto lyap = spectrum_qr(system, samples[i], lyapunov_n);
    for (double e : lyap.exponents) {
      if (e > 0.0) sums[t] += e;
    }
  });
  double total = 0.0;
  for (double s : sums) total += s;
  r.positive_exponent_sum = total / static_cast<double>(count);
  r.residual = r.slope - r.positive_exponent_sum;
  return r;
}

double distortion_ratio(const System& system, const Point& x, const Point& y, std::size_t n) {
  if (system.dim() != 1) throw std::invalid_argument("distortion_ratio needs a 1D system");
  if (!system.has_jacobian()) throw std::invalid_argument("system has no derivative");
  double log_ratio = 0.0;
  Point a = x;
  Point b = y;
  for (std::size_t j = 0; j < n; ++j) {
    const auto ba = system.branch(a);
    const auto bb = system.branch(b);
    if (!ba || !bb) throw std::invalid_argument("system does not expose branches");
    if (*ba != *bb) throw std::invalid_argument("points lie in different cylinders");
    log_ratio += std::log(std::fabs((*system.jacobian(a))(0, 0))) - std::log(std::fabs((*system.jacobian(b))(0, 0)));
    if (j + 1 == n) break;
    a = *system.forward(a);
    b = *system.forward(b);
  }
  return std::exp(log_ratio);
}

}  // namespace ergolab
