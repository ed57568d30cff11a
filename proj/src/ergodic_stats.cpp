#include "ergolab/ergodic_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ergolab/parallel.hpp"

namespace ergolab {

std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t levels) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (levels == 0) throw std::invalid_argument("levels must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= levels; ++k) {
    const double v = std::ceil(static_cast<double>(n) * std::ldexp(1.0, static_cast<int>(k) - static_cast<int>(levels)));
    const auto c = std::max<std::size_t>(1, static_cast<std::size_t>(v));
    if (out.empty() || c > out.back()) out.push_back(std::min(c, n));
  }
  if (out.back() != n) out.push_back(n);
  return out;
}

BirkhoffSeries birkhoff_average(const System& system, const Point& x, const TestFunction& psi, std::size_t n,
                                std::vector<std::size_t> checkpoints) {
  if (n == 0) throw std::invalid_argument("birkhoff_average needs n >= 1");
  if (checkpoints.empty()) checkpoints = geometric_checkpoints(n);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  std::erase_if(checkpoints, [n](std::size_t c) { return c == 0 || c > n; });
  if (checkpoints.empty() || checkpoints.back() != n) checkpoints.push_back(n);

  BirkhoffSeries series;
  series.orbit_min = std::numeric_limits<double>::infinity();
  series.orbit_max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t next = 0;
  const std::size_t visited = visit_orbit(system, x, n, [&](std::size_t j, const Point& p) {
    const double v = psi(p);
    sum += v;
    series.orbit_min = std::min(series.orbit_min, v);
    series.orbit_max = std::max(series.orbit_max, v);
    if (next < checkpoints.size() && checkpoints[next] == j + 1) {
      series.checkpoints.push_back(j + 1);
      series.values.push_back(sum / static_cast<double>(j + 1));
      ++next;
    }
  });
  if (visited < n) series.escaped_at = visited;
  return series;
}

double sojourn_frequency(const System& system, const Point& x, const GridSet& cells, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sojourn_frequency needs n >= 1");
  std::size_t hits = 0;
  visit_orbit(system, x, n, [&](std::size_t, const Point& p) {
    if (cells.contains(p)) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(n);
}

double recurrence_fraction(const System& system, const GridSet& a, const std::vector<Point>& samples, std::size_t n,
                           std::size_t r) {
  if (r == 0) throw std::invalid_argument("revisit threshold must be >= 1");
  if (samples.empty()) throw std::invalid_argument("recurrence_fraction needs samples");
  for (const auto& p : samples) {
    if (!a.contains(p)) throw std::invalid_argument("recurrence sample outside the target set");
  }
  std::vector<char> returned(samples.size(), 0);
  parallel_for(samples.size(), [&](std::size_t i) {
    std::size_t returns = 0;
    Point y = samples[i];
    for (std::size_t j = 1; j <= n; ++j) {
      auto next = system.forward(y);
      if (!next) break;
      y = *next;
      if (a.contains(y) && ++returns >= r) {
        returned[i] = 1;
        break;
      }
    }
  });
  const auto hits = std::count(returned.begin(), returned.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

POmegaEstimate p_omega_estimate(const System& system, const Point& x, const std::vector<std::size_t>& n_checkpoints,
                                const TestFunctionFamily& family, std::size_t truncation, double cluster_eps) {
  if (n_checkpoints.size() < 2) throw std::invalid_argument("p_omega_estimate needs at least two checkpoints");
  if (!std::is_sorted(n_checkpoints.begin(), n_checkpoints.end()) ||
      std::adjacent_find(n_checkpoints.begin(), n_checkpoints.end()) != n_checkpoints.end() ||
      n_checkpoints.front() == 0) {
    throw std::invalid_argument("checkpoints must be positive and strictly increasing");
  }
  const auto seg = orbit(system, x, n_checkpoints.back());
  POmegaEstimate est;
  for (std::size_t c : n_checkpoints) {
    if (c <= seg.points.size()) est.n_checkpoints.push_back(c);
  }
  if (est.n_checkpoints.empty()) throw std::runtime_error("orbit escaped before the first checkpoint");
  const auto rows = empirical_integrals(system, x, est.n_checkpoints, family, truncation);
  est.labels = single_linkage(rows, cluster_eps);
  const std::size_t clusters = est.labels.empty() ? 0 : *std::max_element(est.labels.begin(), est.labels.end()) + 1;
  std::vector<std::size_t> rep(clusters, 0);
  for (std::size_t i = 0; i < est.labels.size(); ++i) rep[est.labels[i]] = i;  // largest n wins
  for (std::size_t c = 0; c < clusters; ++c) {
    const std::size_t len = est.n_checkpoints[rep[c]];
    est.cluster_measures.push_back(
        EmpiricalMeasure{std::vector<Point>(seg.points.begin(), seg.points.begin() + static_cast<std::ptrdiff_t>(len))});
  }
  const std::size_t m = rows.size();
  est.pairwise_distances.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double d = weak_star_distance(rows[a], rows[b]);
      est.pairwise_distances[a][b] = d;
      est.pairwise_distances[b][a] = d;
    }
  }
  return est;
}

}  // namespace ergolab
