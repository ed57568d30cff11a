#include "ergolab/attractors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ergolab/parallel.hpp"

namespace ergolab {

namespace {

void require_samples(const std::vector<Point>& samples) {
  if (samples.empty()) throw std::invalid_argument("at least one sample is required");
}

void require_window(std::size_t n, std::size_t burn_in) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (burn_in >= n) throw std::invalid_argument("burn_in must be smaller than n");
}

double fraction_of(const std::vector<char>& flags) {
  return static_cast<double>(std::count(flags.begin(), flags.end(), 1)) / static_cast<double>(flags.size());
}

/// Mean distance to K over [burn_in, n), giving up (returning +inf) once the
/// running sum proves the mean reaches tol. Escaped orbits count as unattracted.
double cesaro_within(const System& system, const GridSet& k, const Point& x, std::size_t n, std::size_t burn_in,
                     double tol) {
  const double budget = tol * static_cast<double>(n - burn_in);
  double sum = 0.0;
  bool exceeded = false;
  Point y = x;
  for (std::size_t j = 0; j < n; ++j) {
    if (j >= burn_in) {
      sum += k.distance(y);
      if (sum >= budget) {
        exceeded = true;
        break;
      }
    }
    if (j + 1 == n) break;
    auto next = system.forward(y);
    if (!next) return std::numeric_limits<double>::infinity();
    y = *next;
  }
  if (exceeded) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(n - burn_in);
}

}  // namespace

AttractionSample classify_attraction(const System& system, const GridSet& k, const Point& x, std::size_t n,
                                     std::size_t burn_in, double tol) {
  require_window(n, burn_in);
  AttractionSample s;
  double sum = 0.0;
  const std::size_t visited = visit_orbit(system, x, n, [&](std::size_t j, const Point& p) {
    if (j < burn_in) return;
    const double d = k.distance(p);
    sum += d;
    s.max_distance = std::max(s.max_distance, d);
  });
  if (visited < n) {
    s.escaped = true;
    s.cesaro_distance = std::numeric_limits<double>::infinity();
    s.max_distance = std::numeric_limits<double>::infinity();
    return s;
  }
  s.cesaro_distance = sum / static_cast<double>(n - burn_in);
  s.topological = s.max_distance < tol;
  s.statistical = s.cesaro_distance < tol;
  return s;
}

double topological_basin_fraction(const System& system, const GridSet& k, const std::vector<Point>& samples,
                                  std::size_t n, std::size_t burn_in, double tol) {
  require_samples(samples);
  require_window(n, burn_in);
  if (!(tol > k.partition().cell_diameter())) {
    throw std::invalid_argument("topological tolerance must exceed the cell diameter");
  }
  std::vector<char> hit(samples.size(), 0);
  parallel_for(samples.size(), [&](std::size_t i) {
    Point y = samples[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j >= burn_in && !(k.distance(y) < tol)) return;
      if (j + 1 == n) break;
      auto next = system.forward(y);
      if (!next) return;
      y = *next;
    }
    hit[i] = 1;
  });
  return fraction_of(hit);
}

double statistical_basin_fraction(const System& system, const GridSet& k, const std::vector<Point>& samples,
                                  std::size_t n, double tol, std::size_t burn_in) {
  require_samples(samples);
  require_window(n, burn_in);
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  std::vector<char> hit(samples.size(), 0);
  parallel_for(samples.size(), [&](std::size_t i) {
    hit[i] = cesaro_within(system, k, samples[i], n, burn_in, tol) < tol ? 1 : 0;
  });
  return fraction_of(hit);
}

VisitFrequencyReport visit_frequency_equivalence(const System& system, const GridSet& k, const Point& x,
                                                 std::size_t n, const std::vector<double>& eps, double margin) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (eps.empty()) throw std::invalid_argument("eps list must be nonempty");
  for (double e : eps) {
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
  }
  if (!(margin > 0.0 && margin < 1.0)) throw std::invalid_argument("margin must lie in (0,1)");
  VisitFrequencyReport r;
  r.eps = eps;
  r.margin = margin;
  std::vector<std::size_t> inside(eps.size(), 0);
  double sum = 0.0;
  visit_orbit(system, x, n, [&](std::size_t, const Point& p) {
    const double d = k.distance(p);
    sum += d;
    for (std::size_t e = 0; e < eps.size(); ++e) {
      if (d < eps[e]) ++inside[e];
    }
  });
  const double nn = static_cast<double>(n);
  r.cesaro_distance = sum / nn;
  r.frequency_attracted = true;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    r.frequencies.push_back(static_cast<double>(inside[e]) / nn);
    if (r.frequencies.back() < 1.0 - margin) r.frequency_attracted = false;
  }
  const double min_eps = *std::min_element(eps.begin(), eps.end());
  r.cesaro_attracted = r.cesaro_distance <= margin * min_eps;
  r.consistent = !(r.cesaro_attracted && !r.frequency_attracted);
  return r;
}

AttractorReport minimal_statistical_attractor(const System& system, const std::vector<Point>& samples, std::size_t n,
                                              double alpha, const Partition& partition,
                                              const AttractorOptions& options) {
  require_samples(samples);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
  if (partition.space() != system.space()) throw std::invalid_argument("partition belongs to another space");
  const std::size_t burn_in = options.burn_in.value_or(n / 10);
  require_window(n, burn_in);
  const std::size_t dim = partition.space().dim();
  double side = 0.0;
  for (std::size_t a = 0; a < dim; ++a) side = std::max(side, partition.cell_side(a));
  const double tol = options.tol.value_or(0.01 * std::pow(side, static_cast<double>(dim + 1)));
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  // Visit counts over the window, aggregated across samples.
  std::vector<std::vector<std::size_t>> visited(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    auto& cells = visited[i];
    visit_orbit(system, samples[i], n, [&](std::size_t j, const Point& p) {
      if (j >= burn_in) cells.push_back(partition.cell_index(p));
    });
    std::sort(cells.begin(), cells.end());
  });
  std::vector<std::size_t> counts(partition.cell_count(), 0);
  for (const auto& cells : visited) {
    for (std::size_t c : cells) ++counts[c];
  }
  visited.clear();

  GridSet candidate(partition);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) candidate.insert(c);
  }

  AttractorReport rep{candidate, 0.0, 0.0, alpha, n, burn_in, tol, 1.5 * partition.cell_diameter(), false,
                      candidate.size()};
  if (candidate.empty()) return rep;  // every orbit escaped before burn-in

  const std::size_t allowed_failures =
      static_cast<std::size_t>(std::floor((1.0 - alpha) * static_cast<double>(samples.size()) + 1e-9));
  // Samples that failed recently are tried first so rejected removals exit early.
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  auto passes = [&](const GridSet& k) {
    std::atomic<std::size_t> failures{0};
    std::vector<char> failed(samples.size(), 0);
    parallel_for(samples.size(), [&](std::size_t t) {
      if (failures.load() > allowed_failures) return;
      const std::size_t i = order[t];
      if (!(cesaro_within(system, k, samples[i], n, burn_in, tol) < tol)) {
        failed[i] = 1;
        failures.fetch_add(1);
      }
    });
    std::stable_partition(order.begin(), order.end(), [&](std::size_t i) { return failed[i] != 0; });
    return failures.load() <= allowed_failures;
  };

  rep.attained = passes(candidate);
  if (rep.attained) {
    bool removed = true;
    while (removed && candidate.size() > 1) {
      removed = false;
      std::vector<std::size_t> cells = candidate.cells();
      std::stable_sort(cells.begin(), cells.end(),
                       [&](std::size_t a, std::size_t b) { return counts[a] < counts[b]; });
      for (std::size_t c : cells) {
        if (candidate.size() == 1) break;
        GridSet trial = candidate;
        trial.erase(c);
        if (passes(trial)) {
          candidate = std::move(trial);
          removed = true;
        }
      }
    }
  }
  rep.candidate = candidate;
  rep.statistical_basin_fraction = statistical_basin_fraction(system, candidate, samples, n, tol, burn_in);
  rep.topological_basin_fraction =
      topological_basin_fraction(system, candidate, samples, n, burn_in, rep.topological_tolerance);
  return rep;
}

SRBLikeReport srb_like_estimate(const System& system, const std::vector<Point>& samples, std::size_t n,
                                const TestFunctionFamily& family, const Partition& partition,
                                std::size_t truncation, double eps) {
  require_samples(samples);
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (partition.space() != system.space()) throw std::invalid_argument("partition belongs to another space");
  const std::size_t burn_in = n / 10;
  const std::size_t checkpoint[] = {n};

  std::vector<std::vector<double>> integrals(samples.size());
  std::vector<std::vector<std::size_t>> tail_cells(samples.size());
  std::vector<char> complete(samples.size(), 0);
  parallel_for(samples.size(), [&](std::size_t i) {
    auto rows = empirical_integrals(system, samples[i], checkpoint, family, truncation);
    if (rows.empty()) return;  // escaped before n
    integrals[i] = std::move(rows.front());
    complete[i] = 1;
    visit_orbit(system, samples[i], n, [&](std::size_t j, const Point& p) {
      if (j >= burn_in) tail_cells[i].push_back(partition.cell_index(p));
    });
  });

  std::vector<std::size_t> kept;
  std::vector<std::vector<double>> kept_integrals;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (complete[i]) {
      kept.push_back(i);
      kept_integrals.push_back(integrals[i]);
    }
  }

  SRBLikeReport rep{{}, eps, GridSet(partition), std::vector<std::size_t>(samples.size(), SIZE_MAX),
                    4.0 / static_cast<double>(n), true};
  if (kept.empty()) return rep;
  const auto labels = single_linkage(kept_integrals, eps);
  const std::size_t clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> sizes(clusters, 0);
  std::vector<std::size_t> first(clusters, SIZE_MAX);
  for (std::size_t t = 0; t < kept.size(); ++t) {
    rep.labels[kept[t]] = labels[t];
    ++sizes[labels[t]];
    if (first[labels[t]] == SIZE_MAX) first[labels[t]] = kept[t];
  }
  for (std::size_t c = 0; c < clusters; ++c) {
    SRBLikeCluster cl;
    cl.representative_sample = first[c];
    cl.start = samples[first[c]];
    cl.representative.samples = orbit(system, cl.start, n).points;
    cl.basin_fraction = static_cast<double>(sizes[c]) / static_cast<double>(samples.size());
    cl.integrals = integrals[first[c]];
    cl.invariance_residual = invariance_residual(system, cl.representative, family, truncation);
    if (!(cl.invariance_residual <= rep.residual_bound)) rep.residuals_ok = false;
    rep.clusters.push_back(std::move(cl));
  }

  std::vector<std::size_t> mass(partition.cell_count(), 0);
  std::size_t total = 0;
  for (std::size_t i : kept) {
    for (std::size_t c : tail_cells[i]) ++mass[c];
    total += tail_cells[i].size();
  }
  const double threshold = 0.1 / static_cast<double>(partition.cell_count());
  for (std::size_t c = 0; c < mass.size(); ++c) {
    if (total > 0 && static_cast<double>(mass[c]) / static_cast<double>(total) >= threshold) {
      rep.support_cells.insert(c);
    }
  }
  return rep;
}

double support_attractor_correspondence(const SRBLikeReport& report, const AttractorReport& attractor) {
  const GridSet& a = report.support_cells;
  const GridSet& b = attractor.candidate;
  if (a.partition() != b.partition()) throw std::invalid_argument("reports use different partitions");
  std::size_t both = 0;
  for (std::size_t c : a.cells()) {
    if (b.contains_cell(c)) ++both;
  }
  const std::size_t either = a.size() + b.size() - both;
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

std::vector<StabilityProbe> orbital_stability_probe(const System& system, const GridSet& k,
                                                    const std::vector<double>& deltas, double eps,
                                                    const std::vector<Point>& samples, std::size_t n) {
  if (k.empty()) throw std::invalid_argument("target set is empty");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  std::vector<double> start_dist(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) start_dist[i] = k.distance(samples[i]);
  std::vector<double> excursion(samples.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t i) {
    double worst = 0.0;
    const std::size_t visited =
        visit_orbit(system, samples[i], n, [&](std::size_t, const Point& p) { worst = std::max(worst, k.distance(p)); });
    excursion[i] = visited < n ? std::numeric_limits<double>::infinity() : worst;
  });
  std::vector<StabilityProbe> out;
  for (double delta : deltas) {
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
    StabilityProbe p;
    p.delta = delta;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (start_dist[i] <= delta) {
        ++p.samples_used;
        p.max_excursion = std::max(p.max_excursion, excursion[i]);
      }
    }
    if (p.samples_used == 0) throw std::invalid_argument("no sample lies within delta of the target set");
    p.stable = p.max_excursion < eps;
    out.push_back(p);
  }
  return out;
}

std::vector<Point> neighbourhood_samples(const GridSet& k, double delta, std::size_t per_axis) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
  const PhaseSpace& space = k.partition().space();
  std::vector<Point> out;
  for (std::size_t c : k.cells()) {
    Box box = k.partition().cell_box(c);
    for (std::size_t a = 0; a < space.dim(); ++a) {
      box.lower[a] -= delta;
      box.upper[a] += delta;
    }
    std::size_t total = 1;
    for (std::size_t a = 0; a < space.dim(); ++a) total *= per_axis;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::array<double, kMaxDim> raw{};
      std::size_t rest = idx;
      for (std::size_t a = 0; a < space.dim(); ++a) {
        const double t = (static_cast<double>(rest % per_axis) + 0.5) / static_cast<double>(per_axis);
        rest /= per_axis;
        raw[a] = box.lower[a] + t * (box.upper[a] - box.lower[a]);
      }
      const std::span<const double> coords(raw.data(), space.dim());
      const Point p = space.periodic() ? wrap(space, coords) : make_point(coords);
      if (space.contains(p) && k.distance(p) <= delta) out.push_back(p);
    }
  }
  return out;
}

}  // namespace ergolab
