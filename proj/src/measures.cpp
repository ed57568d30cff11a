#include "ergolab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ergolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double periodic_factor(std::size_t order, double x) {
  if (order == 0) return 1.0;
  const double k = static_cast<double>((order + 1) / 2);
  return clamp01(order % 2 == 1 ? 0.5 * (1.0 + std::cos(kTwoPi * k * x)) : 0.5 * (1.0 + std::sin(kTwoPi * k * x)));
}

double cosine_factor(std::size_t order, double t) {
  if (order == 0) return 1.0;
  return clamp01(0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(order) * t)));
}

/// Enumerates multi-indices of `dim` components with the given total, lexicographically.
void append_total(std::size_t dim, std::size_t total, std::array<std::uint16_t, kMaxDim>& prefix, std::size_t axis,
                  std::vector<std::array<std::uint16_t, kMaxDim>>& out, std::size_t limit) {
  if (out.size() >= limit) return;
  if (axis + 1 == dim) {
    prefix[axis] = static_cast<std::uint16_t>(total);
    out.push_back(prefix);
    return;
  }
  for (std::size_t v = 0; v <= total; ++v) {
    prefix[axis] = static_cast<std::uint16_t>(v);
    append_total(dim, total - v, prefix, axis + 1, out, limit);
    if (out.size() >= limit) return;
  }
}

std::size_t per_axis_subsamples(std::size_t subsamples, std::size_t dim) {
  const double m = std::round(std::pow(static_cast<double>(subsamples), 1.0 / static_cast<double>(dim)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

}  // namespace

TestFunctionFamily::TestFunctionFamily(PhaseSpace space) : space_(std::move(space)) {
  const std::size_t limit = kMaxFunctions - 1;
  orders_.reserve(limit);
  for (std::size_t total = 1; orders_.size() < limit; ++total) {
    std::array<std::uint16_t, kMaxDim> prefix{};
    append_total(space_.dim(), total, prefix, 0, orders_, limit);
  }
}

TestFunctionFamily default_family(const PhaseSpace& space) { return TestFunctionFamily(space); }

double TestFunctionFamily::operator()(std::size_t i, const Point& x) const {
  if (i == 0 || i > kMaxFunctions) throw std::out_of_range("test function index out of range");
  if (i == 1) return 0.5;
  const auto& ord = orders_[i - 2];
  const Box& b = space_.bounds();
  double v = 1.0;
  for (std::size_t a = 0; a < space_.dim(); ++a) {
    if (space_.periodic()) {
      v *= periodic_factor(ord[a], x.coords[a]);
    } else {
      const double t = (x.coords[a] - b.lower[a]) / (b.upper[a] - b.lower[a]);
      v *= cosine_factor(ord[a], t);
    }
  }
  return v;
}

double TestFunctionFamily::box_mean(std::size_t i) const {
  if (i == 0 || i > kMaxFunctions) throw std::out_of_range("test function index out of range");
  if (i == 1) return 0.5;
  double v = 1.0;
  for (std::size_t a = 0; a < space_.dim(); ++a) {
    if (orders_[i - 2][a] != 0) v *= 0.5;
  }
  return v;
}

void TestFunctionFamily::axis_factors(const Point& x, std::size_t axis, std::size_t max_order, double* out) const {
  out[0] = 1.0;
  if (max_order == 0) return;
  if (space_.periodic()) {
    const double c1 = std::cos(kTwoPi * x.coords[axis]);
    const double s1 = std::sin(kTwoPi * x.coords[axis]);
    double c = c1;
    double s = s1;
    for (std::size_t m = 1; m <= max_order; m += 2) {
      out[m] = clamp01(0.5 * (1.0 + c));
      if (m + 1 <= max_order) out[m + 1] = clamp01(0.5 * (1.0 + s));
      const double cn = c * c1 - s * s1;
      const double sn = s * c1 + c * s1;
      c = cn;
      s = sn;
    }
  } else {
    const Box& b = space_.bounds();
    const double t = (x.coords[axis] - b.lower[axis]) / (b.upper[axis] - b.lower[axis]);
    const double c1 = std::cos(std::numbers::pi * t);
    double prev = 1.0;
    double cur = c1;
    for (std::size_t m = 1; m <= max_order; ++m) {
      out[m] = clamp01(0.5 * (1.0 + cur));
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
    }
  }
}

void TestFunctionFamily::evaluate(const Point& x, std::span<double> out) const {
  const std::size_t n = out.size();
  if (n == 0) return;
  if (n > kMaxFunctions) throw std::out_of_range("test function truncation too large");
  out[0] = 0.5;
  if (n == 1) return;
  const std::size_t dim = space_.dim();
  std::array<std::size_t, kMaxDim> max_order{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t a = 0; a < dim; ++a) max_order[a] = std::max<std::size_t>(max_order[a], orders_[i][a]);
  }
  thread_local std::array<std::vector<double>, kMaxDim> factors;
  for (std::size_t a = 0; a < dim; ++a) {
    factors[a].resize(max_order[a] + 1);
    axis_factors(x, a, max_order[a], factors[a].data());
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double v = 1.0;
    for (std::size_t a = 0; a < dim; ++a) v *= factors[a][orders_[i][a]];
    out[i + 1] = v;
  }
}

HistogramMeasure HistogramMeasure::uniform(const Partition& partition) {
  HistogramMeasure h{partition, std::vector<double>(partition.cell_count(), 0.0)};
  std::size_t inside = 0;
  for (std::size_t c = 0; c < partition.cell_count(); ++c) {
    if (partition.space().contains(partition.cell_center(c))) {
      h.weights[c] = 1.0;
      ++inside;
    }
  }
  if (inside == 0) throw std::invalid_argument("partition has no cell inside the space");
  for (auto& w : h.weights) w /= static_cast<double>(inside);
  return h;
}

void validate(const Measure& mu) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
          if (m.samples.empty()) throw std::invalid_argument("empirical measure needs at least one sample");
        } else if constexpr (std::is_same_v<T, HistogramMeasure>) {
          if (m.weights.size() != m.partition.cell_count()) {
            throw std::invalid_argument("histogram weight count does not match partition");
          }
          double s = 0.0;
          for (double w : m.weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("histogram weights must be nonnegative");
            s += w;
          }
          if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("histogram weights must sum to 1");
        }
      },
      mu);
}

double total_mass(const Measure& mu) {
  if (const auto* h = std::get_if<HistogramMeasure>(&mu)) {
    return std::accumulate(h->weights.begin(), h->weights.end(), 0.0);
  }
  return 1.0;
}

double integrate(const Measure& mu, const TestFunction& psi) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiracMeasure>) {
          return psi(m.atom);
        } else if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
          if (m.samples.empty()) throw std::invalid_argument("empirical measure needs at least one sample");
          double s = 0.0;
          for (const auto& p : m.samples) s += psi(p);
          return s / static_cast<double>(m.samples.size());
        } else {
          double s = 0.0;
          for (std::size_t c = 0; c < m.weights.size(); ++c) {
            if (m.weights[c] != 0.0) s += m.weights[c] * psi(m.partition.cell_center(c));
          }
          return s;
        }
      },
      mu);
}

std::vector<double> integrate_family(const Measure& mu, const TestFunctionFamily& family, std::size_t truncation) {
  if (truncation == 0) throw std::invalid_argument("truncation must be >= 1");
  std::vector<double> acc(truncation, 0.0);
  std::vector<double> buf(truncation);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiracMeasure>) {
          family.evaluate(m.atom, acc);
        } else if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
          if (m.samples.empty()) throw std::invalid_argument("empirical measure needs at least one sample");
          for (const auto& p : m.samples) {
            family.evaluate(p, buf);
            for (std::size_t i = 0; i < truncation; ++i) acc[i] += buf[i];
          }
          for (auto& v : acc) v /= static_cast<double>(m.samples.size());
        } else {
          for (std::size_t c = 0; c < m.weights.size(); ++c) {
            if (m.weights[c] == 0.0) continue;
            family.evaluate(m.partition.cell_center(c), buf);
            for (std::size_t i = 0; i < truncation; ++i) acc[i] += m.weights[c] * buf[i];
          }
        }
      },
      mu);
  return acc;
}

double weak_star_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("integral vectors of different truncation");
  double d = 0.0;
  double w = 0.5;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += w * std::fabs(a[i] - b[i]);
    w *= 0.5;
  }
  return d;
}

double weak_star_distance(const Measure& mu, const Measure& nu, const TestFunctionFamily& family,
                          std::size_t truncation) {
  const auto a = integrate_family(mu, family, truncation);
  const auto b = integrate_family(nu, family, truncation);
  return weak_star_distance(a, b);
}

PushforwardResult pushforward(const System& system, const Measure& mu, std::size_t subsamples) {
  return std::visit(
      [&](const auto& m) -> PushforwardResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiracMeasure>) {
          auto image = system.forward(m.atom);
          if (!image) throw std::runtime_error("pushforward: the atom escaped the phase space");
          return {DiracMeasure{*image}, 0.0};
        } else if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
          EmpiricalMeasure out;
          out.samples.reserve(m.samples.size());
          for (const auto& p : m.samples) {
            if (auto image = system.forward(p)) out.samples.push_back(*image);
          }
          if (out.samples.empty()) throw std::runtime_error("pushforward: every sample escaped the phase space");
          const double escaped = static_cast<double>(m.samples.size() - out.samples.size()) /
                                 static_cast<double>(m.samples.size());
          return {std::move(out), escaped};
        } else {
          if (subsamples == 0) throw std::invalid_argument("subsamples must be positive");
          const Partition& part = m.partition;
          const std::size_t dim = part.space().dim();
          const std::size_t per_axis = per_axis_subsamples(subsamples, dim);
          std::size_t count = 1;
          for (std::size_t a = 0; a < dim; ++a) count *= per_axis;
          HistogramMeasure out{part, std::vector<double>(part.cell_count(), 0.0)};
          double escaped = 0.0;
          for (std::size_t c = 0; c < part.cell_count(); ++c) {
            const double w = m.weights[c];
            if (w == 0.0) continue;
            const double share = w / static_cast<double>(count);
            const Box box = part.cell_box(c);
            for (std::size_t s = 0; s < count; ++s) {
              Point p;
              p.dim = static_cast<std::uint8_t>(dim);
              std::size_t rest = s;
              for (std::size_t a = 0; a < dim; ++a) {
                const double t = (static_cast<double>(rest % per_axis) + 0.5) / static_cast<double>(per_axis);
                rest /= per_axis;
                p.coords[a] = box.lower[a] + t * (box.upper[a] - box.lower[a]);
              }
              if (auto image = system.forward(p)) {
                out.weights[part.cell_index(*image)] += share;
              } else {
                escaped += share;
              }
            }
          }
          return {std::move(out), escaped};
        }
      },
      mu);
}

Measure krylov_bogoliubov(const System& system, const Measure& rho, std::size_t n, std::size_t subsamples) {
  if (n == 0) throw std::invalid_argument("krylov_bogoliubov needs n >= 1");
  if (n == 1) return rho;
  return std::visit(
      [&](const auto& m) -> Measure {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiracMeasure>) {
          EmpiricalMeasure out;
          out.samples = orbit(system, m.atom, n).points;
          return out;
        } else if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
          EmpiricalMeasure out;
          out.samples.reserve(m.samples.size() * n);
          for (const auto& p : m.samples) {
            visit_orbit(system, p, n, [&](std::size_t, const Point& y) { out.samples.push_back(y); });
          }
          return out;
        } else {
          HistogramMeasure avg{m.partition, std::vector<double>(m.weights.size(), 0.0)};
          Measure cur = m;
          for (std::size_t j = 0; j < n; ++j) {
            const auto& h = std::get<HistogramMeasure>(cur);
            for (std::size_t c = 0; c < h.weights.size(); ++c) avg.weights[c] += h.weights[c];
            if (j + 1 < n) cur = pushforward(system, cur, subsamples).measure;
          }
          const double total = std::accumulate(avg.weights.begin(), avg.weights.end(), 0.0);
          if (!(total > 0.0)) throw std::runtime_error("krylov_bogoliubov: all mass escaped");
          for (auto& w : avg.weights) w /= total;
          return avg;
        }
      },
      rho);
}

double invariance_residual(const System& system, const Measure& mu, const TestFunctionFamily& family,
                           std::size_t truncation, std::size_t subsamples) {
  const auto pushed = pushforward(system, mu, subsamples);
  return weak_star_distance(pushed.measure, mu, family, truncation);
}

std::vector<std::vector<double>> empirical_integrals(const System& system, const Point& x,
                                                     std::span<const std::size_t> checkpoints,
                                                     const TestFunctionFamily& family, std::size_t truncation) {
  if (checkpoints.empty()) return {};
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() == 0) {
    throw std::invalid_argument("checkpoints must be positive and increasing");
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> sum(truncation, 0.0);
  std::vector<double> buf(truncation);
  std::size_t next = 0;
  visit_orbit(system, x, checkpoints.back(), [&](std::size_t j, const Point& p) {
    family.evaluate(p, buf);
    for (std::size_t i = 0; i < truncation; ++i) sum[i] += buf[i];
    while (next < checkpoints.size() && checkpoints[next] == j + 1) {
      std::vector<double> row(truncation);
      for (std::size_t i = 0; i < truncation; ++i) row[i] = sum[i] / static_cast<double>(j + 1);
      rows.push_back(std::move(row));
      ++next;
    }
  });
  return rows;
}

std::vector<std::size_t> single_linkage(const std::vector<std::vector<double>>& integrals, double eps) {
  const std::size_t m = integrals.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const std::size_t ri = find(i);
      const std::size_t rj = find(j);
      if (ri == rj) continue;
      if (weak_star_distance(integrals[i], integrals[j]) < eps) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
  }
  std::vector<std::size_t> labels(m);
  std::vector<std::size_t> root_label(m, m);
  std::size_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] == m) root_label[r] = next++;
    labels[i] = root_label[r];
  }
  return labels;
}

}  // namespace ergolab
