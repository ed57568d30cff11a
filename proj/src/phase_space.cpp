#include "ergolab/phase_space.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ergolab {

__extension__ typedef unsigned __int128 u128;

namespace {

constexpr double kContainSlack = 1e-12;

void check_modulus(std::optional<std::uint64_t> q) {
  if (!q) return;
  if (*q < 3 || *q % 2 == 0 || *q >= (1ULL << 32)) {
    throw std::invalid_argument("exact modulus must be odd, >= 3 and < 2^32");
  }
}

Box unit_box(std::size_t dim) {
  Box b;
  for (std::size_t i = 0; i < dim; ++i) {
    b.lower[i] = 0.0;
    b.upper[i] = 1.0;
  }
  return b;
}

double wrap_unit(double v) {
  double r = v - std::floor(v);
  // v slightly below an integer can round r up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Distance from coordinate v to the interval [lo, hi] on the circle R/Z.
double circle_gap(double v, double lo, double hi) {
  if (v >= lo && v <= hi) return 0.0;
  auto circ = [](double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
  };
  return std::min(circ(v, lo), circ(v, hi));
}

}  // namespace

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::circle: return "circle";
    case SpaceKind::torus2: return "torus2";
    case SpaceKind::square: return "square";
    case SpaceKind::disc: return "disc";
    case SpaceKind::solid_torus: return "solid_torus";
  }
  return "unknown";
}

SpaceKind space_kind_from_string(std::string_view name) {
  for (auto k : {SpaceKind::circle, SpaceKind::torus2, SpaceKind::square, SpaceKind::disc,
                 SpaceKind::solid_torus}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown space kind: " + std::string(name));
}

Point make_point(std::initializer_list<double> coords) {
  return make_point(std::span<const double>(coords.begin(), coords.size()));
}

Point make_point(std::span<const double> coords) {
  if (coords.empty() || coords.size() > kMaxDim) {
    throw std::invalid_argument("point dimension must be 1..3");
  }
  Point p;
  p.dim = static_cast<std::uint8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), p.coords.begin());
  return p;
}

PhaseSpace::PhaseSpace(SpaceKind kind, std::size_t dim, double diameter, double radius,
                       std::optional<std::uint64_t> modulus, Box bounds)
    : kind_(kind), dim_(dim), diameter_(diameter), radius_(radius), modulus_(modulus), bounds_(bounds) {
  check_modulus(modulus_);
}

PhaseSpace PhaseSpace::circle(std::optional<std::uint64_t> modulus) {
  return {SpaceKind::circle, 1, 0.5, 0.0, modulus, unit_box(1)};
}

PhaseSpace PhaseSpace::torus2(std::optional<std::uint64_t> modulus) {
  return {SpaceKind::torus2, 2, std::sqrt(0.5), 0.0, modulus, unit_box(2)};
}

PhaseSpace PhaseSpace::square() { return {SpaceKind::square, 2, std::sqrt(2.0), 0.0, std::nullopt, unit_box(2)}; }

PhaseSpace PhaseSpace::disc(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("disc radius must be positive");
  Box b;
  b.lower = {-radius, -radius, 0.0};
  b.upper = {radius, radius, 0.0};
  return {SpaceKind::disc, 2, 2.0 * radius, radius, std::nullopt, b};
}

PhaseSpace PhaseSpace::solid_torus(double section_radius) {
  if (!(section_radius > 0.0 && section_radius < 1.0)) {
    throw std::invalid_argument("solid torus section radius must lie in (0,1)");
  }
  const double outer = 1.0 + section_radius;
  Box b;
  b.lower = {-outer, -outer, -section_radius};
  b.upper = {outer, outer, section_radius};
  return {SpaceKind::solid_torus, 3, 2.0 * outer, section_radius, std::nullopt, b};
}

bool PhaseSpace::contains(const Point& x) const {
  if (x.dim != dim_) return false;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!std::isfinite(x.coords[i])) return false;
  }
  switch (kind_) {
    case SpaceKind::circle:
    case SpaceKind::torus2:
      for (std::size_t i = 0; i < dim_; ++i) {
        if (x.coords[i] < 0.0 || x.coords[i] >= 1.0) return false;
        if (x.exact && (!modulus_ || x.residues[i] >= *modulus_)) return false;
      }
      return true;
    case SpaceKind::square:
      return x.coords[0] >= 0.0 && x.coords[0] <= 1.0 && x.coords[1] >= 0.0 && x.coords[1] <= 1.0;
    case SpaceKind::disc:
      return std::hypot(x.coords[0], x.coords[1]) <= radius_ + kContainSlack;
    case SpaceKind::solid_torus: {
      const double rho = std::hypot(x.coords[0], x.coords[1]);
      return std::hypot(rho - 1.0, x.coords[2]) <= radius_ + kContainSlack;
    }
  }
  return false;
}

Point PhaseSpace::point(std::initializer_list<double> coords) const {
  if (coords.size() != dim_) throw std::invalid_argument("point dimension does not match space");
  if (periodic()) return wrap(*this, coords);
  return make_point(coords);
}

Point PhaseSpace::exact_point(std::initializer_list<std::int64_t> numerators) const {
  return wrap_exact(*this, numerators);
}

Point PhaseSpace::to_exact(const Point& x) const {
  if (!periodic() || !modulus_) throw std::invalid_argument("exact points need a circle/torus with a modulus");
  if (x.dim != dim_) throw std::invalid_argument("point dimension does not match space");
  if (x.exact) return x;
  std::array<std::int64_t, kMaxDim> num{};
  for (std::size_t i = 0; i < dim_; ++i) {
    num[i] = static_cast<std::int64_t>(std::llround(wrap_unit(x.coords[i]) * static_cast<double>(*modulus_)));
  }
  return wrap_exact(*this, std::span<const std::int64_t>(num.data(), dim_));
}

Point PhaseSpace::to_float(const Point& x) const {
  Point p = x;
  p.exact = false;
  p.residues = {};
  return p;
}

Point wrap(const PhaseSpace& space, std::initializer_list<double> raw) {
  return wrap(space, std::span<const double>(raw.begin(), raw.size()));
}

Point wrap(const PhaseSpace& space, std::span<const double> raw) {
  if (!space.periodic()) throw std::invalid_argument("wrap requires a circle or torus");
  if (raw.size() != space.dim()) throw std::invalid_argument("point dimension does not match space");
  Point p;
  p.dim = static_cast<std::uint8_t>(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw std::invalid_argument("non-finite coordinate");
    p.coords[i] = wrap_unit(raw[i]);
  }
  return p;
}

Point wrap_exact(const PhaseSpace& space, std::initializer_list<std::int64_t> raw) {
  return wrap_exact(space, std::span<const std::int64_t>(raw.begin(), raw.size()));
}

Point wrap_exact(const PhaseSpace& space, std::span<const std::int64_t> raw) {
  if (!space.periodic() || !space.exact_modulus()) {
    throw std::invalid_argument("exact wrap requires a circle/torus with a modulus");
  }
  if (raw.size() != space.dim()) throw std::invalid_argument("point dimension does not match space");
  const std::uint64_t q = *space.exact_modulus();
  Point p;
  p.dim = static_cast<std::uint8_t>(raw.size());
  p.exact = true;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    p.residues[i] = detail::reduce_mod(raw[i], q);
    p.coords[i] = static_cast<double>(p.residues[i]) / static_cast<double>(q);
  }
  return p;
}

double distance(const PhaseSpace& space, const Point& x, const Point& y) {
  if (x.dim != space.dim() || y.dim != space.dim()) {
    throw std::invalid_argument("distance between points of different spaces");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    double d = std::fabs(x.coords[i] - y.coords[i]);
    if (space.periodic()) {
      d -= std::floor(d);
      d = std::min(d, 1.0 - d);
    }
    sum += d * d;
  }
  return std::sqrt(sum);
}

double distance_to_box(const PhaseSpace& space, const Point& x, const Box& box) {
  double sum = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const double v = x.coords[i];
    double gap;
    if (space.periodic()) {
      gap = circle_gap(v, box.lower[i], box.upper[i]);
    } else if (v < box.lower[i]) {
      gap = box.lower[i] - v;
    } else if (v > box.upper[i]) {
      gap = v - box.upper[i];
    } else {
      gap = 0.0;
    }
    sum += gap * gap;
  }
  return std::sqrt(sum);
}

Partition::Partition(PhaseSpace space, std::size_t cells_per_axis) : space_(std::move(space)), k_(cells_per_axis) {
  if (k_ == 0) throw std::invalid_argument("cells_per_axis must be positive");
  count_ = 1;
  for (std::size_t i = 0; i < space_.dim(); ++i) {
    if (count_ > std::numeric_limits<std::uint32_t>::max() / k_) {
      throw std::invalid_argument("partition too fine");
    }
    count_ *= k_;
  }
}

std::size_t Partition::cell_index(const Point& x) const {
  const Box& b = space_.bounds();
  const auto q = space_.exact_modulus();
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < space_.dim(); ++i) {
    std::size_t c;
    if (x.exact && q) {
      c = static_cast<std::size_t>((static_cast<u128>(x.residues[i]) * k_) / *q);
    } else {
      double v = x.coords[i];
      if (space_.periodic()) v = wrap_unit(v);
      const double t = (v - b.lower[i]) / (b.upper[i] - b.lower[i]) * static_cast<double>(k_);
      if (!(t > 0.0)) {
        c = 0;
      } else {
        c = static_cast<std::size_t>(std::floor(t));
      }
    }
    c = std::min(c, k_ - 1);
    index += c * stride;
    stride *= k_;
  }
  return index;
}

std::array<std::size_t, kMaxDim> Partition::cell_coords(std::size_t index) const {
  if (index >= count_) throw std::out_of_range("cell index out of range");
  std::array<std::size_t, kMaxDim> c{};
  for (std::size_t i = 0; i < space_.dim(); ++i) {
    c[i] = index % k_;
    index /= k_;
  }
  return c;
}

Box Partition::cell_box(std::size_t index) const {
  const auto c = cell_coords(index);
  const Box& b = space_.bounds();
  Box box;
  for (std::size_t i = 0; i < space_.dim(); ++i) {
    const double side = (b.upper[i] - b.lower[i]) / static_cast<double>(k_);
    box.lower[i] = b.lower[i] + side * static_cast<double>(c[i]);
    box.upper[i] = b.lower[i] + side * static_cast<double>(c[i] + 1);
  }
  return box;
}

Point Partition::cell_center(std::size_t index) const {
  const Box box = cell_box(index);
  Point p;
  p.dim = static_cast<std::uint8_t>(space_.dim());
  for (std::size_t i = 0; i < space_.dim(); ++i) p.coords[i] = 0.5 * (box.lower[i] + box.upper[i]);
  return p;
}

double Partition::cell_side(std::size_t axis) const {
  const Box& b = space_.bounds();
  return (b.upper[axis] - b.lower[axis]) / static_cast<double>(k_);
}

double Partition::cell_diameter() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < space_.dim(); ++i) sum += cell_side(i) * cell_side(i);
  return std::sqrt(sum);
}

GridSet::GridSet(Partition partition) : partition_(std::move(partition)), member_(partition_.cell_count(), false) {}

GridSet::GridSet(Partition partition, std::span<const std::size_t> cells) : GridSet(std::move(partition)) {
  for (auto c : cells) insert(c);
}

GridSet GridSet::all(Partition partition) {
  GridSet g(std::move(partition));
  std::fill(g.member_.begin(), g.member_.end(), true);
  g.members_.resize(g.member_.size());
  std::iota(g.members_.begin(), g.members_.end(), std::size_t{0});
  return g;
}

void GridSet::insert(std::size_t cell) {
  if (cell >= member_.size()) throw std::out_of_range("cell index out of range");
  if (!member_[cell]) {
    member_[cell] = true;
    members_.insert(std::lower_bound(members_.begin(), members_.end(), cell), cell);
  }
}

void GridSet::erase(std::size_t cell) {
  if (cell >= member_.size()) throw std::out_of_range("cell index out of range");
  if (member_[cell]) {
    member_[cell] = false;
    members_.erase(std::lower_bound(members_.begin(), members_.end(), cell));
  }
}

double GridSet::distance(const Point& x) const {
  if (members_.empty()) throw std::logic_error("distance to an empty grid set");
  if (member_[partition_.cell_index(x)]) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : members_) {
    best = std::min(best, distance_to_box(partition_.space(), x, partition_.cell_box(i)));
    if (best == 0.0) break;
  }
  return best;
}

std::vector<Point> grid_samples_in_box(const PhaseSpace& space, const Box& box, std::size_t per_axis, bool exact) {
  if (per_axis == 0) throw std::invalid_argument("per_axis must be positive");
  std::size_t total = 1;
  for (std::size_t i = 0; i < space.dim(); ++i) total *= per_axis;
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p;
    p.dim = static_cast<std::uint8_t>(space.dim());
    std::size_t rest = idx;
    for (std::size_t i = 0; i < space.dim(); ++i) {
      const std::size_t c = rest % per_axis;
      rest /= per_axis;
      const double t = (static_cast<double>(c) + 0.5) / static_cast<double>(per_axis);
      p.coords[i] = box.lower[i] + t * (box.upper[i] - box.lower[i]);
    }
    if (!space.contains(p)) continue;
    out.push_back(exact ? space.to_exact(p) : p);
  }
  return out;
}

std::vector<Point> grid_samples(const PhaseSpace& space, std::size_t per_axis, bool exact) {
  return grid_samples_in_box(space, space.bounds(), per_axis, exact);
}

}  // namespace ergolab
