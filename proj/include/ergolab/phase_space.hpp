#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ergolab {

inline constexpr std::size_t kMaxDim = 3;

/// Default modulus for exact-mode circle/torus arithmetic (the Mersenne prime 2^31 - 1).
inline constexpr std::uint64_t kDefaultModulus = 2147483647ULL;

enum class SpaceKind { circle, torus2, square, disc, solid_torus };

std::string_view to_string(SpaceKind kind);
SpaceKind space_kind_from_string(std::string_view name);

/// A point of a phase space.
///
/// Float points store their coordinates in `coords`. Exact points additionally
/// store numerators `residues` of the rationals residue/q for the space's
/// modulus q; `coords` then caches residue/q so that every float consumer
/// (test functions, metrics, partitions) works on both kinds unchanged.
struct Point {
  std::array<double, kMaxDim> coords{};
  std::array<std::uint64_t, kMaxDim> residues{};
  std::uint8_t dim = 0;
  bool exact = false;

  double operator[](std::size_t i) const { return coords[i]; }
  std::span<const double> values() const { return {coords.data(), dim}; }

  friend bool operator==(const Point&, const Point&) = default;
};

/// Float point from raw coordinates (no wrapping).
Point make_point(std::initializer_list<double> coords);
Point make_point(std::span<const double> coords);

struct Box {
  std::array<double, kMaxDim> lower{};
  std::array<double, kMaxDim> upper{};

  bool operator==(const Box&) const = default;
};

class PhaseSpace {
 public:
  static PhaseSpace circle(std::optional<std::uint64_t> modulus = std::nullopt);
  static PhaseSpace torus2(std::optional<std::uint64_t> modulus = std::nullopt);
  static PhaseSpace square();
  static PhaseSpace disc(double radius = 1.5);
  /// Solid torus of core radius 1 and section radius `section_radius` in R^3.
  static PhaseSpace solid_torus(double section_radius = 0.3);

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double diameter() const { return diameter_; }
  /// Disc radius or solid-torus section radius; 0 for the other kinds.
  double radius() const { return radius_; }
  std::optional<std::uint64_t> exact_modulus() const { return modulus_; }
  bool periodic() const { return kind_ == SpaceKind::circle || kind_ == SpaceKind::torus2; }
  /// Axis-aligned bounding box; for periodic spaces the fundamental domain [0,1)^d.
  const Box& bounds() const { return bounds_; }

  bool contains(const Point& x) const;

  /// Float point; periodic coordinates are reduced mod 1.
  Point point(std::initializer_list<double> coords) const;
  /// Exact point from integer numerators, reduced mod q. Requires an exact modulus.
  Point exact_point(std::initializer_list<std::int64_t> numerators) const;
  /// Nearest exact point (numerator round(x*q) mod q).
  Point to_exact(const Point& x) const;
  Point to_float(const Point& x) const;

  friend bool operator==(const PhaseSpace&, const PhaseSpace&) = default;

 private:
  PhaseSpace(SpaceKind kind, std::size_t dim, double diameter, double radius,
             std::optional<std::uint64_t> modulus, Box bounds);

  SpaceKind kind_;
  std::size_t dim_;
  double diameter_;
  double radius_;
  std::optional<std::uint64_t> modulus_;
  Box bounds_;
};

/// Reduce raw coordinates into the fundamental domain [0,1)^d of a circle/torus.
/// Throws std::invalid_argument for non-periodic spaces or non-finite input.
Point wrap(const PhaseSpace& space, std::span<const double> raw);
Point wrap(const PhaseSpace& space, std::initializer_list<double> raw);
/// Exact counterpart: reduce integer numerators mod q.
Point wrap_exact(const PhaseSpace& space, std::span<const std::int64_t> raw);
Point wrap_exact(const PhaseSpace& space, std::initializer_list<std::int64_t> raw);

/// Quotient metric on circle/torus, Euclidean otherwise (ambient R^3 for the
/// solid torus). Throws std::invalid_argument when dimensions disagree.
double distance(const PhaseSpace& space, const Point& x, const Point& y);

/// Distance from a point to an axis-aligned box under the space's metric.
double distance_to_box(const PhaseSpace& space, const Point& x, const Box& box);

/// Uniform grid of k cells per axis over the space's bounding box.
class Partition {
 public:
  Partition(PhaseSpace space, std::size_t cells_per_axis);

  const PhaseSpace& space() const { return space_; }
  std::size_t cells_per_axis() const { return k_; }
  std::size_t cell_count() const { return count_; }

  /// Lower-closed, upper-open cells, x-axis fastest (row-major with y as row).
  std::size_t cell_index(const Point& x) const;
  std::array<std::size_t, kMaxDim> cell_coords(std::size_t index) const;
  Box cell_box(std::size_t index) const;
  Point cell_center(std::size_t index) const;
  double cell_side(std::size_t axis) const;
  double cell_diameter() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  PhaseSpace space_;
  std::size_t k_;
  std::size_t count_;
};

/// A set of cells of one partition.
class GridSet {
 public:
  explicit GridSet(Partition partition);
  GridSet(Partition partition, std::span<const std::size_t> cells);

  static GridSet all(Partition partition);

  const Partition& partition() const { return partition_; }
  bool contains_cell(std::size_t cell) const { return member_[cell]; }
  bool contains(const Point& x) const { return member_[partition_.cell_index(x)]; }
  void insert(std::size_t cell);
  void erase(std::size_t cell);
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  /// Sorted cell indices.
  const std::vector<std::size_t>& cells() const { return members_; }

  /// Distance from x to the union of the cells' closures.
  double distance(const Point& x) const;

  friend bool operator==(const GridSet& a, const GridSet& b) {
    return a.partition_ == b.partition_ && a.member_ == b.member_;
  }

 private:
  Partition partition_;
  std::vector<bool> member_;
  std::vector<std::size_t> members_;
};

/// Cell-centred grid of `per_axis` points per axis restricted to the space
/// (disc and solid torus drop box points outside the body). With `exact` the
/// points are converted to exact residues; the space must carry a modulus.
std::vector<Point> grid_samples(const PhaseSpace& space, std::size_t per_axis, bool exact = false);

/// Cell-centred grid of `per_axis` points per axis inside one box.
std::vector<Point> grid_samples_in_box(const PhaseSpace& space, const Box& box, std::size_t per_axis,
                                       bool exact = false);

namespace detail {
inline std::uint64_t reduce_mod(std::int64_t v, std::uint64_t q) {
  const auto m = static_cast<std::int64_t>(q);
  std::int64_t r = v % m;
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}
}  // namespace detail

}  // namespace ergolab
