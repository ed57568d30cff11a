#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/phase_space.hpp"

namespace ergolab {

/// Derivative matrix of a map at a point; at most 3x3, stored inline.
using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, static_cast<int>(kMaxDim),
                               static_cast<int>(kMaxDim)>;

using Params = std::map<std::string, double, std::less<>>;

/// Known closed-form facts about a built-in system, used by --check and the
/// acceptance suite. Empty exponent list means "no closed form".
struct GroundTruth {
  std::vector<double> lyapunov_exponents;
  std::string invariant_measure;
  std::string attractor;
};

/// The map itself. Implementations are immutable; `forward` returns nullopt
/// when the image leaves the phase space (horseshoe escape).
class MapRule {
 public:
  virtual ~MapRule() = default;

  virtual std::optional<Point> forward(const Point& x) const = 0;
  virtual std::optional<Point> inverse(const Point&) const { return std::nullopt; }
  virtual std::optional<Jacobian> jacobian(const Point&) const { return std::nullopt; }
  /// Index of the monotone/affine branch containing x (1D maps and the horseshoe).
  virtual std::optional<long> branch(const Point&) const { return std::nullopt; }

  virtual bool has_inverse() const { return false; }
  virtual bool has_jacobian() const { return false; }
  virtual bool supports_exact() const { return false; }
};

class System {
 public:
  System(std::string name, Params params, PhaseSpace space, std::shared_ptr<const MapRule> rule,
         GroundTruth truth);

  const std::string& name() const { return name_; }
  const Params& params() const { return params_; }
  const PhaseSpace& space() const { return space_; }
  std::size_t dim() const { return space_.dim(); }
  const GroundTruth& ground_truth() const { return truth_; }
  /// True when the system was built with exact=1; starting points should then be exact.
  bool exact_mode() const { return space_.exact_modulus().has_value(); }

  std::optional<Point> forward(const Point& x) const;
  std::optional<Point> inverse(const Point& x) const;
  std::optional<Jacobian> jacobian(const Point& x) const { return rule_->jacobian(x); }
  std::optional<long> branch(const Point& x) const { return rule_->branch(x); }

  bool has_inverse() const { return rule_->has_inverse(); }
  bool has_jacobian() const { return rule_->has_jacobian(); }
  bool supports_exact() const { return rule_->supports_exact(); }

  /// Starting point in the system's preferred representation (exact when exact_mode()).
  Point start_point(std::initializer_list<double> coords) const;

 private:
  std::string name_;
  Params params_;
  PhaseSpace space_;
  std::shared_ptr<const MapRule> rule_;
  GroundTruth truth_;
};

struct ParamInfo {
  std::string name;
  double default_value;
  std::string description;
};

struct SystemInfo {
  std::string name;
  std::string space;
  std::string description;
  std::vector<ParamInfo> params;
};

/// Build a registered system. Every system accepts `exact` (0/1) and `q`
/// where exact arithmetic is supported. Throws std::invalid_argument for
/// unknown names, unknown parameters, or parameters outside their range.
System make_system(std::string_view name, const Params& params = {});

std::vector<SystemInfo> system_catalog();

/// f^n(x); nullopt if the orbit escapes the phase space before step n.
std::optional<Point> iterate(const System& system, Point x, std::size_t n);
/// f^{-n}(x); throws std::invalid_argument if the system has no inverse.
std::optional<Point> iterate_inverse(const System& system, Point x, std::size_t n);

struct OrbitSegment {
  Point start;
  std::vector<Point> points;  // f^0 x, ..., f^{m-1} x with m <= n
  /// Set when f^m(x) left the space; equals points.size().
  std::optional<std::size_t> escaped_at;
};

OrbitSegment orbit(const System& system, const Point& x, std::size_t n);

/// Calls visit(j, f^j x) for j = 0..n-1 without storing the orbit. Returns the
/// number of points visited (less than n only if the orbit escaped).
template <class Visitor>
std::size_t visit_orbit(const System& system, Point x, std::size_t n, Visitor&& visit) {
  for (std::size_t j = 0; j < n; ++j) {
    visit(j, static_cast<const Point&>(x));
    if (j + 1 == n) return n;
    auto next = system.forward(x);
    if (!next) return j + 1;
    x = *next;
  }
  return n;
}

/// Point of the n-cylinder of the linear horseshoe with itinerary `code`
/// (characters '0'/'1'): f^j(p) lies in the horizontal strip T^{-1}(Q_{code[j]})
/// for j < n, so p survives n iterates; the x-coordinate follows the same word
/// backwards, so p lies in Q_{code[0]}. Returns the centre of the cylinder rectangle.
Point horseshoe_cylinder_point(std::string_view code);

}  // namespace ergolab
