#include "ergolab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace ergolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r = 0.0;
  return r;
}

Point float_point(std::initializer_list<double> coords) { return make_point(coords); }

Point exact_from_residues(std::span<const std::int64_t> raw, std::uint64_t q) {
  Point p;
  p.dim = static_cast<std::uint8_t>(raw.size());
  p.exact = true;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    p.residues[i] = detail::reduce_mod(raw[i], q);
    p.coords[i] = static_cast<double>(p.residues[i]) / static_cast<double>(q);
  }
  return p;
}

Jacobian scalar_jacobian(double d) {
  Jacobian j(1, 1);
  j(0, 0) = d;
  return j;
}

// ---------------------------------------------------------------- circle maps

class Rotation final : public MapRule {
 public:
  Rotation(double alpha, std::optional<std::uint64_t> q) : alpha_(alpha), q_(q) {
    if (q_) step_ = static_cast<std::int64_t>(std::llround(alpha_ * static_cast<double>(*q_)));
  }
  std::optional<Point> forward(const Point& x) const override {
    if (x.exact) {
      const std::int64_t r = static_cast<std::int64_t>(x.residues[0]) + step_;
      return exact_from_residues(std::span(&r, 1), *q_);
    }
    return float_point({wrap_unit(x[0] + alpha_)});
  }
  std::optional<Point> inverse(const Point& x) const override {
    if (x.exact) {
      const std::int64_t r = static_cast<std::int64_t>(x.residues[0]) - step_;
      return exact_from_residues(std::span(&r, 1), *q_);
    }
    return float_point({wrap_unit(x[0] - alpha_)});
  }
  std::optional<Jacobian> jacobian(const Point&) const override { return scalar_jacobian(1.0); }
  std::optional<long> branch(const Point& x) const override { return x[0] + alpha_ >= 1.0 ? 1 : 0; }
  bool has_inverse() const override { return true; }
  bool has_jacobian() const override { return true; }
  bool supports_exact() const override { return true; }

 private:
  double alpha_;
  std::optional<std::uint64_t> q_;
  std::int64_t step_ = 0;
};

class Tent final : public MapRule {
 public:
  explicit Tent(std::optional<std::uint64_t> q) : q_(q) {}
  std::optional<Point> forward(const Point& x) const override {
    if (x.exact) {
      const auto q = static_cast<std::int64_t>(*q_);
      const auto r = static_cast<std::int64_t>(x.residues[0]);
      // r/q <= 1/2  <=>  2r <= q
      const std::int64_t next = 2 * r <= q ? 2 * r : 2 * q - 2 * r;
      return exact_from_residues(std::span(&next, 1), *q_);
    }
    const double v = x[0] <= 0.5 ? 2.0 * x[0] : 2.0 - 2.0 * x[0];
    return float_point({wrap_unit(v)});
  }
  // One-sided derivative at the break point 1/2 (lower-closed convention).
  std::optional<Jacobian> jacobian(const Point& x) const override {
    return scalar_jacobian(x[0] < 0.5 ? 2.0 : -2.0);
  }
  std::optional<long> branch(const Point& x) const override { return x[0] < 0.5 ? 0 : 1; }
  bool has_jacobian() const override { return true; }
  bool supports_exact() const override { return true; }

 private:
  std::optional<std::uint64_t> q_;
};

class Expanding final : public MapRule {
 public:
  Expanding(long k, double eps, std::optional<std::uint64_t> q) : k_(k), eps_(eps), q_(q) {}
  double lift(double x) const { return static_cast<double>(k_) * x + eps_ * std::sin(kTwoPi * x) / kTwoPi; }
  std::optional<Point> forward(const Point& x) const override {
    if (x.exact) {
      const auto r = static_cast<std::int64_t>(x.residues[0]) * k_;
      return exact_from_residues(std::span(&r, 1), *q_);
    }
    return float_point({wrap_unit(lift(x[0]))});
  }
  std::optional<Jacobian> jacobian(const Point& x) const override {
    return scalar_jacobian(static_cast<double>(k_) + eps_ * std::cos(kTwoPi * x[0]));
  }
  std::optional<long> branch(const Point& x) const override {
    return std::min<long>(static_cast<long>(std::floor(lift(x[0]))), k_ - 1);
  }
  bool has_jacobian() const override { return true; }
  bool supports_exact() const override { return eps_ == 0.0; }

 private:
  long k_;
  double eps_;
  std::optional<std::uint64_t> q_;
};

class NorthSouth final : public MapRule {
 public:
  explicit NorthSouth(double beta) : beta_(beta) {}
  double lift(double x) const { return x + beta_ * std::sin(kTwoPi * x) / kTwoPi; }
  std::optional<Point> forward(const Point& x) const override { return float_point({wrap_unit(lift(x[0]))}); }
  std::optional<Point> inverse(const Point& x) const override {
    // The lift is increasing with lift(y) - y bounded by beta/(2pi): Newton
    // inside a bracketing interval, falling back to bisection.
    const double target = x[0];
    double lo = target - beta_ / kTwoPi - 1e-12;
    double hi = target + beta_ / kTwoPi + 1e-12;
    double y = target;
    for (int it = 0; it < 100; ++it) {
      const double f = lift(y) - target;
      if (f == 0.0) break;
      if (f > 0.0) hi = y; else lo = y;
      const double d = 1.0 + beta_ * std::cos(kTwoPi * y);
      double next = y - f / d;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::fabs(next - y) <= 1e-17) {
        y = next;
        break;
      }
      y = next;
    }
    return float_point({wrap_unit(y)});
  }
  std::optional<Jacobian> jacobian(const Point& x) const override {
    return scalar_jacobian(1.0 + beta_ * std::cos(kTwoPi * x[0]));
  }
  std::optional<long> branch(const Point&) const override { return 0; }
  bool has_inverse() const override { return true; }
  bool has_jacobian() const override { return true; }

 private:
  double beta_;
};

// ---------------------------------------------------------------- torus maps

class LinearTorus final : public MapRule {
 public:
  LinearTorus(std::array<long, 4> a, std::optional<std::uint64_t> q) : a_(a), q_(q) {
    det_ = a_[0] * a_[3] - a_[1] * a_[2];
    inv_ = {det_ * a_[3], -det_ * a_[1], -det_ * a_[2], det_ * a_[0]};  // det = +-1 so 1/det = det
  }
  std::optional<Point> forward(const Point& x) const override { return apply(a_, x); }
  std::optional<Point> inverse(const Point& x) const override { return apply(inv_, x); }
  std::optional<Jacobian> jacobian(const Point&) const override {
    Jacobian j(2, 2);
    j << static_cast<double>(a_[0]), static_cast<double>(a_[1]), static_cast<double>(a_[2]),
        static_cast<double>(a_[3]);
    return j;
  }
  bool has_inverse() const override { return true; }
  bool has_jacobian() const override { return true; }
  bool supports_exact() const override { return true; }

 private:
  std::optional<Point> apply(const std::array<long, 4>& m, const Point& x) const {
    if (x.exact) {
      const auto r0 = static_cast<std::int64_t>(x.residues[0]);
      const auto r1 = static_cast<std::int64_t>(x.residues[1]);
      const std::array<std::int64_t, 2> raw{m[0] * r0 + m[1] * r1, m[2] * r0 + m[3] * r1};
      return exact_from_residues(raw, *q_);
    }
    return float_point({wrap_unit(static_cast<double>(m[0]) * x[0] + static_cast<double>(m[1]) * x[1]),
                        wrap_unit(static_cast<double>(m[2]) * x[0] + static_cast<double>(m[3]) * x[1])});
  }

  std::array<long, 4> a_;
  std::array<long, 4> inv_;
  long det_;
  std::optional<std::uint64_t> q_;
};

class Identity final : public MapRule {
 public:
  explicit Identity(std::size_t dim) : dim_(dim) {}
  std::optional<Point> forward(const Point& x) const override { return x; }
  std::optional<Point> inverse(const Point& x) const override { return x; }
  std::optional<Jacobian> jacobian(const Point&) const override {
    return Jacobian::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  }
  std::optional<long> branch(const Point&) const override { return 0; }
  bool has_inverse() const override { return true; }
  bool has_jacobian() const override { return true; }
  bool supports_exact() const override { return true; }

 private:
  std::size_t dim_;
};

// ---------------------------------------------------------------- horseshoe

bool in_closed(double v, double lo, double hi) { return v >= lo && v <= hi; }

class Horseshoe final : public MapRule {
 public:
  std::optional<Point> forward(const Point& p) const override {
    const double x = p[0];
    const double y = p[1];
    if (!in_closed(x, 0.0, 1.0)) return std::nullopt;
    if (in_closed(y, 0.2, 0.4)) return float_point({(x + 1.0) / 5.0, 5.0 * y - 1.0});
    if (in_closed(y, 0.6, 0.8)) return float_point({-(x - 4.0) / 5.0, -5.0 * y + 4.0});
    return std::nullopt;
  }
  std::optional<Point> inverse(const Point& p) const override {
    const double x = p[0];
    const double y = p[1];
    if (!in_closed(y, 0.0, 1.0)) return std::nullopt;
    if (in_closed(x, 0.2, 0.4)) return float_point({5.0 * x - 1.0, (y + 1.0) / 5.0});
    if (in_closed(x, 0.6, 0.8)) return float_point({4.0 - 5.0 * x, (4.0 - y) / 5.0});
    return std::nullopt;
  }
  std::optional<Jacobian> jacobian(const Point& p) const override {
    const auto b = branch(p);
    if (!b) return std::nullopt;
    const double s = *b == 0 ? 1.0 : -1.0;
    Jacobian j(2, 2);
    j << s / 5.0, 0.0, 0.0, s * 5.0;
    return j;
  }
  std::optional<long> branch(const Point& p) const override {
    if (!in_closed(p[0], 0.0, 1.0)) return std::nullopt;
    if (in_closed(p[1], 0.2, 0.4)) return 0;
    if (in_closed(p[1], 0.6, 0.8)) return 1;
    return std::nullopt;
  }
  bool has_inverse() const override { return true; }
  bool has_jacobian() const override { return true; }
};

// ---------------------------------------------------------------- disc maps

enum class DiscVariant { a, b, rotation };

class DiscMap final : public MapRule {
 public:
  DiscMap(DiscVariant variant, double radius, double angle) : variant_(variant), radius_(radius), angle_(angle) {}

  std::optional<Point> forward(const Point& p) const override {
    const double rho = std::hypot(p[0], p[1]);
    if (rho == 0.0) return float_point({0.0, 0.0});
    const double phi = angle_of(p);
    const double rho_next = rho * (4.0 - rho) / 3.0;
    double phi_next = 0.0;
    switch (variant_) {
      case DiscVariant::a: phi_next = phi + (rho - 1.0); break;
      case DiscVariant::rotation: phi_next = phi + angle_; break;
      case DiscVariant::b: {
        // phi(2 - phi/2pi) written around the attracting end 2pi for accuracy.
        const double gap = kTwoPi - phi;
        phi_next = kTwoPi - gap * gap / kTwoPi;
        break;
      }
    }
    return polar(rho_next, phi_next);
  }

  std::optional<Point> inverse(const Point& p) const override {
    const double rho_next = std::hypot(p[0], p[1]);
    if (rho_next == 0.0) return float_point({0.0, 0.0});
    if (rho_next > 4.0 / 3.0) return std::nullopt;
    const double rho = 2.0 - std::sqrt(4.0 - 3.0 * rho_next);
    if (rho > radius_) return std::nullopt;
    const double phi_next = angle_of(p);
    double phi = 0.0;
    switch (variant_) {
      case DiscVariant::a: phi = phi_next - (rho - 1.0); break;
      case DiscVariant::rotation: phi = phi_next - angle_; break;
      case DiscVariant::b: phi = kTwoPi - std::sqrt(kTwoPi * (kTwoPi - phi_next)); break;
    }
    return polar(rho, phi);
  }

  std::optional<Jacobian> jacobian(const Point& p) const override {
    const double rho = std::hypot(p[0], p[1]);
    if (rho == 0.0) {
      // Near the origin the map is (4/3) times a rotation, except for B whose
      // angle doubling has no derivative there.
      if (variant_ == DiscVariant::b) return std::nullopt;
      const double turn = variant_ == DiscVariant::a ? -1.0 : angle_;
      Jacobian j(2, 2);
      j << std::cos(turn), -std::sin(turn), std::sin(turn), std::cos(turn);
      return Jacobian((4.0 / 3.0) * j);
    }
    const double phi = angle_of(p);
    Eigen::Matrix2d to_polar;
    to_polar << p[0] / rho, p[1] / rho, -p[1] / (rho * rho), p[0] / (rho * rho);
    Eigen::Matrix2d step;
    const double drho = (4.0 - 2.0 * rho) / 3.0;
    switch (variant_) {
      case DiscVariant::a: step << drho, 0.0, 1.0, 1.0; break;
      case DiscVariant::rotation: step << drho, 0.0, 0.0, 1.0; break;
      case DiscVariant::b: step << drho, 0.0, 0.0, 2.0 - phi / std::numbers::pi; break;
    }
    const Point image = *forward(p);
    const double rho_next = rho * (4.0 - rho) / 3.0;
    const double phi_next = angle_of(image);
    Eigen::Matrix2d to_cart;
    to_cart << std::cos(phi_next), -rho_next * std::sin(phi_next), std::sin(phi_next), rho_next * std::cos(phi_next);
    return Jacobian(to_cart * step * to_polar);
  }

  bool has_inverse() const override { return true; }
  bool has_jacobian() const override { return true; }

 private:
  static double angle_of(const Point& p) {
    double phi = std::atan2(p[1], p[0]);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    return phi;
  }
  static Point polar(double rho, double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    return float_point({rho * std::cos(phi), rho * std::sin(phi)});
  }

  DiscVariant variant_;
  double radius_;
  double angle_;
};

// ---------------------------------------------------------------- solenoid

/// Points are ambient ((1+u) cos phi, (1+u) sin phi, v) with section
/// coordinates |(u,v)| <= a. The map doubles phi, shrinks the section disc by
/// 1/4 around the section point at radius a/2, and turns it by phi.
class Solenoid final : public MapRule {
 public:
  explicit Solenoid(double a) : a_(a) {}
  std::optional<Point> forward(const Point& p) const override {
    double phi = std::atan2(p[1], p[0]);
    if (phi < 0.0) phi += kTwoPi;
    const double u = std::hypot(p[0], p[1]) - 1.0;
    const double v = p[2];
    const double c0 = 0.5 * a_ + 0.25 * u;
    const double c1 = 0.25 * v;
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    const double u_next = cs * c0 - sn * c1;
    const double v_next = sn * c0 + cs * c1;
    const double phi_next = 2.0 * phi;
    return float_point({(1.0 + u_next) * std::cos(phi_next), (1.0 + u_next) * std::sin(phi_next), v_next});
  }

  std::optional<Jacobian> jacobian(const Point& p) const override {
    const double r = std::hypot(p[0], p[1]);
    if (r == 0.0) return std::nullopt;
    double phi = std::atan2(p[1], p[0]);
    if (phi < 0.0) phi += kTwoPi;
    const double u = r - 1.0;
    const double v = p[2];
    const double c0 = 0.5 * a_ + 0.25 * u;
    const double c1 = 0.25 * v;
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    const double u_next = cs * c0 - sn * c1;
    const double v_next = sn * c0 + cs * c1;
    const double phi_next = 2.0 * phi;
    // Cartesian -> (phi, u, v) -> image (phi', u', v') -> Cartesian.
    Eigen::Matrix3d to_cyl;
    to_cyl << -p[1] / (r * r), p[0] / (r * r), 0.0, p[0] / r, p[1] / r, 0.0, 0.0, 0.0, 1.0;
    Eigen::Matrix3d step;
    step << 2.0, 0.0, 0.0, -v_next, 0.25 * cs, -0.25 * sn, u_next, 0.25 * sn, 0.25 * cs;
    Eigen::Matrix3d to_cart;
    to_cart << -(1.0 + u_next) * std::sin(phi_next), std::cos(phi_next), 0.0, (1.0 + u_next) * std::cos(phi_next),
        std::sin(phi_next), 0.0, 0.0, 0.0, 1.0;
    return Jacobian(to_cart * step * to_cyl);
  }
  bool has_jacobian() const override { return true; }

 private:
  double a_;
};

// ---------------------------------------------------------------- registry

double golden_alpha() { return (std::sqrt(5.0) - 1.0) / 2.0; }

struct Entry {
  std::string name;
  std::string space;
  std::string description;
  std::vector<ParamInfo> params;
  bool exact_capable;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"rotation", "circle", "x -> x + alpha mod 1",
       {{"alpha", golden_alpha(), "rotation number in [0,1)"}}, true},
      {"tent", "circle", "T(x) = 2x on [0,1/2], 2-2x on [1/2,1]", {}, true},
      {"expanding_k", "circle", "x -> kx + eps sin(2 pi x)/(2 pi) mod 1",
       {{"k", 2.0, "integer degree >= 2"}, {"eps", 0.0, "nonlinearity, 0 <= eps < k-1"}}, true},
      {"cat_map", "torus2", "hyperbolic automorphism (2 1; 1 1) of the 2-torus", {}, true},
      {"linear_torus", "torus2", "hyperbolic integer matrix (a11 a12; a21 a22) on the 2-torus",
       {{"a11", 2.0, "integer entry"},
        {"a12", 1.0, "integer entry"},
        {"a21", 1.0, "integer entry"},
        {"a22", 1.0, "integer entry"}},
       true},
      {"horseshoe", "square", "linear Smale horseshoe with rates 1/5 and 5 on [0,1]^2", {}, false},
      {"north_south", "circle", "x -> x + beta sin(2 pi x)/(2 pi); N = 0 repeller, S = 1/2 attractor",
       {{"beta", 0.5, "0 < beta < 1"}}, false},
      {"disc_A", "disc", "polar map rho* = rho(4-rho)/3, phi* = phi + (rho-1)",
       {{"radius", 1.5, "disc radius, 1 < r < 2"}}, false},
      {"disc_B", "disc", "polar map rho* = rho(4-rho)/3, phi* = phi(2 - phi/2pi)",
       {{"radius", 1.5, "disc radius, 1 < r < 2"}}, false},
      {"disc_rot", "disc", "polar map rho* = rho(4-rho)/3, phi* = phi + a",
       {{"radius", 1.5, "disc radius, 1 < r < 2"}, {"a", 2.0 * std::numbers::pi * golden_alpha(), "0 <= a < 2 pi"}},
       false},
      {"solenoid", "solid_torus", "Smale-Williams solenoid map (phi doubling, section contraction 1/4)",
       {{"a", 0.3, "section radius, 0 < a < 1/2"}}, false},
      {"identity", "circle|torus2", "identity map", {{"dim", 1.0, "1 (circle) or 2 (torus)"}}, true},
  };
  return entries;
}

const Entry& find_entry(std::string_view name) {
  for (const auto& e : registry()) {
    if (e.name == name) return e;
  }
  throw std::invalid_argument("unknown system: " + std::string(name));
}

double integer_param(const Params& p, const std::string& key) {
  const double v = p.at(key);
  if (std::floor(v) != v) throw std::invalid_argument("parameter " + key + " must be an integer");
  return v;
}

std::vector<double> linear_exponents(const std::array<long, 4>& a) {
  const double tr = static_cast<double>(a[0] + a[3]);
  const double det = static_cast<double>(a[0] * a[3] - a[1] * a[2]);
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  std::vector<double> e{std::log(std::fabs((tr + disc) / 2.0)), std::log(std::fabs((tr - disc) / 2.0))};
  std::sort(e.begin(), e.end(), std::greater<>());
  return e;
}

}  // namespace

System::System(std::string name, Params params, PhaseSpace space, std::shared_ptr<const MapRule> rule,
               GroundTruth truth)
    : name_(std::move(name)),
      params_(std::move(params)),
      space_(std::move(space)),
      rule_(std::move(rule)),
      truth_(std::move(truth)) {}

std::optional<Point> System::forward(const Point& x) const {
  if (x.exact && !(exact_mode() && supports_exact())) {
    throw std::invalid_argument("exact point passed to a system without exact arithmetic");
  }
  return rule_->forward(x);
}

std::optional<Point> System::inverse(const Point& x) const {
  if (!has_inverse()) throw std::invalid_argument("system " + name_ + " has no inverse");
  if (x.exact && !(exact_mode() && supports_exact())) {
    throw std::invalid_argument("exact point passed to a system without exact arithmetic");
  }
  return rule_->inverse(x);
}

Point System::start_point(std::initializer_list<double> coords) const {
  Point p = space_.point(coords);
  return exact_mode() ? space_.to_exact(p) : p;
}

System make_system(std::string_view name, const Params& user) {
  const Entry& entry = find_entry(name);

  Params p;
  for (const auto& info : entry.params) p[info.name] = info.default_value;
  p["exact"] = 0.0;
  p["q"] = static_cast<double>(kDefaultModulus);
  for (const auto& [key, value] : user) {
    if (!p.contains(key)) throw std::invalid_argument("unknown parameter '" + key + "' for system " + entry.name);
    if (!std::isfinite(value)) throw std::invalid_argument("parameter " + key + " must be finite");
    p[key] = value;
  }

  const bool exact = p.at("exact") != 0.0;
  if (exact && !entry.exact_capable) {
    throw std::invalid_argument("system " + entry.name + " does not support exact mode");
  }
  std::optional<std::uint64_t> q;
  if (exact) q = static_cast<std::uint64_t>(integer_param(p, "q"));
  if (!exact) {
    p.erase("exact");
    p.erase("q");
  }

  std::shared_ptr<const MapRule> rule;
  GroundTruth truth;
  std::optional<PhaseSpace> space;
  const std::string n(name);

  if (n == "rotation") {
    const double alpha = p.at("alpha");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("rotation alpha must lie in [0,1)");
    space = PhaseSpace::circle(q);
    rule = std::make_shared<Rotation>(alpha, q);
    truth = {{0.0}, "Lebesgue (uniquely ergodic for irrational alpha)", "whole circle"};
  } else if (n == "tent") {
    space = PhaseSpace::circle(q);
    rule = std::make_shared<Tent>(q);
    truth = {{std::log(2.0)}, "Lebesgue (mixing)", "whole interval"};
  } else if (n == "expanding_k") {
    const long k = static_cast<long>(integer_param(p, "k"));
    const double eps = p.at("eps");
    if (k < 2) throw std::invalid_argument("expanding_k needs k >= 2");
    if (!(eps >= 0.0 && eps < static_cast<double>(k - 1))) {
      throw std::invalid_argument("expanding_k needs 0 <= eps < k-1");
    }
    if (exact && eps != 0.0) throw std::invalid_argument("exact mode requires eps = 0");
    space = PhaseSpace::circle(q);
    rule = std::make_shared<Expanding>(k, eps, q);
    if (eps == 0.0) {
      truth = {{std::log(static_cast<double>(k))}, "Lebesgue", "whole circle"};
    } else {
      truth = {{}, "unique absolutely continuous SRB measure", "whole circle"};
    }
  } else if (n == "cat_map" || n == "linear_torus") {
    std::array<long, 4> a{2, 1, 1, 1};
    if (n == "linear_torus") {
      a = {static_cast<long>(integer_param(p, "a11")), static_cast<long>(integer_param(p, "a12")),
           static_cast<long>(integer_param(p, "a21")), static_cast<long>(integer_param(p, "a22"))};
      for (long v : a) {
        if (std::labs(v) > 1000) throw std::invalid_argument("matrix entries must satisfy |a_ij| <= 1000");
      }
      const long det = a[0] * a[3] - a[1] * a[2];
      const long tr = a[0] + a[3];
      if (det != 1 && det != -1) throw std::invalid_argument("linear_torus needs det = +-1");
      const bool hyperbolic = det == 1 ? std::labs(tr) > 2 : tr != 0;
      if (!hyperbolic) throw std::invalid_argument("linear_torus matrix is not hyperbolic");
    }
    space = PhaseSpace::torus2(q);
    rule = std::make_shared<LinearTorus>(a, q);
    truth = {linear_exponents(a), "Lebesgue (unique SRB, ergodic, mixing)", "whole torus"};
  } else if (n == "horseshoe") {
    space = PhaseSpace::square();
    rule = std::make_shared<Horseshoe>();
    truth = {{std::log(5.0), -std::log(5.0)}, "supported on the Cantor x Cantor maximal invariant set",
             "none (saddle-type hyperbolic set)"};
  } else if (n == "north_south") {
    const double beta = p.at("beta");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("north_south needs 0 < beta < 1");
    space = PhaseSpace::circle();
    rule = std::make_shared<NorthSouth>(beta);
    truth = {{std::log(1.0 - beta)}, "convex combinations of delta_N and delta_S; SRB = delta_S",
             "S = 1/2"};
  } else if (n == "disc_A" || n == "disc_B" || n == "disc_rot") {
    const double r = p.at("radius");
    if (!(r > 1.0 && r < 2.0)) throw std::invalid_argument("disc radius must satisfy 1 < r < 2");
    space = PhaseSpace::disc(r);
    if (n == "disc_A") {
      rule = std::make_shared<DiscMap>(DiscVariant::a, r, 0.0);
      truth = {{}, "measures on the unit circle", "unit circle (orbitally stable)"};
    } else if (n == "disc_B") {
      rule = std::make_shared<DiscMap>(DiscVariant::b, r, 0.0);
      truth = {{}, "delta at z = 1", "z = 1 (statistical and topological, not orbitally stable)"};
    } else {
      const double a = p.at("a");
      if (!(a >= 0.0 && a < 2.0 * std::numbers::pi)) throw std::invalid_argument("disc_rot needs 0 <= a < 2 pi");
      rule = std::make_shared<DiscMap>(DiscVariant::rotation, r, a);
      truth = {{}, "rotation-invariant measures on the unit circle", "unit circle"};
    }
  } else if (n == "solenoid") {
    const double a = p.at("a");
    if (!(a > 0.0 && a < 0.5)) throw std::invalid_argument("solenoid needs 0 < a < 1/2");
    space = PhaseSpace::solid_torus(a);
    rule = std::make_shared<Solenoid>(a);
    truth = {{std::log(2.0), -std::log(4.0), -std::log(4.0)}, "SRB measure on the solenoid",
             "Smale-Williams solenoid"};
  } else if (n == "identity") {
    const double d = integer_param(p, "dim");
    if (d != 1.0 && d != 2.0) throw std::invalid_argument("identity needs dim 1 or 2");
    const auto dim = static_cast<std::size_t>(d);
    space = dim == 1 ? PhaseSpace::circle(q) : PhaseSpace::torus2(q);
    rule = std::make_shared<Identity>(dim);
    truth = {std::vector<double>(dim, 0.0), "every probability measure", "whole space"};
  }

  return System(entry.name, std::move(p), *space, std::move(rule), std::move(truth));
}

std::vector<SystemInfo> system_catalog() {
  std::vector<SystemInfo> out;
  for (const auto& e : registry()) {
    SystemInfo info{e.name, e.space, e.description, e.params};
    if (e.exact_capable) {
      info.params.push_back({"exact", 0.0, "1 for exact residue arithmetic mod q"});
      info.params.push_back({"q", static_cast<double>(kDefaultModulus), "odd modulus for exact mode"});
    }
    out.push_back(std::move(info));
  }
  return out;
}

std::optional<Point> iterate(const System& system, Point x, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    auto next = system.forward(x);
    if (!next) return std::nullopt;
    x = *next;
  }
  return x;
}

std::optional<Point> iterate_inverse(const System& system, Point x, std::size_t n) {
  if (!system.has_inverse()) throw std::invalid_argument("system " + system.name() + " has no inverse");
  for (std::size_t j = 0; j < n; ++j) {
    auto prev = system.inverse(x);
    if (!prev) return std::nullopt;
    x = *prev;
  }
  return x;
}

OrbitSegment orbit(const System& system, const Point& x, std::size_t n) {
  OrbitSegment seg;
  seg.start = x;
  seg.points.reserve(n);
  Point cur = x;
  for (std::size_t j = 0; j < n; ++j) {
    seg.points.push_back(cur);
    if (j + 1 == n) break;
    auto next = system.forward(cur);
    if (!next) {
      seg.escaped_at = seg.points.size();
      break;
    }
    cur = *next;
  }
  return seg;
}

Point horseshoe_cylinder_point(std::string_view code) {
  if (code.empty()) throw std::invalid_argument("cylinder code must be nonempty");
  // y: pull [0,1] back through the y-branches, last symbol first.
  double ylo = 0.0;
  double yhi = 1.0;
  // x: push [0,1] forward through the x-branches, last symbol first, so the
  // final branch applied is code[0] and p lies in Q_{code[0]}.
  double xlo = 0.0;
  double xhi = 1.0;
  for (auto it = code.rbegin(); it != code.rend(); ++it) {
    if (*it != '0' && *it != '1') throw std::invalid_argument("cylinder code must consist of '0' and '1'");
    if (*it == '0') {
      std::tie(ylo, yhi) = std::pair{(ylo + 1.0) / 5.0, (yhi + 1.0) / 5.0};
      std::tie(xlo, xhi) = std::pair{(xlo + 1.0) / 5.0, (xhi + 1.0) / 5.0};
    } else {
      std::tie(ylo, yhi) = std::pair{(4.0 - yhi) / 5.0, (4.0 - ylo) / 5.0};
      std::tie(xlo, xhi) = std::pair{(4.0 - xhi) / 5.0, (4.0 - xlo) / 5.0};
    }
  }
  return make_point({0.5 * (xlo + xhi), 0.5 * (ylo + yhi)});
}

}  // namespace ergolab
