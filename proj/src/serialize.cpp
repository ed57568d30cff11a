#include "ergolab/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ergolab {

Json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument("expected a number");
}

namespace {

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_to_json(x));
  return a;
}

}  // namespace

Json to_json(const PhaseSpace& space) {
  Json j{{"kind", std::string(to_string(space.kind()))}};
  if (space.kind() == SpaceKind::disc || space.kind() == SpaceKind::solid_torus) j["radius"] = space.radius();
  if (auto q = space.exact_modulus()) j["modulus"] = *q;
  return j;
}

PhaseSpace space_from_json(const Json& j) {
  const SpaceKind kind = space_kind_from_string(j.at("kind").get<std::string>());
  std::optional<std::uint64_t> q;
  if (j.contains("modulus")) q = j.at("modulus").get<std::uint64_t>();
  switch (kind) {
    case SpaceKind::circle:
      return PhaseSpace::circle(q);
    case SpaceKind::torus2:
      return PhaseSpace::torus2(q);
    case SpaceKind::square:
      return PhaseSpace::square();
    case SpaceKind::disc:
      return PhaseSpace::disc(j.at("radius").get<double>());
    case SpaceKind::solid_torus:
      return PhaseSpace::solid_torus(j.at("radius").get<double>());
  }
  throw std::invalid_argument("unknown space kind");
}

Json to_json(const Point& p) {
  if (p.exact) {
    Json r = Json::array();
    for (std::size_t i = 0; i < p.dim; ++i) r.push_back(p.residues[i]);
    return Json{{"residues", r}};
  }
  return numbers(p.values());
}

Point point_from_json(const PhaseSpace& space, const Json& j) {
  if (j.is_object()) {
    const auto q = space.exact_modulus();
    if (!q) throw std::invalid_argument("exact point for a space without modulus");
    const auto& r = j.at("residues");
    if (r.size() != space.dim()) throw std::invalid_argument("point has the wrong dimension");
    std::vector<std::int64_t> raw;
    for (const auto& v : r) {
      const auto u = v.get<std::uint64_t>();
      if (u >= *q) throw std::invalid_argument("residue out of range");
      raw.push_back(static_cast<std::int64_t>(u));
    }
    return wrap_exact(space, raw);
  }
  if (!j.is_array() || j.size() != space.dim()) throw std::invalid_argument("point has the wrong dimension");
  std::vector<double> c;
  for (const auto& v : j) c.push_back(number_from_json(v));
  const Point p = make_point(c);
  if (!space.contains(p)) throw std::invalid_argument("point lies outside the phase space");
  return p;
}

Json to_json(const Partition& partition) {
  return Json{{"space", to_json(partition.space())}, {"k", partition.cells_per_axis()}};
}

Partition partition_from_json(const Json& j) {
  return Partition(space_from_json(j.at("space")), j.at("k").get<std::size_t>());
}

Json to_json(const GridSet& set) { return Json{{"partition", to_json(set.partition())}, {"cells", set.cells()}}; }

GridSet grid_set_from_json(const Json& j) {
  const auto cells = j.at("cells").get<std::vector<std::size_t>>();
  return GridSet(partition_from_json(j.at("partition")), cells);
}

Json to_json(const Measure& mu, const PhaseSpace& space) {
  Json j{{"space", to_json(space)}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiracMeasure>) {
          j["type"] = "dirac";
          j["data"] = Json{{"atom", to_json(m.atom)}};
        } else if constexpr (std::is_same_v<T, EmpiricalMeasure>) {
          j["type"] = "empirical";
          Json s = Json::array();
          for (const auto& p : m.samples) s.push_back(to_json(p));
          j["data"] = Json{{"samples", s}};
        } else {
          j["type"] = "histogram";
          j["data"] = Json{{"k", m.partition.cells_per_axis()}, {"weights", numbers(m.weights)}};
        }
      },
      mu);
  return j;
}

Measure measure_from_json(const Json& j) {
  const PhaseSpace space = space_from_json(j.at("space"));
  const auto type = j.at("type").get<std::string>();
  const Json& data = j.at("data");
  Measure mu;
  if (type == "dirac") {
    mu = DiracMeasure{point_from_json(space, data.at("atom"))};
  } else if (type == "empirical") {
    EmpiricalMeasure e;
    for (const auto& p : data.at("samples")) e.samples.push_back(point_from_json(space, p));
    mu = std::move(e);
  } else if (type == "histogram") {
    HistogramMeasure h{Partition(space, data.at("k").get<std::size_t>()), {}};
    for (const auto& w : data.at("weights")) h.weights.push_back(number_from_json(w));
    mu = std::move(h);
  } else {
    throw std::invalid_argument("unknown measure type: " + type);
  }
  validate(mu);
  return mu;
}

Json to_json(const GroundTruth& truth) {
  return Json{{"lyapunov_exponents", numbers(truth.lyapunov_exponents)},
              {"invariant_measure", truth.invariant_measure},
              {"attractor", truth.attractor}};
}

Json to_json(const BirkhoffSeries& s) {
  Json j{{"checkpoints", s.checkpoints},
         {"values", numbers(s.values)},
         {"orbit_min", number_to_json(s.orbit_min)},
         {"orbit_max", number_to_json(s.orbit_max)}};
  j["escaped_at"] = s.escaped_at ? Json(*s.escaped_at) : Json(nullptr);
  return j;
}

Json to_json(const POmegaEstimate& e) {
  Json clusters = Json::array();
  for (const auto& m : e.cluster_measures) clusters.push_back(Json{{"n", m.samples.size()}});
  Json d = Json::array();
  for (const auto& row : e.pairwise_distances) d.push_back(numbers(row));
  return Json{{"clusters", clusters}, {"pairwise_distances", d}, {"n_checkpoints", e.n_checkpoints}, {"labels", e.labels}};
}

Json to_json(const LyapunovSpectrum& s) {
  return Json{{"exponents", numbers(s.exponents)},
              {"n_used", s.n_used},
              {"transient", s.transient},
              {"convergence_halfwidth", numbers(s.convergence_halfwidth)}};
}

Json to_json(const HyperbolicityReport& r) {
  return Json{{"passed", r.passed},
              {"n_used", r.n_used},
              {"tightest_lambda", number_to_json(r.tightest_lambda)},
              {"tightest_sigma", number_to_json(r.tightest_sigma)},
              {"stable_slack", number_to_json(r.stable_slack)},
              {"unstable_slack", number_to_json(r.unstable_slack)},
              {"feasible_c", number_to_json(r.feasible_c)}};
}

Json to_json(const AttractorReport& r) {
  return Json{{"candidate", to_json(r.candidate)},
              {"topological_basin_fraction", r.topological_basin_fraction},
              {"statistical_basin_fraction", r.statistical_basin_fraction},
              {"alpha", r.alpha},
              {"n", r.n},
              {"burn_in", r.burn_in},
              {"tolerance", r.tolerance},
              {"topological_tolerance", r.topological_tolerance},
              {"attained", r.attained},
              {"initial_cells", r.initial_cells},
              {"resolution_note", "grid-minimal at resolution k = " +
                                      std::to_string(r.candidate.partition().cells_per_axis())}};
}

Json to_json(const SRBLikeReport& r) {
  Json clusters = Json::array();
  for (const auto& c : r.clusters) {
    clusters.push_back(Json{{"start", to_json(c.start)},
                            {"representative_sample", c.representative_sample},
                            {"n", c.representative.samples.size()},
                            {"basin_fraction", c.basin_fraction},
                            {"integrals", numbers(c.integrals)},
                            {"invariance_residual", number_to_json(c.invariance_residual)}});
  }
  return Json{{"clusters", clusters},
              {"epsilon", r.epsilon},
              {"support_cells", to_json(r.support_cells)},
              {"residual_bound", r.residual_bound},
              {"residuals_ok", r.residuals_ok}};
}

Json to_json(const StabilityProbe& p) {
  return Json{{"delta", p.delta},
              {"samples_used", p.samples_used},
              {"max_excursion", number_to_json(p.max_excursion)},
              {"stable", p.stable}};
}

Json to_json(const CorrelationSeries& s) {
  return Json{{"values", numbers(s.values)},
              {"target", s.target},
              {"cesaro", numbers(s.cesaro)},
              {"mu_a", s.mu_a},
              {"mu_b", s.mu_b}};
}

Json to_json(const EntropyEstimate& e) {
  return Json{{"H", numbers(e.h)},
              {"slope", number_to_json(e.slope)},
              {"n_reliable", e.n_reliable},
              {"occupied", e.occupied},
              {"warning", e.warning}};
}

Json to_json(const PesinResidual& r) {
  return Json{{"entropy", to_json(r.entropy)},
              {"slope", number_to_json(r.slope)},
              {"positive_exponent_sum", number_to_json(r.positive_exponent_sum)},
              {"residual", number_to_json(r.residual)}};
}

Json catalog_json() {
  Json systems = Json::array();
  for (const auto& info : system_catalog()) {
    Json params = Json::array();
    for (const auto& p : info.params) {
      params.push_back(Json{{"name", p.name}, {"default", p.default_value}, {"description", p.description}});
    }
    const System sys = make_system(info.name);
    systems.push_back(Json{{"name", info.name},
                           {"space", info.space},
                           {"description", info.description},
                           {"params", params},
                           {"ground_truth", to_json(sys.ground_truth())}});
  }
  return Json{{"systems", systems}};
}

std::string series_csv(std::span<const std::size_t> n, std::span<const double> values) {
  if (n.size() != values.size()) throw std::invalid_argument("series columns differ in length");
  std::ostringstream out;
  out.precision(17);
  out << "n,value\n";
  for (std::size_t i = 0; i < n.size(); ++i) out << n[i] << ',' << values[i] << '\n';
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace ergolab
