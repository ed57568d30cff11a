#include "ergolab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace ergolab {

namespace {

const std::set<std::string, std::less<>> kConfigKeys = {
    "system", "params", "task",   "n",         "burn_in",  "grid_k",     "samples_per_axis", "N", "eps",
    "alpha",  "tol",    "seed",   "output_dir", "exact_mode", "x0", "observable",       "n_max", "reorth_every"};

std::uint64_t get_count(const Json& j, const std::string& key, bool allow_zero) {
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  const auto u = v.get<std::uint64_t>();
  if (!allow_zero && u == 0) throw ConfigError("'" + key + "' must be positive");
  return u;
}

double get_positive(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double d = v.get<double>();
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("'" + key + "' must be positive");
  return d;
}

bool lebesgue_invariant(const System& s) {
  const auto& n = s.name();
  if (n == "expanding_k") return s.params().at("eps") == 0.0;
  return n == "rotation" || n == "tent" || n == "cat_map" || n == "linear_torus" || n == "identity";
}

/// Lebesgue-ergodic systems whose float orbits stay typical; doubling-type
/// maps collapse onto 0 in binary floating point unless run exactly.
bool lebesgue_ergodic_typical(const System& s, std::size_t steps) {
  const auto& n = s.name();
  const bool doubling = n == "tent" || n == "expanding_k";
  if (n == "expanding_k" && s.params().at("eps") != 0.0) return false;
  if (doubling && !s.exact_mode() && steps >= 40) return false;
  if (n == "rotation") {
    const double a = s.params().at("alpha");
    if (a == 0.0) return false;
  }
  return doubling || n == "rotation" || n == "cat_map" || n == "linear_torus";
}

Point random_point(const System& sys, std::mt19937_64& rng) {
  const PhaseSpace& space = sys.space();
  if (sys.name() == "horseshoe") {
    std::string code;
    for (int i = 0; i < 20; ++i) code.push_back((rng() & 1U) ? '1' : '0');
    return horseshoe_cylinder_point(code);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> c(space.dim());
    for (std::size_t a = 0; a < space.dim(); ++a) {
      c[a] = space.bounds().lower[a] + unit(rng) * (space.bounds().upper[a] - space.bounds().lower[a]);
    }
    Point p = make_point(c);
    if (space.contains(p)) return sys.exact_mode() ? space.to_exact(p) : p;
  }
  throw std::runtime_error("could not draw a starting point");
}

Point start_of(const System& sys, const ExperimentConfig& c) {
  if (!c.x0) {
    std::mt19937_64 rng(c.seed);
    return random_point(sys, rng);
  }
  const PhaseSpace& space = sys.space();
  if (c.x0->size() != space.dim()) throw ConfigError("x0 has the wrong dimension");
  Point p = space.periodic() ? wrap(space, *c.x0) : make_point(*c.x0);
  if (!space.contains(p)) throw ConfigError("x0 lies outside the phase space");
  return sys.exact_mode() ? space.to_exact(p) : p;
}

struct Context {
  const ExperimentConfig& config;
  const System& system;
  Point x0;
  std::vector<Point> samples;
  Partition partition;
  TestFunctionFamily family;
  ExperimentResult& out;

  std::size_t burn_in() const { return config.burn_in.value_or(config.n / 10); }

  void check(const std::string& task, const std::string& name, Json expected, Json observed, bool passed) {
    out.checks.push_back({task, name, std::move(expected), std::move(observed), passed});
    if (!passed) out.checks_passed = false;
  }
  void require_steps() const {
    if (config.n == 0) throw ConfigError("n must be positive for this task");
  }
};

std::string orbit_csv(const OrbitSegment& seg) {
  std::ostringstream o;
  o.precision(17);
  const std::size_t dim = seg.start.dim;
  o << "n";
  if (dim == 1) {
    o << ",value";
  } else {
    for (std::size_t a = 0; a < dim; ++a) o << ",value_" << a + 1;
  }
  o << '\n';
  for (std::size_t j = 0; j < seg.points.size(); ++j) {
    o << j;
    for (std::size_t a = 0; a < dim; ++a) o << ',' << seg.points[j].coords[a];
    o << '\n';
  }
  return o.str();
}

Json task_orbit(Context& ctx) {
  const auto seg = orbit(ctx.system, ctx.x0, ctx.config.n + 1);
  Json pts = Json::array();
  for (const auto& p : seg.points) pts.push_back(to_json(p));
  ctx.out.csv["orbit.csv"] = orbit_csv(seg);
  return Json{{"points", pts}, {"escaped_at", seg.escaped_at ? Json(*seg.escaped_at) : Json(nullptr)}};
}

Json task_measure(Context& ctx) {
  ctx.require_steps();
  const auto& c = ctx.config;
  const Measure kb = krylov_bogoliubov(ctx.system, DiracMeasure{ctx.x0}, c.n);
  const double kb_residual = invariance_residual(ctx.system, kb, ctx.family, c.truncation);
  const Measure uniform = HistogramMeasure::uniform(ctx.partition);
  const double uniform_residual = invariance_residual(ctx.system, uniform, ctx.family, c.truncation);
  const double to_uniform = weak_star_distance(kb, uniform, ctx.family, c.truncation);
  const std::size_t used = std::get<EmpiricalMeasure>(kb).samples.size();
  ctx.check("measure", "krylov_bogoliubov_residual_bound", 2.0 / static_cast<double>(used), kb_residual,
            kb_residual <= 2.0 / static_cast<double>(used));
  if (lebesgue_invariant(ctx.system)) {
    ctx.check("measure", "uniform_invariance_residual", c.tol, uniform_residual, uniform_residual <= c.tol);
  }
  return Json{{"krylov_bogoliubov_samples", used},
              {"krylov_bogoliubov_residual", kb_residual},
              {"uniform_histogram_residual", uniform_residual},
              {"distance_to_uniform", to_uniform},
              {"grid_k", c.grid_k}};
}

Json task_birkhoff(Context& ctx) {
  ctx.require_steps();
  const auto& c = ctx.config;
  if (c.observable == 0 || c.observable > TestFunctionFamily::kMaxFunctions) {
    throw ConfigError("observable must lie in [1, 4096]");
  }
  const auto& fam = ctx.family;
  const std::size_t i = c.observable;
  const auto series = birkhoff_average(
      ctx.system, ctx.x0, [&](const Point& p) { return fam(i, p); }, c.n);
  ctx.out.csv["birkhoff.csv"] = series_csv(series.checkpoints, series.values);
  const double space_mean = fam.box_mean(i);
  if (lebesgue_ergodic_typical(ctx.system, c.n)) {
    const double err = std::fabs(series.values.back() - space_mean);
    ctx.check("birkhoff", "time_average_equals_space_average", space_mean, series.values.back(), err <= c.tol);
  }
  Json j = to_json(series);
  j["observable"] = i;
  j["space_average"] = space_mean;
  return j;
}

Json task_lyapunov(Context& ctx) {
  ctx.require_steps();
  const auto& c = ctx.config;
  if (!ctx.system.has_jacobian()) throw std::invalid_argument("system has no Jacobian");
  const auto lyap = spectrum_qr(ctx.system, ctx.x0, c.n, QrOptions{c.reorth_every, std::nullopt, std::nullopt});
  Json j = to_json(lyap);
  if (ctx.system.dim() == 1) j["scalar_exponent"] = number_to_json(scalar_exponent(ctx.system, ctx.x0, c.n));
  const auto& truth = ctx.system.ground_truth().lyapunov_exponents;
  if (!truth.empty() && truth.size() == lyap.exponents.size()) {
    double worst = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) worst = std::max(worst, std::fabs(truth[k] - lyap.exponents[k]));
    ctx.check("lyapunov", "exponents_match_ground_truth", to_json(ctx.system.ground_truth())["lyapunov_exponents"],
              j["exponents"], worst <= c.tol);
  }
  if (ctx.system.dim() == 2 && lyap.exponents.front() > 0.0 && lyap.exponents.back() < 0.0) {
    HyperbolicityOptions opt;
    opt.lambda = std::exp(lyap.exponents.back());
    opt.sigma = std::exp(lyap.exponents.front());
    opt.c = 1.0;
    const auto rep = hyperbolicity_check(ctx.system, ctx.x0, std::min<std::size_t>(c.n, 10), opt);
    j["hyperbolicity"] = to_json(rep);
  }
  return j;
}

GridSet expected_attractor(const Context& ctx, bool& known) {
  known = true;
  const auto& s = ctx.system;
  const auto& part = ctx.partition;
  GridSet g(part);
  if (s.name() == "north_south") {
    g.insert(part.cell_index(s.space().point({0.5})));
  } else if (s.name() == "disc_B") {
    g.insert(part.cell_index(s.space().point({1.0, 0.0})));
  } else if (lebesgue_ergodic_typical(s, ctx.config.n)) {
    for (std::size_t cell = 0; cell < part.cell_count(); ++cell) g.insert(cell);
  } else {
    known = false;
  }
  return g;
}

AttractorReport attractor_of(Context& ctx) {
  AttractorOptions opt;
  opt.burn_in = ctx.burn_in();
  return minimal_statistical_attractor(ctx.system, ctx.samples, ctx.config.n, ctx.config.alpha, ctx.partition, opt);
}

Json task_attractor(Context& ctx) {
  ctx.require_steps();
  const auto rep = attractor_of(ctx);
  ctx.check("attractor", "statistical_basin_reaches_alpha", ctx.config.alpha, rep.statistical_basin_fraction,
            rep.attained && rep.statistical_basin_fraction >= ctx.config.alpha);
  bool known = false;
  const GridSet expected = expected_attractor(ctx, known);
  if (known) {
    ctx.check("attractor", "candidate_matches_ground_truth", expected.cells(), rep.candidate.cells(),
              expected == rep.candidate);
  }
  return to_json(rep);
}

bool single_srb(const Context& ctx) {
  const auto& n = ctx.system.name();
  return n == "north_south" || n == "disc_B" || lebesgue_ergodic_typical(ctx.system, ctx.config.n);
}

Json task_srb_like(Context& ctx) {
  ctx.require_steps();
  const auto& c = ctx.config;
  const auto rep = srb_like_estimate(ctx.system, ctx.samples, c.n, ctx.family, ctx.partition, c.truncation, c.eps);
  Json j = to_json(rep);
  const auto attractor = attractor_of(ctx);
  const double overlap = support_attractor_correspondence(rep, attractor);
  j["attractor_cells"] = attractor.candidate.cells();
  j["support_attractor_correspondence"] = overlap;
  if (single_srb(ctx)) {
    const bool one = rep.clusters.size() == 1 && rep.clusters.front().basin_fraction >= 0.99;
    ctx.check("srb_like", "single_srb_like_measure", 1, rep.clusters.size(), one);
    ctx.check("srb_like", "support_attractor_correspondence", 0.9, overlap, overlap >= 0.9);
  }
  ctx.check("srb_like", "representative_invariance_residuals", rep.residual_bound, rep.residuals_ok, rep.residuals_ok);
  return j;
}

Json task_mixing(Context& ctx) {
  const auto& c = ctx.config;
  if (c.grid_k % 2 != 0) throw ConfigError("mixing needs an even grid_k so that A = {x_1 < 1/2} is a union of cells");
  GridSet half(ctx.partition);
  for (std::size_t cell = 0; cell < ctx.partition.cell_count(); ++cell) {
    if (ctx.partition.cell_coords(cell)[0] < c.grid_k / 2) half.insert(cell);
  }
  const auto series = correlation_series(ctx.system, half, half, ctx.samples, c.n_max);
  const auto verdict = mixing_verdict(series, c.tol);
  std::vector<std::size_t> lags(series.values.size());
  for (std::size_t k = 0; k < lags.size(); ++k) lags[k] = k;
  ctx.out.csv["correlation.csv"] = series_csv(lags, series.values);
  ctx.out.csv["cesaro.csv"] = series_csv(lags, series.cesaro);
  const auto& n = ctx.system.name();
  std::optional<MixingVerdict> expected;
  if (n == "rotation" && lebesgue_ergodic_typical(ctx.system, c.n_max)) expected = MixingVerdict::ergodic_only;
  if (n != "rotation" && lebesgue_ergodic_typical(ctx.system, c.n_max)) expected = MixingVerdict::mixing_consistent;
  if (n == "identity") expected = MixingVerdict::neither;
  if (expected) {
    ctx.check("mixing", "verdict", std::string(to_string(*expected)), std::string(to_string(verdict)),
              verdict == *expected);
  }
  Json j = to_json(series);
  j["verdict"] = std::string(to_string(verdict));
  return j;
}

Json task_entropy(Context& ctx) {
  const auto& c = ctx.config;
  Json j;
  EntropyEstimate est;
  if (ctx.system.has_jacobian()) {
    const auto r = pesin_residual(ctx.system, ctx.samples, ctx.partition, c.n_max, std::max<std::size_t>(c.n, 1));
    est = r.entropy;
    j = to_json(r);
    ctx.check("entropy", "margulis_ruelle", r.positive_exponent_sum + 0.05, r.slope,
              r.slope <= r.positive_exponent_sum + 0.05);
    const auto& truth = ctx.system.ground_truth().lyapunov_exponents;
    if (!truth.empty() && lebesgue_ergodic_typical(ctx.system, c.n_max)) {
      double positive = 0.0;
      for (double e : truth) positive += std::max(e, 0.0);
      const double allowed = std::max(0.05, 0.15 * positive);
      ctx.check("entropy", "pesin_formula", positive, r.slope, std::fabs(r.slope - positive) <= allowed);
    }
  } else {
    est = entropy_estimate(ctx.system, ctx.samples, ctx.partition, c.n_max);
    j = Json{{"entropy", to_json(est)}, {"slope", number_to_json(est.slope)}};
  }
  std::vector<std::size_t> lengths(est.h.size());
  for (std::size_t k = 0; k < lengths.size(); ++k) lengths[k] = k;
  ctx.out.csv["entropy.csv"] = series_csv(lengths, est.h);
  return j;
}

using TaskFn = Json (*)(Context&);

const std::vector<std::pair<std::string, TaskFn>>& task_table() {
  static const std::vector<std::pair<std::string, TaskFn>> table = {
      {"orbit", task_orbit},         {"measure", task_measure},   {"birkhoff", task_birkhoff},
      {"lyapunov", task_lyapunov},   {"attractor", task_attractor}, {"srb_like", task_srb_like},
      {"mixing", task_mixing},       {"entropy", task_entropy}};
  return table;
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kConfigKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (!j.contains("system") || !j.at("system").is_string()) throw ConfigError("'system' must be a string");
    c.system = j.at("system").get<std::string>();
    if (j.contains("params")) {
      if (!j.at("params").is_object()) throw ConfigError("'params' must be an object");
      for (const auto& [key, v] : j.at("params").items()) {
        if (v.is_boolean()) {
          c.params[key] = v.get<bool>() ? 1.0 : 0.0;
        } else if (v.is_number()) {
          c.params[key] = v.get<double>();
        } else {
          throw ConfigError("parameter '" + key + "' must be a number");
        }
      }
    }
    if (j.contains("task")) {
      if (!j.at("task").is_string()) throw ConfigError("'task' must be a string");
      c.task = j.at("task").get<std::string>();
    }
    if (std::find(task_names().begin(), task_names().end(), c.task) == task_names().end()) {
      throw ConfigError("unknown task '" + c.task + "'");
    }
    if (j.contains("n")) c.n = get_count(j, "n", true);
    if (j.contains("burn_in")) c.burn_in = get_count(j, "burn_in", true);
    if (j.contains("grid_k")) c.grid_k = get_count(j, "grid_k", false);
    if (j.contains("samples_per_axis")) c.samples_per_axis = get_count(j, "samples_per_axis", false);
    if (j.contains("N")) c.truncation = get_count(j, "N", false);
    if (c.truncation > TestFunctionFamily::kMaxFunctions) throw ConfigError("'N' must not exceed 4096");
    if (j.contains("eps")) c.eps = get_positive(j, "eps");
    if (j.contains("alpha")) c.alpha = get_positive(j, "alpha");
    if (c.alpha > 1.0) throw ConfigError("'alpha' must lie in (0, 1]");
    if (j.contains("tol")) c.tol = get_positive(j, "tol");
    if (j.contains("seed")) c.seed = get_count(j, "seed", true);
    if (j.contains("output_dir")) {
      if (!j.at("output_dir").is_string()) throw ConfigError("'output_dir' must be a string");
      c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("exact_mode")) {
      if (!j.at("exact_mode").is_boolean()) throw ConfigError("'exact_mode' must be a boolean");
      c.exact_mode = j.at("exact_mode").get<bool>();
    }
    if (j.contains("x0")) {
      const Json& x = j.at("x0");
      if (!x.is_array()) throw ConfigError("'x0' must be an array of numbers");
      std::vector<double> v;
      for (const auto& e : x) {
        if (!e.is_number()) throw ConfigError("'x0' must be an array of numbers");
        v.push_back(e.get<double>());
      }
      c.x0 = v;
    }
    if (j.contains("observable")) c.observable = get_count(j, "observable", false);
    if (j.contains("n_max")) c.n_max = get_count(j, "n_max", false);
    if (j.contains("reorth_every")) c.reorth_every = get_count(j, "reorth_every", false);
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (c.burn_in && c.n > 0 && *c.burn_in >= c.n) throw ConfigError("'burn_in' must be smaller than n");
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  Json j{{"system", c.system},
         {"params", params},
         {"task", c.task},
         {"n", c.n},
         {"grid_k", c.grid_k},
         {"samples_per_axis", c.samples_per_axis},
         {"N", c.truncation},
         {"eps", c.eps},
         {"alpha", c.alpha},
         {"tol", c.tol},
         {"seed", c.seed},
         {"output_dir", c.output_dir},
         {"exact_mode", c.exact_mode},
         {"observable", c.observable},
         {"n_max", c.n_max},
         {"reorth_every", c.reorth_every}};
  if (c.burn_in) j["burn_in"] = *c.burn_in;
  if (c.x0) j["x0"] = *c.x0;
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  Params params = config.params;
  if (config.exact_mode) params["exact"] = 1.0;
  std::optional<System> system;
  try {
    system = make_system(config.system, params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ExperimentResult result;
  Context ctx{config,
              *system,
              start_of(*system, config),
              grid_samples(system->space(), config.samples_per_axis, system->exact_mode()),
              Partition(system->space(), config.grid_k),
              default_family(system->space()),
              result};

  Json results = Json::object();
  for (const auto& [name, fn] : task_table()) {
    if (config.task != "all" && config.task != name) continue;
    if (config.task == "all") {
      try {
        results[name] = fn(ctx);
      } catch (const std::invalid_argument& e) {
        results[name] = Json{{"skipped", e.what()}};
      }
    } else {
      try {
        results[name] = fn(ctx);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }

  Json checks = Json::array();
  for (const auto& ch : result.checks) {
    checks.push_back(Json{{"task", ch.task},
                          {"name", ch.name},
                          {"expected", ch.expected},
                          {"observed", ch.observed},
                          {"passed", ch.passed}});
  }
  Json sys{{"name", system->name()}, {"space", to_json(system->space())}, {"ground_truth", to_json(system->ground_truth())}};
  Json sys_params = Json::object();
  for (const auto& [k, v] : system->params()) sys_params[k] = v;
  sys["params"] = sys_params;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.report = Json{{"version", kVersion},
                       {"config", to_json(config)},
                       {"system", sys},
                       {"start", to_json(ctx.x0)},
                       {"results", results},
                       {"checks", checks},
                       {"checks_passed", result.checks_passed},
                       {"wall_time_seconds", wall}};
  return result;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / "report.json", result.report.dump(2) + "\n");
  for (const auto& [name, text] : result.csv) write_file_atomic(dir / name, text);
}

std::vector<std::string> demo_names() {
  return {"cat_lyapunov", "horseshoe_lyapunov", "north_south_attractor", "disc_b_statistical",
          "tent_mixing",  "rotation_mixing",    "cat_srb_like",          "tent_entropy"};
}

ExperimentConfig demo_config(const std::string& name) {
  Json j;
  if (name == "cat_lyapunov") {
    j = {{"system", "cat_map"}, {"task", "lyapunov"}, {"n", 10000}, {"tol", 1e-9}};
  } else if (name == "horseshoe_lyapunov") {
    j = {{"system", "horseshoe"}, {"task", "lyapunov"}, {"n", 20}, {"tol", 1e-9}, {"seed", 7}};
  } else if (name == "north_south_attractor") {
    j = {{"system", "north_south"}, {"task", "attractor"}, {"n", 2000}, {"grid_k", 256}, {"samples_per_axis", 256}};
  } else if (name == "disc_b_statistical") {
    j = {{"system", "disc_B"}, {"task", "srb_like"}, {"n", 2000}, {"grid_k", 33}, {"samples_per_axis", 24}};
  } else if (name == "tent_mixing") {
    j = {{"system", "tent"}, {"task", "mixing"}, {"n_max", 12}, {"grid_k", 2}, {"samples_per_axis", 1048576}};
  } else if (name == "rotation_mixing") {
    j = {{"system", "rotation"}, {"task", "mixing"}, {"n_max", 1000}, {"grid_k", 2}, {"samples_per_axis", 4096}};
  } else if (name == "cat_srb_like") {
    j = {{"system", "cat_map"}, {"exact_mode", true}, {"task", "srb_like"}, {"n", 10000}, {"grid_k", 8},
         {"samples_per_axis", 32}};
  } else if (name == "tent_entropy") {
    j = {{"system", "tent"}, {"task", "entropy"}, {"n_max", 12}, {"grid_k", 2}, {"samples_per_axis", 100000},
         {"n", 2000}};
  } else {
    throw ConfigError("unknown demo '" + name + "'");
  }
  j["output_dir"] = "ergolab_demo_" + name;
  return config_from_json(j);
}

}  // namespace ergolab
