#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergolab/serialize.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

inline constexpr const char* kVersion = "0.1.0";

/// Raised for malformed or inconsistent experiment configurations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"orbit",    "measure", "birkhoff", "lyapunov", "attractor",
                                                 "srb_like", "mixing",  "entropy",  "all"};
  return names;
}

struct ExperimentConfig {
  std::string system;
  Params params;
  std::string task = "all";
  std::size_t n = 10000;
  /// Defaults to n / 10 where a burn-in is used.
  std::optional<std::size_t> burn_in;
  std::size_t grid_k = 32;
  std::size_t samples_per_axis = 32;
  /// Test-function truncation N of the weak* metric.
  std::size_t truncation = 64;
  double eps = 0.05;
  double alpha = 1.0;
  double tol = 0.02;
  std::uint64_t seed = 0;
  std::string output_dir = "ergolab_out";
  bool exact_mode = false;
  std::optional<std::vector<double>> x0;
  /// Index i of the test function psi_i used by the birkhoff task.
  std::size_t observable = 2;
  /// Longest itinerary / correlation lag.
  std::size_t n_max = 12;
  std::size_t reorth_every = 1;
};

/// Flat JSON object; unknown keys and nonpositive numbers raise ConfigError.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

struct CheckResult {
  std::string task;
  std::string name;
  Json expected;
  Json observed;
  bool passed = false;
};

struct ExperimentResult {
  /// Everything except wall_time is a deterministic function of the config.
  Json report;
  /// File name -> CSV text.
  std::map<std::string, std::string> csv;
  std::vector<CheckResult> checks;
  bool checks_passed = true;
};

/// Builds the system (ConfigError on unknown names or bad parameters) and runs the task.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// report.json plus every CSV, each written atomically into dir.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

std::vector<std::string> demo_names();
ExperimentConfig demo_config(const std::string& name);

}  // namespace ergolab
