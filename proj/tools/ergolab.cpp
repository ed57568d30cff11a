#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ergolab/experiment.hpp"

namespace {

int execute(const ergolab::ExperimentConfig& config, bool check, const std::string& out_override) {
  const auto result = ergolab::run_experiment(config);
  const std::string dir = out_override.empty() ? config.output_dir : out_override;
  ergolab::write_outputs(result, dir);
  std::cout << "report written to " << dir << "/report.json\n";
  for (const auto& c : result.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.task << ": " << c.name << " (expected " << c.expected.dump()
              << ", observed " << c.observed.dump() << ")\n";
  }
  if (check && !result.checks_passed) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: numerical ergodic theory experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool check = false;
  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_flag("--check", check, "compare against ground truth; exit 2 on mismatch");
  run->add_option("--out", out_dir, "output directory (overrides output_dir)");

  app.add_subcommand("list-systems", "print the system catalog as JSON");

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "run a built-in demonstration config");
  demo->add_option("name", demo_name, "demo name")->required();
  demo->add_flag("--check", check, "compare against ground truth; exit 2 on mismatch");
  demo->add_option("--out", out_dir, "output directory");
  demo->footer([] {
    std::string s = "demos:";
    for (const auto& n : ergolab::demo_names()) s += " " + n;
    return s;
  }());

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-systems")) {
      std::cout << ergolab::catalog_json().dump(2) << "\n";
      return 0;
    }
    if (app.got_subcommand("demo")) return execute(ergolab::demo_config(demo_name), check, out_dir);

    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open " << config_path << "\n";
      return 1;
    }
    ergolab::Json j;
    try {
      j = ergolab::Json::parse(in);
    } catch (const ergolab::Json::parse_error& e) {
      std::cerr << "error: " << config_path << " is not valid JSON: " << e.what() << "\n";
      return 1;
    }
    return execute(ergolab::config_from_json(j), check, out_dir);
  } catch (const ergolab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
