// Scenario driver: `run` solves and persists artifacts, `compare` cross-checks
// the two solution methods, `check` validates without solving.
// Exit codes: 0 success, 2 validation/parse failure, 3 solver failure.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdw/sdw.hpp"

namespace {

struct Options {
  std::string scenario_path;
  std::string out_dir;
  double tol_abs = 1e-10;
  double tol_rel = 1e-9;
  unsigned seed = 12345;
  bool quiet = false;
};

std::string resolve_out_dir(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("SDW_OUT_DIR"); env && *env) return env;
  return ".";
}

int dispatch(const std::string& cmd, const Options& opt) {
  sdw::ToleranceProfile tol;
  tol.abs_tol = opt.tol_abs;
  tol.rel_tol = opt.tol_rel;
  (void)opt.seed;  // reserved for randomized property suites

  const sdw::Scenario scenario = sdw::load_scenario(opt.scenario_path);
  sdw::validate_scenario(scenario);
  if (cmd == "check") {
    if (!opt.quiet)
      std::cout << "scenario '" << scenario.name << "' is valid\n";
    return 0;
  }
  const std::string dir = resolve_out_dir(opt);
  if (cmd == "run") {
    sdw::run_scenario(scenario, dir, tol);
    if (!opt.quiet)
      std::cout << "scenario '" << scenario.name << "' written to " << dir
                << "\n";
    return 0;
  }
  sdw::compare_scenario(scenario, dir, tol);
  if (!opt.quiet)
    std::cout << "comparison for '" << scenario.name << "' written to " << dir
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delta-shock solver suite"};
  app.require_subcommand(1);

  Options opt;
  std::string cmd;
  for (const char* name : {"run", "compare", "check"}) {
    CLI::App* sub = app.add_subcommand(
        name, std::string(name) + " a scenario file");
    sub->add_option("scenario", opt.scenario_path, "scenario JSON file")
        ->required();
    sub->add_option("--out-dir", opt.out_dir, "output directory");
    sub->add_option("--tol-abs", opt.tol_abs, "absolute tolerance");
    sub->add_option("--tol-rel", opt.tol_rel, "relative tolerance");
    sub->add_option("--seed", opt.seed, "seed for randomized suites");
    sub->add_flag("--quiet", opt.quiet, "suppress status output");
    sub->callback([&cmd, name] { cmd = name; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return dispatch(cmd, opt);
  } catch (const sdw::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const sdw::IncompatibleScenario& e) {
    std::cerr << "incompatible scenario: " << e.what() << "\n";
    return 2;
  } catch (const sdw::Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
