// ocbf: run observer-controller safety scenarios and write trajectories.
//
//   ocbf list
//   ocbf export <builtin> [-o file.yaml]
//   ocbf run <file.yaml | builtin> [--out dir] [--seed N] [--dt s] [--strict] [--batch N]

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <thread>

#include <CLI11.hpp>

#include "ocbf/io/builtin.hpp"
#include "ocbf/io/csv.hpp"
#include "ocbf/io/scenario_file.hpp"
#include "ocbf/linalg.hpp"
#include "ocbf/sim.hpp"

namespace fs = std::filesystem;
using namespace ocbf;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInput = 2;
constexpr double kSafetyTol = 1e-6;

Scenario resolve(const std::string& what) {
  if (fs::exists(what)) return io::load_scenario(what);
  if (auto s = io::find_builtin(what)) return *s;
  throw io::ScenarioFileError(0, "no such file or built-in scenario: " + what);
}

fs::path output_dir(const std::string& flag, const std::string& scenario_name) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("OCBF_OUT_DIR");
  return fs::path(env && *env ? env : "out") / scenario_name;
}

bool safety_ok(const Trajectory& traj) {
  return traj.min_safety() >= -kSafetyTol && traj.containment_violations() == 0;
}

int run_single(const Scenario& s, const fs::path& dir, bool strict) {
  const Trajectory traj = simulate(s);
  fs::create_directories(dir);
  io::write_trajectory_csv(dir / "trajectory.csv", traj);
  std::ofstream summary(dir / "summary.txt");
  io::write_summary(summary, s, traj);
  io::write_summary(std::cout, s, traj);
  std::cout << "wrote " << (dir / "trajectory.csv").string() << '\n';

  if (traj.status != RunStatus::kCompleted) {
    std::cerr << "error: run stopped early: " << traj.message << '\n';
    return kExitRuntime;
  }
  if (strict && !safety_ok(traj)) {
    std::cerr << "error: safety assertion failed (min_safety " << traj.min_safety() << ", "
              << traj.containment_violations() << " containment violations)\n";
    return kExitRuntime;
  }
  return 0;
}

int run_batch(const Scenario& s, int count, const fs::path& dir, bool strict) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  std::iota(seeds.begin(), seeds.end(), s.seed);
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto rows = batch_run({s}, seeds, threads);
  fs::create_directories(dir);
  std::ofstream csv(dir / "batch.csv");
  io::write_batch_csv(csv, rows);

  int failed = 0;
  int unsafe = 0;
  for (const auto& r : rows) {
    if (r.failed || r.status != RunStatus::kCompleted) ++failed;
    else if (r.min_safety < -kSafetyTol || r.containment_rate < 1.0) ++unsafe;
  }
  std::cout << "scenario: " << s.name << '\n'
            << "runs: " << rows.size() << '\n'
            << "failed: " << failed << '\n'
            << "unsafe: " << unsafe << '\n'
            << "wrote " << (dir / "batch.csv").string() << '\n';
  if (failed > 0) return kExitRuntime;
  return strict && unsafe > 0 ? kExitRuntime : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe observer-controller simulation"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  std::string export_name;
  std::string export_path;
  auto* exp = app.add_subcommand("export", "Write a built-in scenario as YAML");
  exp->add_option("name", export_name, "Built-in scenario name")->required();
  exp->add_option("-o,--output", export_path, "Output file (default: stdout)");

  std::string scenario_arg;
  std::string out_dir;
  std::uint64_t seed = 0;
  double dt = 0.0;
  bool strict = false;
  int batch = 0;
  auto* run = app.add_subcommand("run", "Simulate a scenario file or built-in");
  run->add_option("scenario", scenario_arg, "YAML scenario file or built-in name")->required();
  run->add_option("--out", out_dir, "Output directory (default: $OCBF_OUT_DIR/<name> or out/<name>)");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--dt", dt, "Override the integration step")->check(CLI::PositiveNumber);
  run->add_flag("--strict", strict, "Fail when safety or bound containment is violated");
  run->add_option("--batch", batch, "Run N consecutive seeds and write batch.csv")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (list->parsed()) {
    std::cout << std::left << std::setw(28) << "name" << "description\n";
    for (const auto& s : io::builtin_scenarios()) {
      std::cout << std::setw(28) << s.name << s.description << '\n';
    }
    return 0;
  }

  if (exp->parsed()) {
    const auto s = io::find_builtin(export_name);
    if (!s) {
      std::cerr << "error: unknown built-in scenario '" << export_name << "'\n";
      return kExitInput;
    }
    if (export_path.empty()) {
      std::cout << io::serialize_scenario(*s);
    } else {
      io::save_scenario(*s, export_path);
    }
    return 0;
  }

  Scenario s;
  try {
    s = resolve(scenario_arg);
    if (seed_opt->count() > 0) s.seed = seed;
    if (dt > 0.0) s.dt = dt;
    (void)build_components(s);  // validate before doing any work
  } catch (const io::ScenarioFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << scenario_arg << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const DesignError& e) {
    std::cerr << "error: " << scenario_arg << ": " << e.what() << '\n';
    return kExitInput;
  }

  const fs::path dir = output_dir(out_dir, s.name);
  try {
    return batch > 0 ? run_batch(s, batch, dir, strict) : run_single(s, dir, strict);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
