#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hemt/scenario.hpp"
#include "hemt/storage.hpp"

namespace fs = std::filesystem;

namespace {

std::string load_scenario_text(const std::string& ref) {
  if (fs::exists(ref)) {
    std::ifstream in(ref);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return hemt::builtin_scenario_text(ref);  // throws if unknown
}

int cmd_simulate(const std::string& ref, const std::string& out_dir,
                 std::int64_t seed, int reps) {
  hemt::Scenario scenario = hemt::parse_scenario(load_scenario_text(ref));
  if (seed >= 0) scenario.seed = static_cast<std::uint64_t>(seed);
  if (reps > 0) scenario.replications = reps;

  hemt::ScenarioResult result = hemt::run_experiment(scenario);

  fs::create_directories(out_dir);
  fs::path stages_path = fs::path(out_dir) / (scenario.name + "_stages.csv");
  fs::path summary_path = fs::path(out_dir) / (scenario.name + "_summary.csv");
  std::ofstream(stages_path) << hemt::stage_csv(result);
  std::ofstream(summary_path) << hemt::summary_csv(result);

  std::cout << "scenario " << scenario.name << ": " << result.rows.size()
            << " stage rows, " << result.summary.size() << " summary rows\n";
  for (const auto& r : result.summary)
    std::cout << "  " << r.strategy << ": mean " << r.mean_completion_s
              << " s (sd " << r.stddev_s << ", " << r.replications << " reps)\n";
  std::cout << "wrote " << stages_path.string() << "\n"
            << "wrote " << summary_path.string() << "\n";
  return 0;
}

int cmd_probcheck(int n, int r, std::int64_t trials, std::uint64_t seed) {
  hemt::StorageConfig cfg;
  cfg.datanodes = n;
  cfg.replication = r;
  hemt::validate(cfg);

  double p1 = hemt::prob_same_block(cfg);
  auto probs = hemt::prob_diff_block(cfg);
  auto est = hemt::estimate_collisions_mc(cfg, trials, seed);

  double se1 = std::sqrt(p1 * (1.0 - p1) / trials);
  double se2 = std::sqrt(probs.p2 * (1.0 - probs.p2) / trials);
  bool ok1 = std::abs(est.p1_hat - p1) <= 3.0 * se1 || se1 == 0.0;
  bool ok2 = std::abs(est.p2_hat - probs.p2) <= 3.0 * se2 || se2 == 0.0;

  std::cout << "n,r,p1,p2,p1_hat,p2_hat,trials,seed\n";
  std::cout << n << "," << r << "," << p1 << "," << probs.p2 << "," << est.p1_hat
            << "," << est.p2_hat << "," << trials << "," << seed << "\n";
  if (!ok1 || !ok2) {
    std::cerr << "warning: Monte Carlo estimate outside 3 standard errors of the closed form\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster tasking simulator: homogeneous microtasking vs heterogeneous macrotasking"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string out_dir = "out";
  std::int64_t seed_override = -1;
  int reps_override = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file (or builtin scenario by name)");
  simulate->add_option("scenario", scenario_ref, "Scenario file path or builtin name")->required();
  simulate->add_option("--out", out_dir, "Output directory for CSV files");
  simulate->add_option("--seed", seed_override, "Override the scenario's base seed");
  simulate->add_option("--reps", reps_override, "Override the replication count");

  int n = 4, r = 2;
  std::int64_t trials = 100000;
  std::uint64_t mc_seed = 1;
  auto* probcheck = app.add_subcommand(
      "probcheck", "Closed-form vs Monte Carlo replica collision probabilities");
  probcheck->add_option("--n", n, "Number of datanodes")->required();
  probcheck->add_option("--r", r, "Replication factor")->required();
  probcheck->add_option("--trials", trials, "Monte Carlo trials");
  probcheck->add_option("--seed", mc_seed, "Monte Carlo seed");

  auto* scenarios = app.add_subcommand("scenarios", "Shipped scenario library");
  auto* list = scenarios->add_subcommand("list", "List builtin scenarios");
  std::string show_name;
  auto* show = scenarios->add_subcommand("show", "Print a builtin scenario file");
  show->add_option("name", show_name, "Builtin scenario name")->required();
  scenarios->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(scenario_ref, out_dir, seed_override, reps_override);
    if (probcheck->parsed()) return cmd_probcheck(n, r, trials, mc_seed);
    if (list->parsed()) {
      for (const auto& name : hemt::builtin_scenario_names()) std::cout << name << "\n";
      return 0;
    }
    if (show->parsed()) {
      std::cout << hemt::builtin_scenario_text(show_name);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
