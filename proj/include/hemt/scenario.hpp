#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hemt/engine.hpp"
#include "hemt/workload.hpp"

namespace hemt {

// A declarative experiment: a cluster, a storage layer, a job sequence and
// the tasking strategies to compare, replicated over consecutive seeds.
struct Scenario {
  std::string name;
  std::vector<NodeSpec> nodes;
  StorageConfig storage;
  JobKind job_kind = JobKind::Synthetic;
  JobParams job;
  int job_count = 1;  // repeats of the built job sequence
  std::vector<StrategyConfig> strategies;
  SimConfig sim;
  int replications = 1;
  std::uint64_t seed = 1;
};

// Parses and fully validates a scenario from JSON text. Unknown keys,
// missing required fields and invariant violations raise
// std::invalid_argument with the offending key path.
Scenario parse_scenario(const std::string& text);

// Canonical JSON with every default filled in; parse(serialize(s)) yields
// the same serialization.
std::string serialize_scenario(const Scenario& scenario);

struct StageRow {
  std::string scenario;
  std::string strategy;
  int k = 0;
  int replication = 0;
  int job = 0;
  int stage = 0;
  double completion_s = 0.0;
  double sync_delay_s = 0.0;
  double idle_cpu_s = 0.0;
  double bottleneck_mix = 1.0;  // fraction of tasks that were CPU-bound
};

struct SummaryRow {
  std::string scenario;
  std::string strategy;
  int k = 0;
  double mean_completion_s = 0.0;
  double stddev_s = 0.0;  // sample standard deviation of run makespans
  double lo_1sigma = 0.0;  // mean -/+ sd/sqrt(reps)
  double hi_1sigma = 0.0;
  int replications = 0;
};

struct ScenarioResult {
  std::vector<StageRow> rows;
  std::vector<SummaryRow> summary;
};

// Runs every strategy for `replications` runs with seeds seed+0..seed+reps-1.
ScenarioResult run_experiment(const Scenario& scenario);

std::string stage_csv(const ScenarioResult& result);
std::string summary_csv(const ScenarioResult& result);

// Shipped scenario library.
std::vector<std::string> builtin_scenario_names();
std::string builtin_scenario_text(const std::string& name);

}  // namespace hemt
