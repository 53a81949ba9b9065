#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hemt/cluster.hpp"
#include "hemt/scheduler.hpp"
#include "hemt/storage.hpp"
#include "hemt/workload.hpp"

namespace hemt {

struct SimConfig {
  double sched_overhead = 0.1;  // seconds per task launch
  double io_setup = 0.05;       // seconds before a task's first read
  bool pipeline = true;         // task time = max(cpu, io); sum when false
  double shuffle_bw = 0.0;      // bytes/s per shuffle fetch; 0 = unlimited
};

void validate(const SimConfig& cfg);

enum class Bottleneck { Cpu, Net };

struct TaskRecord {
  int task_id = 0;
  std::int64_t size = 0;
  double start = 0.0;  // absolute simulation time
  double end = 0.0;
  int node = 0;
  Bottleneck bottleneck = Bottleneck::Cpu;
};

struct StageMetrics {
  double stage_start = 0.0;
  double completion = 0.0;               // absolute: max node finish
  std::vector<double> node_finish;       // absolute; stage_start if no work
  std::vector<double> node_last_start;   // start of each node's last task
  double sync_delay = 0.0;               // max finish - min finish
  double idle_cpu_s = 0.0;               // total idle executor-seconds
  std::vector<TaskRecord> tasks;

  double duration() const { return completion - stage_start; }
  double cpu_bound_fraction() const;
};

// Executes one stage. `tasks` are either consumed as a shared FIFO queue
// (pull=true) or pre-assigned one-per-node in index order (pull=false, task
// count must equal node count). Credit states are advanced in place; the
// clock starts at start_time. `replicas` covers every block the stage-0
// tasks touch; pass nullptr for stages that read no storage.
StageMetrics run_stage(const std::vector<NodeSpec>& nodes,
                       std::vector<CreditState>& credits,
                       const std::vector<Task>& tasks, bool pull,
                       const StorageConfig& storage, const ReplicaMap* replicas,
                       const SimConfig& cfg, double start_time,
                       std::mt19937_64& rng);

struct Claim1Witness {
  bool holds = false;
  double sync_delay = 0.0;
  double bound = 0.0;  // max single-task duration (attained on the slowest node)
};

// Checks the idle-time bound for a pull-based, even-task, constant-speed
// stage: sync delay never exceeds the longest single task duration.
Claim1Witness verify_claim1(const StageMetrics& metrics);

struct StrategyConfig {
  enum class Kind { HomtK, HemtStatic, HemtCredit, OaHemt };
  Kind kind = Kind::HemtStatic;
  int k = 2;                   // homt-k only
  double alpha = 0.0;          // oa-hemt forgetting factor
  ColdStartRule rule = ColdStartRule::Mean;
  bool probe = false;          // run probing tasks and apply the learned speeds
  double probe_fraction = 0.01;

  std::string label() const;
};

struct JobStageMetrics {
  int job = 0;
  int stage = 0;
  StageMetrics metrics;
};

struct RunResult {
  std::vector<JobStageMetrics> stages;
  double makespan = 0.0;  // clock at the end of the job sequence
};

// Runs a job sequence back-to-back under one strategy. Credits, the clock
// and (for oa-hemt) speed estimates persist across jobs; block placements
// for the input file are drawn once per run from the seeded generator.
RunResult run_jobs(const std::vector<Job>& jobs, const StrategyConfig& strategy,
                   const std::vector<NodeSpec>& nodes,
                   const StorageConfig& storage, const SimConfig& cfg,
                   std::uint64_t seed);

}  // namespace hemt
