#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hemt/cluster.hpp"
#include "hemt/workload.hpp"

namespace hemt {

// Executors assigned to a job sequence; newcomers have never run this job
// type before.
struct ExecutorPool {
  std::vector<std::string> executors;
  std::set<std::string> newcomers;
};

enum class ColdStartRule { Mean, Min, Max };

// Workload-specific per-executor speed estimates (bytes/second), updated by
// a first-order autoregressive rule with forgetting factor alpha.
struct SpeedEstimate {
  std::map<std::string, double> v;
  double alpha = 0.3;
  ColdStartRule rule = ColdStartRule::Mean;

  bool known(const std::string& executor) const { return v.count(executor) > 0; }
};

// FIFO pull: removes and returns the head task; empty when the queue is
// drained. The caller guarantees the executor is idle.
std::optional<Task> pull_next(std::deque<Task>& pending);

// v_i <- (1-alpha) d_i/t_i + alpha v_i; the first observation for an
// executor sets v_i = d_i/t_i regardless of alpha.
SpeedEstimate update_speed(const SpeedEstimate& est, const std::string& executor,
                           std::int64_t bytes, double seconds);

// Gives every newcomer the pooled speed of the known executors (mean by
// default). A pool with no known executor is left untouched; the planner
// then degenerates to even partitioning.
SpeedEstimate cold_start(const SpeedEstimate& est, const ExecutorPool& pool);

// Proportional split by estimated speeds; even split when nothing is known.
PartitionPlan plan_adaptive(const SpeedEstimate& est, const ExecutorPool& pool,
                            std::int64_t total);

struct CreditPlanResult {
  double t_prime = 0.0;           // seconds
  std::vector<double> weights;    // W_i(t') per node, CPU-seconds
};

// Superposes the nodes' work functions into one piecewise-linear curve and
// solves sum_i W_i(t') = w0 on the containing segment. Past the last
// breakpoint the final slopes extend linearly.
CreditPlanResult superpose_and_invert(const std::vector<WorkFunction>& funcs,
                                      double w0);

PartitionPlan plan_credit_based(const std::vector<WorkFunction>& funcs,
                                double w0, std::int64_t total);

struct ProbeObservation {
  std::int64_t bytes = 0;
  double seconds = 0.0;
};

struct CalibrationResult {
  PartitionPlan plan;
  bool calibrated = false;  // false when observations were missing
};

// Replaces the plan's nominal weights with the speeds observed on short
// probing tasks (one per executor) and re-plans. Equivalent to one adaptive
// update with alpha = 0 on the probe data.
CalibrationResult calibrate_fudge(const PartitionPlan& plan, std::int64_t total,
                                  const std::vector<std::optional<ProbeObservation>>& probes);

}  // namespace hemt
