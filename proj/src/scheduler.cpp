#include "hemt/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hemt {

std::optional<Task> pull_next(std::deque<Task>& pending) {
  if (pending.empty()) return std::nullopt;
  Task head = pending.front();
  pending.pop_front();
  return head;
}

SpeedEstimate update_speed(const SpeedEstimate& est, const std::string& executor,
                           std::int64_t bytes, double seconds) {
  if (bytes <= 0) throw std::invalid_argument("update_speed: bytes must be > 0");
  if (!(seconds > 0.0)) throw std::invalid_argument("update_speed: seconds must be > 0");
  SpeedEstimate next = est;
  double observed = static_cast<double>(bytes) / seconds;
  auto it = next.v.find(executor);
  if (it == next.v.end())
    next.v[executor] = observed;
  else
    it->second = (1.0 - est.alpha) * observed + est.alpha * it->second;
  return next;
}

SpeedEstimate cold_start(const SpeedEstimate& est, const ExecutorPool& pool) {
  SpeedEstimate next = est;
  double pooled = 0.0;
  int known = 0;
  for (const auto& e : pool.executors) {
    if (pool.newcomers.count(e) || !est.known(e)) continue;
    double v = est.v.at(e);
    switch (est.rule) {
      case ColdStartRule::Mean: pooled += v; break;
      case ColdStartRule::Min: pooled = known ? std::min(pooled, v) : v; break;
      case ColdStartRule::Max: pooled = known ? std::max(pooled, v) : v; break;
    }
    ++known;
  }
  if (known == 0) return next;
  if (est.rule == ColdStartRule::Mean) pooled /= known;
  for (const auto& e : pool.executors) {
    if (pool.newcomers.count(e) || !est.known(e)) next.v[e] = pooled;
  }
  return next;
}

PartitionPlan plan_adaptive(const SpeedEstimate& est, const ExecutorPool& pool,
                            std::int64_t total) {
  SpeedEstimate warmed = cold_start(est, pool);
  PartitionPlan plan;
  bool all_known = true;
  for (const auto& e : pool.executors)
    if (!warmed.known(e)) { all_known = false; break; }
  if (!all_known || pool.executors.empty()) {
    // First job for this type: nothing observed yet, split evenly.
    int k = std::max<int>(1, static_cast<int>(pool.executors.size()));
    plan.weights.assign(k, 1.0);
    plan.sizes = partition_even(total, k);
    plan.provenance = PlanProvenance::Even;
    return plan;
  }
  for (const auto& e : pool.executors) plan.weights.push_back(warmed.v.at(e));
  plan.sizes = partition_proportional(total, plan.weights);
  plan.provenance = PlanProvenance::Adaptive;
  return plan;
}

CreditPlanResult superpose_and_invert(const std::vector<WorkFunction>& funcs,
                                      double w0) {
  if (funcs.empty())
    throw std::invalid_argument("superpose_and_invert: no work functions");
  if (!(w0 > 0.0))
    throw std::invalid_argument("superpose_and_invert: w0 must be > 0");

  std::vector<double> times;
  for (const auto& f : funcs)
    for (const auto& bp : f.breakpoints) times.push_back(bp.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  auto total_at = [&](double t) {
    double w = 0.0;
    for (const auto& f : funcs) w += f.value(t);
    return w;
  };

  double t_prime = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < times.size(); ++i) {
    double wa = total_at(times[i - 1]);
    double wb = total_at(times[i]);
    if (w0 <= wb) {
      if (!(wb > wa))
        throw std::invalid_argument("superpose_and_invert: flat segment, cannot invert");
      t_prime = times[i - 1] + (w0 - wa) * (times[i] - times[i - 1]) / (wb - wa);
      break;
    }
  }
  if (std::isnan(t_prime)) {
    // Beyond the last breakpoint: extend every final slope.
    double slope = 0.0;
    for (const auto& f : funcs) slope += f.final_slope();
    if (!(slope > 0.0))
      throw std::invalid_argument("superpose_and_invert: zero total slope past horizon");
    double t_last = times.back();
    t_prime = t_last + (w0 - total_at(t_last)) / slope;
  }

  CreditPlanResult result;
  result.t_prime = t_prime;
  for (const auto& f : funcs) result.weights.push_back(f.value(t_prime));
  return result;
}

PartitionPlan plan_credit_based(const std::vector<WorkFunction>& funcs,
                                double w0, std::int64_t total) {
  CreditPlanResult inv = superpose_and_invert(funcs, w0);
  PartitionPlan plan;
  plan.weights = inv.weights;
  plan.sizes = partition_proportional(total, plan.weights);
  plan.provenance = PlanProvenance::CreditBased;
  return plan;
}

CalibrationResult calibrate_fudge(const PartitionPlan& plan, std::int64_t total,
                                  const std::vector<std::optional<ProbeObservation>>& probes) {
  CalibrationResult result;
  result.plan = plan;
  if (probes.size() != plan.weights.size()) return result;
  std::vector<double> speeds;
  for (const auto& p : probes) {
    if (!p || p->bytes <= 0 || !(p->seconds > 0.0)) return result;
    speeds.push_back(static_cast<double>(p->bytes) / p->seconds);
  }
  result.plan.weights = speeds;
  result.plan.sizes = partition_proportional(total, speeds);
  result.calibrated = true;
  return result;
}

}  // namespace hemt
