#pragma once

#include <string>
#include <vector>

namespace hemt {

// Piecewise-constant speed multiplier active from start_time onward.
struct InterferencePoint {
  double start_time = 0.0;
  double multiplier = 1.0;
};

enum class NodeKind { Static, Burstable };

// Compute-capacity model of one node. Static nodes run at a fixed core
// fraction; burstable nodes run at full speed while token-bucket credits
// last and at `baseline` afterwards. Credits are in credit-minutes (one
// credit = one full CPU for one minute), earned at earn_rate per minute
// while idle.
struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::Static;
  double capacity = 1.0;         // speed fraction, static kind
  double baseline = 0.2;         // speed fraction once credits hit zero
  double earn_rate = 0.2;        // credits per minute earned while idle
  double credit_cap = -1.0;      // credit-minutes; <0 means default cap
  double initial_credits = 0.0;  // credit-minutes at simulation start
  std::vector<InterferencePoint> interference;  // times strictly increasing

  // Default cap is a day's worth of earnings. Arbitrary; the shipped
  // scenarios keep horizons far below it.
  double cap_minutes() const {
    return credit_cap < 0.0 ? 24.0 * 60.0 * earn_rate : credit_cap;
  }
};

// Throws std::invalid_argument on any violated invariant.
void validate(const NodeSpec& spec);

struct CreditState {
  double credits = 0.0;      // credit-minutes
  double last_update = 0.0;  // seconds
};

double interference_multiplier(const NodeSpec& spec, double t);

// Instantaneous speed fraction at time t. Pure.
double effective_speed(const NodeSpec& spec, const CreditState& credit, double t);

// Advances the credit balance over dt seconds at the given CPU utilization.
// Net rate is (earn_rate - busy_fraction) per minute, clamped to [0, cap].
// The engine subdivides intervals at depletion/cap crossings so the clamp
// never hides flow mid-interval.
CreditState advance_credits(const NodeSpec& spec, const CreditState& credit,
                            double busy_fraction, double dt);

// Cumulative full-CPU-equivalent work (CPU-seconds) a node can complete by
// time t (seconds). Piecewise linear, W(0) = 0, extended past the last
// breakpoint with the final segment's slope.
struct WorkFunction {
  struct Breakpoint {
    double t = 0.0;
    double w = 0.0;
  };
  std::vector<Breakpoint> breakpoints;  // first entry is (0, 0)

  double value(double t) const;
  double final_slope() const;
};

// Predicted work curve for a node assumed continuously busy: slope 1.0 until
// the initial credits drain (net burn 1 - earn_rate per minute), slope
// `baseline` afterwards. Static nodes yield a single segment of slope
// `capacity`. initial_credits in credit-minutes, horizon in seconds.
WorkFunction build_work_function(const NodeSpec& spec, double initial_credits,
                                 double horizon);

}  // namespace hemt
