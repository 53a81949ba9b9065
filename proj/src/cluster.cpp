#include "hemt/cluster.hpp"

#include <algorithm>
#include <stdexcept>

namespace hemt {

void validate(const NodeSpec& spec) {
  if (spec.kind == NodeKind::Static) {
    if (!(spec.capacity > 0.0 && spec.capacity <= 1.0))
      throw std::invalid_argument("node " + spec.id + ": capacity must be in (0,1]");
  } else {
    if (!(spec.baseline > 0.0 && spec.baseline <= 1.0))
      throw std::invalid_argument("node " + spec.id + ": baseline must be in (0,1]");
    if (spec.earn_rate < 0.0)
      throw std::invalid_argument("node " + spec.id + ": earn_rate must be >= 0");
    if (spec.cap_minutes() < 0.0)
      throw std::invalid_argument("node " + spec.id + ": credit_cap must be >= 0");
    if (spec.initial_credits < 0.0 || spec.initial_credits > spec.cap_minutes())
      throw std::invalid_argument("node " + spec.id + ": initial_credits outside [0, cap]");
  }
  double prev = -1.0;
  for (const auto& p : spec.interference) {
    if (p.start_time <= prev)
      throw std::invalid_argument("node " + spec.id + ": interference times must be strictly increasing");
    if (!(p.multiplier > 0.0 && p.multiplier <= 1.0))
      throw std::invalid_argument("node " + spec.id + ": interference multiplier must be in (0,1]");
    prev = p.start_time;
  }
}

double interference_multiplier(const NodeSpec& spec, double t) {
  double mult = 1.0;
  for (const auto& p : spec.interference) {
    if (p.start_time <= t)
      mult = p.multiplier;
    else
      break;
  }
  return mult;
}

double effective_speed(const NodeSpec& spec, const CreditState& credit, double t) {
  double base;
  if (spec.kind == NodeKind::Static)
    base = spec.capacity;
  else
    base = credit.credits > 0.0 ? 1.0 : spec.baseline;
  return base * interference_multiplier(spec, t);
}

CreditState advance_credits(const NodeSpec& spec, const CreditState& credit,
                            double busy_fraction, double dt) {
  if (dt < 0.0) throw std::invalid_argument("advance_credits: dt must be >= 0");
  if (busy_fraction < 0.0 || busy_fraction > 1.0)
    throw std::invalid_argument("advance_credits: busy_fraction must be in [0,1]");
  CreditState next = credit;
  next.last_update = credit.last_update + dt;
  if (spec.kind == NodeKind::Burstable) {
    double balance = credit.credits + (spec.earn_rate - busy_fraction) * dt / 60.0;
    next.credits = std::clamp(balance, 0.0, spec.cap_minutes());
  }
  return next;
}

double WorkFunction::value(double t) const {
  if (breakpoints.empty()) return 0.0;
  if (t <= breakpoints.front().t) return breakpoints.front().w;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    const auto& a = breakpoints[i - 1];
    const auto& b = breakpoints[i];
    if (t <= b.t) {
      double slope = (b.w - a.w) / (b.t - a.t);
      return a.w + slope * (t - a.t);
    }
  }
  const auto& last = breakpoints.back();
  return last.w + final_slope() * (t - last.t);
}

double WorkFunction::final_slope() const {
  if (breakpoints.size() < 2) return 0.0;
  const auto& a = breakpoints[breakpoints.size() - 2];
  const auto& b = breakpoints.back();
  return (b.w - a.w) / (b.t - a.t);
}

WorkFunction build_work_function(const NodeSpec& spec, double initial_credits,
                                 double horizon) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("build_work_function: horizon must be > 0");
  WorkFunction wf;
  wf.breakpoints.push_back({0.0, 0.0});
  if (spec.kind == NodeKind::Static) {
    wf.breakpoints.push_back({horizon, spec.capacity * horizon});
    return wf;
  }
  // Busy burstable node: net burn is (1 - earn_rate) credits per minute.
  double burn = 1.0 - spec.earn_rate;
  if (initial_credits > 0.0 && burn > 0.0) {
    double depletion_s = initial_credits / burn * 60.0;
    if (depletion_s < horizon) {
      wf.breakpoints.push_back({depletion_s, depletion_s});
      wf.breakpoints.push_back(
          {horizon, depletion_s + spec.baseline * (horizon - depletion_s)});
    } else {
      wf.breakpoints.push_back({horizon, horizon});
    }
  } else if (initial_credits > 0.0) {
    // earn_rate >= 1: credits never drain while busy.
    wf.breakpoints.push_back({horizon, horizon});
  } else {
    wf.breakpoints.push_back({horizon, spec.baseline * horizon});
  }
  return wf;
}

}  // namespace hemt
