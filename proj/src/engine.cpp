#include "hemt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace hemt {

namespace {

constexpr double kTimeTol = 1e-9;
constexpr double kByteTol = 1e-6;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct ActiveTask {
  Task task;
  double start = 0.0;
  double overhead_left = 0.0;
  double setup_left = 0.0;
  double cpu_left = 0.0;   // full-CPU seconds
  double io_pos = 0.0;     // absolute byte offset (storage reads)
  double io_end = 0.0;
  double block_left = 0.0;
  int datanode = -1;       // -1 until a replica is chosen
  bool had_io = false;
  bool io_started = false;
  double cpu_done_at = -1.0;
  double io_done_at = -1.0;

  double io_left() const { return io_end - io_pos; }
  bool overhead_done() const { return overhead_left <= 0.0; }
  bool setup_done() const { return !had_io || setup_left <= 0.0; }
  bool io_done() const { return io_done_at >= 0.0; }
  bool cpu_done() const { return cpu_done_at >= 0.0; }
  bool io_active() const { return overhead_done() && setup_done() && !io_done(); }
};

struct NodeRuntime {
  bool occupied = false;
  ActiveTask active;
  double busy_seconds = 0.0;
  double finish = 0.0;
  double last_start = 0.0;
};

bool cpu_active(const ActiveTask& a, bool pipeline) {
  if (!a.overhead_done() || a.cpu_done()) return false;
  if (!pipeline && !a.io_done()) return false;
  return true;
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.sched_overhead < 0.0 || cfg.io_setup < 0.0)
    throw std::invalid_argument("sim: overheads must be >= 0");
  if (cfg.shuffle_bw < 0.0)
    throw std::invalid_argument("sim: shuffle_bw must be >= 0");
}

double StageMetrics::cpu_bound_fraction() const {
  if (tasks.empty()) return 1.0;
  int cpu = 0;
  for (const auto& t : tasks)
    if (t.bottleneck == Bottleneck::Cpu) ++cpu;
  return static_cast<double>(cpu) / tasks.size();
}

StageMetrics run_stage(const std::vector<NodeSpec>& nodes,
                       std::vector<CreditState>& credits,
                       const std::vector<Task>& tasks, bool pull,
                       const StorageConfig& storage, const ReplicaMap* replicas,
                       const SimConfig& cfg, double start_time,
                       std::mt19937_64& rng) {
  validate(cfg);
  const std::size_t n = nodes.size();
  if (n == 0) throw std::invalid_argument("run_stage: no nodes");
  if (credits.size() != n) throw std::invalid_argument("run_stage: credit state count mismatch");
  if (!pull && tasks.size() != n)
    throw std::invalid_argument("run_stage: macrotask count must equal node count");
  for (const auto& t : tasks)
    if (t.reads_storage && replicas == nullptr)
      throw std::invalid_argument("run_stage: storage-reading task without replica map");

  std::deque<Task> pending(tasks.begin(), tasks.end());
  std::vector<NodeRuntime> rt(n);
  for (std::size_t i = 0; i < n; ++i) {
    rt[i].finish = start_time;
    rt[i].last_start = start_time;
  }

  StageMetrics metrics;
  metrics.stage_start = start_time;

  double now = start_time;
  const double bs = static_cast<double>(storage.block_size);

  auto start_task = [&](std::size_t i, const Task& task) {
    ActiveTask a;
    a.task = task;
    a.start = now;
    a.overhead_left = cfg.sched_overhead;
    a.cpu_left = task.work_per_byte * static_cast<double>(task.input_size);
    a.had_io = task.input_size > 0;
    a.setup_left = a.had_io ? cfg.io_setup : 0.0;
    if (task.reads_storage) {
      a.io_pos = static_cast<double>(task.input_offset);
      a.io_end = a.io_pos + static_cast<double>(task.input_size);
    } else {
      a.io_pos = 0.0;
      a.io_end = static_cast<double>(task.input_size);
    }
    rt[i].occupied = true;
    rt[i].active = a;
    rt[i].last_start = now;
  };

  auto assign_idle = [&]() {
    if (!pull) return false;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (rt[i].occupied) continue;
      if (auto t = pull_next(pending)) {
        start_task(i, *t);
        changed = true;
      }
    }
    return changed;
  };

  // Macrotask mode: hand out all tasks up front, one per node.
  if (!pull) {
    for (std::size_t i = 0; i < n; ++i) start_task(i, tasks[i]);
    pending.clear();
  }

  auto readers_on = [&](int datanode) {
    int count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (rt[i].occupied && rt[i].active.io_active() &&
          rt[i].active.datanode == datanode)
        ++count;
    return count;
  };

  auto io_rate = [&](const ActiveTask& a) {
    if (!a.io_active()) return 0.0;
    if (a.task.reads_storage)
      return uplink_rate(readers_on(a.datanode), storage);
    return cfg.shuffle_bw > 0.0 ? cfg.shuffle_bw : kInf;
  };

  auto begin_block = [&](ActiveTask& a) {
    auto idx = static_cast<std::int64_t>(std::floor(a.io_pos / bs + 1e-9));
    auto it = replicas->placements.find(idx);
    if (it == replicas->placements.end())
      throw std::invalid_argument("run_stage: no replica placement for block");
    a.datanode = select_read_node(rng, it->second);
    double block_end = static_cast<double>(idx + 1) * bs;
    a.block_left = std::min(a.io_end, block_end) - a.io_pos;
  };

  // Resolves every zero-duration transition at the current instant: phase
  // flips, instant shuffle fetches, block boundaries and task completions.
  auto settle = [&]() {
    bool any_change = false;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!rt[i].occupied) continue;
        ActiveTask& a = rt[i].active;
        if (!a.overhead_done() && a.overhead_left <= kTimeTol) {
          a.overhead_left = 0.0;
          changed = true;
        }
        if (a.overhead_done() && a.had_io && !a.setup_done() && a.setup_left <= kTimeTol) {
          a.setup_left = 0.0;
          changed = true;
        }
        if (a.overhead_done() && a.setup_done() && !a.io_started && !a.io_done()) {
          a.io_started = true;
          changed = true;
          if (a.io_left() <= kByteTol) {
            a.io_done_at = now;
          } else if (a.task.reads_storage) {
            begin_block(a);
          } else if (cfg.shuffle_bw <= 0.0) {
            a.io_pos = a.io_end;  // unlimited bandwidth: instant fetch
            a.io_done_at = now;
          } else {
            a.block_left = a.io_left();
          }
        }
        if (a.io_started && !a.io_done() && a.block_left <= kByteTol) {
          if (a.io_left() <= kByteTol) {
            a.io_pos = a.io_end;
            a.io_done_at = now;
          } else if (a.task.reads_storage) {
            auto idx = static_cast<std::int64_t>(std::floor(a.io_pos / bs + 0.5));
            a.io_pos = static_cast<double>(idx) * bs;  // snap to the boundary
            begin_block(a);
          }
          changed = true;
        }
        if (cpu_active(a, cfg.pipeline) && a.cpu_left <= kTimeTol) {
          a.cpu_left = 0.0;
          a.cpu_done_at = now;
          changed = true;
        }
        if (a.overhead_done() && a.cpu_left <= kTimeTol && !a.cpu_done() &&
            (cfg.pipeline || a.io_done())) {
          a.cpu_done_at = now;  // zero-CPU task
          changed = true;
        }
        if (a.cpu_done() && (a.io_done() || !a.had_io)) {
          TaskRecord rec;
          rec.task_id = a.task.id;
          rec.size = a.task.input_size;
          rec.start = a.start;
          rec.end = now;
          rec.node = static_cast<int>(i);
          double io_at = a.io_done() ? a.io_done_at : a.start;
          rec.bottleneck = io_at > a.cpu_done_at + kTimeTol ? Bottleneck::Net
                                                            : Bottleneck::Cpu;
          metrics.tasks.push_back(rec);
          rt[i].finish = now;
          rt[i].occupied = false;
          changed = true;
        }
      }
      if (changed) any_change = true;
    }
    return any_change;
  };

  while (true) {
    bool changed = true;
    while (changed) {
      changed = assign_idle();
      if (settle()) changed = true;
    }
    bool any_active = false;
    for (const auto& r : rt) any_active |= r.occupied;
    if (!any_active) break;

    // Speeds are piecewise constant until the next event; capture them now.
    std::vector<double> speed(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      speed[i] = effective_speed(nodes[i], credits[i], now);

    double dt = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const NodeSpec& spec = nodes[i];
      bool node_cpu_active =
          rt[i].occupied && cpu_active(rt[i].active, cfg.pipeline);
      if (rt[i].occupied) {
        const ActiveTask& a = rt[i].active;
        if (!a.overhead_done()) {
          dt = std::min(dt, a.overhead_left);
        } else if (a.had_io && !a.setup_done()) {
          dt = std::min(dt, a.setup_left);
        } else {
          if (a.io_active()) {
            double rate = io_rate(a);
            if (rate < kInf && rate > 0.0) dt = std::min(dt, a.block_left / rate);
          }
          if (node_cpu_active && speed[i] > 0.0)
            dt = std::min(dt, a.cpu_left / speed[i]);
        }
      }
      if (spec.kind == NodeKind::Burstable) {
        if (node_cpu_active && credits[i].credits > 0.0 && spec.earn_rate < 1.0) {
          dt = std::min(dt, credits[i].credits * 60.0 / (1.0 - spec.earn_rate));
        } else if (!node_cpu_active && spec.earn_rate > 0.0 &&
                   credits[i].credits < spec.cap_minutes()) {
          dt = std::min(dt,
                        (spec.cap_minutes() - credits[i].credits) * 60.0 / spec.earn_rate);
        }
      }
      if (node_cpu_active) {
        for (const auto& p : spec.interference)
          if (p.start_time > now + kTimeTol) {
            dt = std::min(dt, p.start_time - now);
            break;
          }
      }
    }
    if (!(dt > 0.0) || dt == kInf)
      throw std::logic_error("run_stage: stalled event loop");

    for (std::size_t i = 0; i < n; ++i) {
      bool node_cpu_active =
          rt[i].occupied && cpu_active(rt[i].active, cfg.pipeline);
      double busy = 0.0;
      if (node_cpu_active && nodes[i].kind == NodeKind::Burstable)
        busy = credits[i].credits > 0.0 ? 1.0 : nodes[i].baseline;
      credits[i] = advance_credits(nodes[i], credits[i], busy, dt);
      if (rt[i].occupied) {
        rt[i].busy_seconds += dt;
        ActiveTask& a = rt[i].active;
        if (!a.overhead_done()) {
          a.overhead_left -= dt;
        } else if (a.had_io && !a.setup_done()) {
          a.setup_left -= dt;
        } else {
          if (a.io_active()) {
            double bytes = io_rate(a) * dt;
            a.io_pos += bytes;
            a.block_left -= bytes;
          }
          if (node_cpu_active) a.cpu_left -= speed[i] * dt;
        }
      }
    }
    now += dt;
  }

  metrics.completion = start_time;
  double min_finish = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    metrics.node_finish.push_back(rt[i].finish);
    metrics.node_last_start.push_back(rt[i].last_start);
    metrics.completion = std::max(metrics.completion, rt[i].finish);
    min_finish = std::min(min_finish, rt[i].finish);
  }
  metrics.sync_delay = metrics.completion - min_finish;
  metrics.idle_cpu_s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    metrics.idle_cpu_s += metrics.duration() - rt[i].busy_seconds;
  return metrics;
}

Claim1Witness verify_claim1(const StageMetrics& metrics) {
  Claim1Witness w;
  w.sync_delay = metrics.sync_delay;
  for (const auto& t : metrics.tasks)
    w.bound = std::max(w.bound, t.end - t.start);
  w.holds = w.sync_delay <= w.bound + kTimeTol;
  return w;
}

std::string StrategyConfig::label() const {
  switch (kind) {
    case Kind::HomtK: return "homt-" + std::to_string(k);
    case Kind::HemtStatic: return "hemt-static";
    case Kind::HemtCredit: return "hemt-credit";
    case Kind::OaHemt: return "oa-hemt";
  }
  return "?";
}

namespace {

std::vector<double> nominal_weights(const std::vector<NodeSpec>& nodes) {
  std::vector<double> w;
  for (const auto& s : nodes)
    w.push_back(s.kind == NodeKind::Static ? s.capacity : s.baseline);
  return w;
}

std::vector<Task> make_tasks(const std::vector<std::int64_t>& sizes,
                             const Stage& stage) {
  std::vector<Task> tasks;
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Task t;
    t.id = static_cast<int>(i);
    t.stage = stage.id;
    t.input_size = sizes[i];
    t.input_offset = offset;
    t.work_per_byte = stage.work_per_byte;
    t.reads_storage = stage.reads_storage;
    offset += sizes[i];
    tasks.push_back(t);
  }
  return tasks;
}

void check_dag(const Job& job) {
  std::vector<int> seen;
  for (const auto& stage : job.stages) {
    for (int d : stage.deps)
      if (std::find(seen.begin(), seen.end(), d) == seen.end())
        throw std::invalid_argument("run_jobs: stage dependency not satisfied (cyclic or unordered DAG)");
    seen.push_back(stage.id);
  }
}

}  // namespace

RunResult run_jobs(const std::vector<Job>& jobs, const StrategyConfig& strategy,
                   const std::vector<NodeSpec>& nodes,
                   const StorageConfig& storage, const SimConfig& cfg,
                   std::uint64_t seed) {
  if (nodes.empty()) throw std::invalid_argument("run_jobs: no nodes");
  for (const auto& s : nodes) validate(s);
  validate(storage);
  validate(cfg);
  for (const auto& j : jobs) check_dag(j);

  std::mt19937_64 rng(seed);
  const std::size_t n = nodes.size();

  std::vector<CreditState> credits(n);
  for (std::size_t i = 0; i < n; ++i)
    credits[i].credits = nodes[i].initial_credits;

  // One input file per run; every stage-0 read goes through it.
  std::int64_t max_input = 0;
  for (const auto& job : jobs)
    for (const auto& stage : job.stages)
      if (stage.reads_storage) max_input = std::max(max_input, stage.input_bytes);
  ReplicaMap replicas;
  std::int64_t nblocks = (max_input + storage.block_size - 1) / storage.block_size;
  for (std::int64_t b = 0; b < std::max<std::int64_t>(nblocks, 1); ++b)
    replicas.placements[b] = place_block(rng, storage);

  SpeedEstimate est;
  est.alpha = strategy.alpha;
  est.rule = strategy.rule;
  ExecutorPool pool;
  for (const auto& s : nodes) pool.executors.push_back(s.id);

  std::vector<double> probe_speeds;  // learned once, reused for later plans

  RunResult result;
  double clock = 0.0;

  auto credit_weights = [&](double w0) {
    std::vector<WorkFunction> funcs;
    double min_slope_sum = 0.0;
    double max_depletion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = nodes[i];
      min_slope_sum += s.kind == NodeKind::Static ? s.capacity : s.baseline;
      if (s.kind == NodeKind::Burstable && s.earn_rate < 1.0)
        max_depletion = std::max(max_depletion,
                                 credits[i].credits * 60.0 / (1.0 - s.earn_rate));
    }
    double horizon = max_depletion + w0 / std::max(min_slope_sum, 1e-9) + 60.0;
    for (std::size_t i = 0; i < n; ++i)
      funcs.push_back(build_work_function(nodes[i], credits[i].credits, horizon));
    return plan_credit_based(funcs, w0, 1);  // sizes filled by the caller
  };

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    for (const auto& stage : job.stages) {
      const std::int64_t bytes = stage.input_bytes;
      bool shuffle_stage = !stage.deps.empty();

      std::vector<std::int64_t> sizes;
      std::vector<double> weights;
      bool pull = false;

      switch (strategy.kind) {
        case StrategyConfig::Kind::HomtK:
          sizes = partition_even(bytes, strategy.k);
          pull = true;
          break;
        case StrategyConfig::Kind::HemtStatic:
          weights = nominal_weights(nodes);
          break;
        case StrategyConfig::Kind::HemtCredit: {
          double w0 = static_cast<double>(bytes) * stage.work_per_byte;
          if (w0 > 0.0)
            weights = credit_weights(w0).weights;
          else
            weights.assign(n, 1.0);
          break;
        }
        case StrategyConfig::Kind::OaHemt: {
          pool.newcomers.clear();
          for (const auto& e : pool.executors)
            if (!est.known(e)) pool.newcomers.insert(e);
          PartitionPlan plan = plan_adaptive(est, pool, bytes);
          weights = plan.weights;
          break;
        }
      }

      if (!pull) {
        // Probing: one short trial task per executor before the first real
        // stage, excluded from the reported metrics.
        if (strategy.probe && probe_speeds.empty() &&
            strategy.kind != StrategyConfig::Kind::OaHemt) {
          std::int64_t probe_size = std::max<std::int64_t>(
              1, std::llround(strategy.probe_fraction * static_cast<double>(bytes)));
          Stage probe_stage = stage;
          std::vector<std::int64_t> probe_sizes(n, probe_size);
          auto probe_tasks = make_tasks(probe_sizes, probe_stage);
          StageMetrics pm = run_stage(nodes, credits, probe_tasks, false, storage,
                                      &replicas, cfg, clock, rng);
          clock = pm.completion;
          for (std::size_t i = 0; i < n; ++i) {
            double t = pm.node_finish[i] - pm.stage_start;
            probe_speeds.push_back(static_cast<double>(probe_size) / t);
          }
        }
        if (!probe_speeds.empty()) weights = probe_speeds;

        if (shuffle_stage) {
          // Bucket masses follow the skewed hash partitioner's residue
          // arithmetic, which is exactly proportional to the quantized
          // capacities over a full cycle.
          auto caps = quantize_weights(weights);
          std::vector<double> capw(caps.begin(), caps.end());
          sizes = partition_proportional(bytes, capw);
        } else {
          sizes = partition_proportional(bytes, weights);
        }
      } else if (shuffle_stage) {
        sizes = partition_even(bytes, strategy.k);
      }

      std::int64_t total = 0;
      for (auto s : sizes) total += s;
      if (total != bytes)
        throw std::logic_error("run_jobs: plan does not cover the stage input");

      auto tasks = make_tasks(sizes, stage);
      StageMetrics metrics =
          run_stage(nodes, credits, tasks, pull, storage, &replicas, cfg, clock, rng);
      clock = metrics.completion;

      if (strategy.kind == StrategyConfig::Kind::OaHemt) {
        for (std::size_t i = 0; i < n; ++i) {
          std::int64_t processed = 0;
          for (const auto& rec : metrics.tasks)
            if (rec.node == static_cast<int>(i)) processed += rec.size;
          double t = metrics.node_finish[i] - metrics.stage_start;
          if (processed > 0 && t > 0.0)
            est = update_speed(est, nodes[i].id, processed, t);
        }
      }

      result.stages.push_back({static_cast<int>(j), stage.id, std::move(metrics)});
    }
  }
  result.makespan = clock;
  return result;
}

}  // namespace hemt
