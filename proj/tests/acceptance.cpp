#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hemt/scenario.hpp"

using namespace hemt;

namespace {

void report(const std::string& name, bool ok) {
  std::printf("%s %s\n", ok ? "[PASS]" : "[FAIL]", name.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, name);
}

void subsets(int n, int r, int start, std::vector<int>& cur,
             std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == r) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, r, i + 1, cur, out);
    cur.pop_back();
  }
}

int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  int v = 0;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) ++v;
  return v;
}

std::map<std::string, double> summary_means(const ScenarioResult& result) {
  std::map<std::string, double> means;
  for (const auto& row : result.summary) means[row.strategy] = row.mean_completion_s;
  return means;
}

// homt-k means keyed by k, ascending.
std::vector<std::pair<int, double>> homt_curve(const ScenarioResult& result) {
  std::vector<std::pair<int, double>> curve;
  for (const auto& row : result.summary)
    if (row.strategy.rfind("homt-", 0) == 0)
      curve.emplace_back(row.k, row.mean_completion_s);
  std::sort(curve.begin(), curve.end());
  return curve;
}

}  // namespace

TEST_CASE("01 collision probabilities match exhaustive enumeration") {
  bool ok = true;
  for (int n = 1; n <= 8 && ok; ++n) {
    for (int r = 1; r <= n && ok; ++r) {
      StorageConfig cfg;
      cfg.datanodes = n;
      cfg.replication = r;
      auto closed = prob_diff_block(cfg);

      std::vector<std::vector<int>> all;
      std::vector<int> cur;
      subsets(n, r, 0, cur, all);
      std::map<int, double> pv_enum;
      double p2_enum = 0.0;
      const double pair_weight = 1.0 / (static_cast<double>(all.size()) * all.size());
      for (const auto& a : all) {
        for (const auto& b : all) {
          int v = intersection_size(a, b);
          pv_enum[v] += pair_weight;
          p2_enum += pair_weight * v / (static_cast<double>(r) * r);
        }
      }

      ok = ok && std::abs(prob_same_block(cfg) - 1.0 / r) < 1e-12;
      ok = ok && std::abs(closed.p2 - p2_enum) < 1e-12;
      double pv_sum = 0.0;
      for (const auto& [v, p] : closed.pv) {
        pv_sum += p;
        double ref = pv_enum.count(v) ? pv_enum[v] : 0.0;
        ok = ok && std::abs(p - ref) < 1e-12;
      }
      ok = ok && std::abs(pv_sum - 1.0) < 1e-12;
    }
  }
  report("collision closed forms vs exhaustive enumeration (n <= 8, 1e-12)", ok);
}

TEST_CASE("02 same-block collisions dominate, equality only at full replication") {
  bool ok = true;
  for (int n = 1; n <= 50 && ok; ++n) {
    for (int r = 1; r <= n && ok; ++r) {
      StorageConfig cfg;
      cfg.datanodes = n;
      cfg.replication = r;
      double p1 = prob_same_block(cfg);
      double p2 = prob_diff_block(cfg).p2;
      if (r == n)
        ok = std::abs(p1 - p2) < 1e-12;
      else
        ok = p1 - p2 > 1e-9;
    }
  }
  report("p1 >= p2 on the full grid n <= 50, equality iff r = n", ok);
}

TEST_CASE("03 monte carlo placement agrees with the closed forms") {
  StorageConfig cfg;
  cfg.datanodes = 4;
  cfg.replication = 2;
  const std::int64_t trials = 100000;
  auto est = estimate_collisions_mc(cfg, trials, 12345);
  double p1 = prob_same_block(cfg);
  double p2 = prob_diff_block(cfg).p2;
  double se1 = std::sqrt(p1 * (1.0 - p1) / trials);
  double se2 = std::sqrt(p2 * (1.0 - p2) / trials);
  bool ok = std::abs(est.p1_hat - p1) <= 3.0 * se1 &&
            std::abs(est.p2_hat - p2) <= 3.0 * se2;
  report("monte carlo p1/p2 within 3 standard errors at 1e5 trials", ok);
}

TEST_CASE("04 burstable work functions: worked example and three-node split") {
  NodeSpec b;
  b.kind = NodeKind::Burstable;
  b.baseline = 0.2;
  b.earn_rate = 0.2;
  auto wf4 = build_work_function(b, 4.0, 3600.0);
  bool ok = wf4.value(600.0) == 360.0;  // 6 CPU-minutes after 10 minutes

  std::vector<WorkFunction> trio = {build_work_function(b, 4.0, 7200.0),
                                    build_work_function(b, 8.0, 7200.0),
                                    build_work_function(b, 12.0, 7200.0)};
  const double w0 = 1200.0;  // 20 CPU-minutes
  auto plan = superpose_and_invert(trio, w0);
  double t_expected = 80.0 / 11.0 * 60.0;
  ok = ok && std::abs(plan.t_prime - t_expected) <= 1e-9 * t_expected;
  std::vector<double> expected = {w0 * 3.0 / 11.0, w0 * 4.0 / 11.0, w0 * 4.0 / 11.0};
  for (int i = 0; i < 3; ++i)
    ok = ok && std::abs(plan.weights[i] - expected[i]) <= 1e-9 * expected[i];
  report("credit planning worked example: W(10m) = 6, t' = 80/11 m, 3:4:4 split", ok);
}

TEST_CASE("05 pull-based sync delay never exceeds one task on the slowest node") {
  StorageConfig storage;
  storage.uplink_bw = 1e12;
  storage.block_size = 1LL << 30;
  SimConfig cfg;
  cfg.sched_overhead = 0.0;
  cfg.io_setup = 0.0;
  std::mt19937_64 seeds(777);
  std::uniform_real_distribution<double> speed_dist(0.2, 1.0);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    int n = 2 + static_cast<int>(seeds() % 7);
    std::vector<NodeSpec> nodes;
    for (int i = 0; i < n; ++i) {
      NodeSpec s;
      s.id = "n" + std::to_string(i);
      s.capacity = speed_dist(seeds);
      nodes.push_back(s);
    }
    std::vector<CreditState> credits(n);
    int k = n + static_cast<int>(seeds() % (64 - n + 1));
    auto sizes = partition_even(1 << 22, k);
    std::vector<Task> tasks;
    std::int64_t off = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      Task t;
      t.id = static_cast<int>(i);
      t.input_size = sizes[i];
      t.input_offset = off;
      t.work_per_byte = 1e-5;
      off += sizes[i];
      tasks.push_back(t);
    }
    std::mt19937_64 rng(trial);
    auto m = run_stage(nodes, credits, tasks, true, storage, nullptr, cfg, 0.0, rng);
    auto w = verify_claim1(m);
    ok = w.holds && w.sync_delay <= w.bound + 1e-9;
  }
  report("sync delay bound holds on 100 randomized pull-based stages", ok);
}

TEST_CASE("06 adaptive speeds with zero forgetting balance from the third job") {
  JobParams p;
  p.input_bytes = 1 << 26;
  p.work_per_byte = 1e-6;
  p.shuffle_ratio = 0.01;
  auto one = build_job(JobKind::WordCount, p);
  std::vector<Job> jobs;
  for (int i = 0; i < 6; ++i) jobs.insert(jobs.end(), one.begin(), one.end());

  NodeSpec fast, slow;
  fast.id = "fast";
  fast.capacity = 1.0;
  slow.id = "slow";
  slow.capacity = 0.4;
  StorageConfig storage;
  storage.uplink_bw = 1e9;
  storage.block_size = 1 << 26;
  StrategyConfig strategy;
  strategy.kind = StrategyConfig::Kind::OaHemt;
  strategy.alpha = 0.0;

  auto run = run_jobs(jobs, strategy, {fast, slow}, storage, SimConfig{}, 77);
  bool ok = !run.stages.empty();
  for (const auto& js : run.stages) {
    if (js.job < 2) continue;
    ok = ok && js.metrics.sync_delay < 0.01 * js.metrics.duration();
  }
  report("oa speed learning: sync delay < 1% of stage time from job 3 on", ok);
}

TEST_CASE("07 task-size sweep: interior optimum, macro plan at or below it") {
  auto result = run_experiment(parse_scenario(builtin_scenario_text("container04")));
  auto curve = homt_curve(result);
  auto means = summary_means(result);
  bool ok = curve.size() >= 3 && means.count("hemt-static") > 0;
  if (ok) {
    auto best = std::min_element(curve.begin(), curve.end(),
                                 [](auto& a, auto& b) { return a.second < b.second; });
    ok = best != curve.begin() && best != curve.end() - 1;      // interior minimum
    ok = ok && means["hemt-static"] <= best->second + 1e-9;     // macro at or below
    ok = ok && means["hemt-static"] <= 0.9 * curve.front().second;  // >= 10% vs coarsest
  }
  report("heterogeneous 2-node sweep: U-shaped homt curve, hemt-static wins by >= 10%", ok);
}

TEST_CASE("08 storage contention grows with task count") {
  auto result = run_experiment(parse_scenario(builtin_scenario_text("hdfs-contention")));
  auto curve = homt_curve(result);
  bool ok = !curve.empty();
  for (std::size_t i = 1; i < curve.size() && ok; ++i) {
    if (curve[i].first < 8 || curve[i - 1].first < 8) continue;
    ok = curve[i].second >= curve[i - 1].second - 1e-9;
  }
  report("mean completion nondecreasing in k for k >= 8 under shared uplinks", ok);
}

TEST_CASE("09 skewed hash partitioner hits the 3:4:4 target") {
  std::vector<double> capacities = {0.3, 0.4, 0.4};
  auto weights = quantize_weights(capacities);
  bool ok = weights == std::vector<std::int64_t>{3, 4, 4};

  std::map<int, int> counts;
  for (int h = 0; h < 11; ++h) ++counts[skewed_bucket(h, weights)];
  ok = ok && counts[0] == 3 && counts[1] == 4 && counts[2] == 4;

  std::mt19937_64 rng(99);
  const int draws = 100000;
  std::map<int, int> freq;
  for (int i = 0; i < draws; ++i)
    ++freq[skewed_bucket(static_cast<std::int64_t>(rng()), weights)];
  std::vector<double> target = {3.0 / 11.0, 4.0 / 11.0, 4.0 / 11.0};
  for (int b = 0; b < 3; ++b)
    ok = ok && std::abs(static_cast<double>(freq[b]) / draws - target[b]) < 0.01;
  report("skewed partitioner: exact residue cycle and 1e5-hash frequencies", ok);
}

TEST_CASE("10 every shipped scenario is bit-for-bit reproducible") {
  bool ok = true;
  for (const auto& name : builtin_scenario_names()) {
    auto scenario = parse_scenario(builtin_scenario_text(name));
    auto r1 = run_experiment(scenario);
    auto r2 = run_experiment(scenario);
    ok = ok && stage_csv(r1) == stage_csv(r2) && summary_csv(r1) == summary_csv(r2);
  }
  report("identical seeds reproduce identical csv output for all scenarios", ok);
}

TEST_CASE("11 iteration count amplifies the cost of uniform tasking") {
  auto kmeans = run_experiment(parse_scenario(builtin_scenario_text("kmeans30")));
  auto pagerank = run_experiment(parse_scenario(builtin_scenario_text("pagerank100")));
  auto km_curve = homt_curve(kmeans);
  auto pr_curve = homt_curve(pagerank);
  auto km_means = summary_means(kmeans);
  auto pr_means = summary_means(pagerank);

  auto best = [](const std::vector<std::pair<int, double>>& c) {
    double m = c.front().second;
    for (const auto& [k, v] : c) m = std::min(m, v);
    return m;
  };
  auto at_k = [](const std::vector<std::pair<int, double>>& c, int k) {
    for (const auto& [kk, v] : c)
      if (kk == k) return v;
    return -1.0;
  };

  bool ok = !km_curve.empty() && !pr_curve.empty();
  if (ok) {
    ok = km_means["hemt-static"] < best(km_curve) &&
         pr_means["hemt-static"] < best(pr_curve);
    double km_penalty = at_k(km_curve, 64) / best(km_curve);
    double pr_penalty = at_k(pr_curve, 64) / best(pr_curve);
    ok = ok && km_penalty > 0 && pr_penalty > km_penalty;
  }
  report("hemt-static beats homt on both iterative jobs; pagerank punishes k=64 harder", ok);
}
