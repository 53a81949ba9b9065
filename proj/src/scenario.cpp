#include "hemt/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace hemt {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("scenario: unknown key '" + where + "." + it.key() + "'");
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key))
    throw std::invalid_argument("scenario: missing required field '" + where + "." + key + "'");
  if (!obj[key].is_number())
    throw std::invalid_argument("scenario: '" + where + "." + key + "' must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& where, const std::string& key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw std::invalid_argument("scenario: '" + where + "." + key + "' must be a number");
  return obj[key].get<double>();
}

std::string require_string(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw std::invalid_argument("scenario: missing or non-string field '" + where + "." + key + "'");
  return obj[key].get<std::string>();
}

constexpr double kMiB = 1048576.0;
constexpr double kMbps = 1e6 / 8.0;  // bytes/second

std::int64_t mib_to_bytes(double mib) {
  return static_cast<std::int64_t>(std::llround(mib * kMiB));
}

NodeSpec parse_node(const json& jn, const std::string& where) {
  check_keys(jn, where,
             {"id", "kind", "capacity", "baseline", "earn_rate", "credit_cap",
              "initial_credits", "interference"});
  NodeSpec spec;
  spec.id = require_string(jn, where, "id");
  std::string kind = jn.contains("kind") ? jn["kind"].get<std::string>() : "static";
  if (kind == "static")
    spec.kind = NodeKind::Static;
  else if (kind == "burstable")
    spec.kind = NodeKind::Burstable;
  else
    throw std::invalid_argument("scenario: '" + where + ".kind' must be static or burstable");
  spec.capacity = number_or(jn, where, "capacity", 1.0);
  spec.baseline = number_or(jn, where, "baseline", 0.2);
  spec.earn_rate = number_or(jn, where, "earn_rate", spec.baseline);
  spec.credit_cap = number_or(jn, where, "credit_cap", -1.0);
  spec.initial_credits = number_or(jn, where, "initial_credits", 0.0);
  if (jn.contains("interference")) {
    for (const auto& pair : jn["interference"]) {
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("scenario: '" + where + ".interference' entries must be [time, multiplier]");
      spec.interference.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
  }
  validate(spec);
  return spec;
}

StrategyConfig parse_strategy(const json& js, const std::string& where) {
  check_keys(js, where, {"name", "k", "alpha", "cold_start", "probe", "probe_fraction"});
  StrategyConfig cfg;
  std::string name = require_string(js, where, "name");
  if (name == "homt-k") {
    cfg.kind = StrategyConfig::Kind::HomtK;
    if (!js.contains("k"))
      throw std::invalid_argument("scenario: strategy homt-k requires '" + where + ".k'");
    cfg.k = js["k"].get<int>();
    if (cfg.k < 1)
      throw std::invalid_argument("scenario: '" + where + ".k' must be >= 1");
  } else if (name == "hemt-static") {
    cfg.kind = StrategyConfig::Kind::HemtStatic;
  } else if (name == "hemt-credit") {
    cfg.kind = StrategyConfig::Kind::HemtCredit;
  } else if (name == "oa-hemt") {
    cfg.kind = StrategyConfig::Kind::OaHemt;
  } else {
    throw std::invalid_argument("scenario: unknown strategy '" + name + "' at " + where);
  }
  cfg.alpha = number_or(js, where, "alpha", 0.0);
  if (cfg.alpha < 0.0 || cfg.alpha >= 1.0)
    throw std::invalid_argument("scenario: '" + where + ".alpha' must be in [0,1)");
  std::string rule = js.contains("cold_start") ? js["cold_start"].get<std::string>() : "mean";
  if (rule == "mean")
    cfg.rule = ColdStartRule::Mean;
  else if (rule == "min")
    cfg.rule = ColdStartRule::Min;
  else if (rule == "max")
    cfg.rule = ColdStartRule::Max;
  else
    throw std::invalid_argument("scenario: '" + where + ".cold_start' must be mean, min or max");
  cfg.probe = js.contains("probe") && js["probe"].get<bool>();
  cfg.probe_fraction = number_or(js, where, "probe_fraction", 0.01);
  if (!(cfg.probe_fraction > 0.0) || cfg.probe_fraction > 1.0)
    throw std::invalid_argument("scenario: '" + where + ".probe_fraction' must be in (0,1]");
  return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: malformed JSON: ") + e.what());
  }
  check_keys(root, "scenario",
             {"name", "nodes", "storage", "job", "strategies", "sim",
              "replications", "seed"});

  Scenario s;
  s.name = require_string(root, "scenario", "name");

  if (!root.contains("nodes") || !root["nodes"].is_array() || root["nodes"].empty())
    throw std::invalid_argument("scenario: 'nodes' must be a nonempty array");
  for (std::size_t i = 0; i < root["nodes"].size(); ++i)
    s.nodes.push_back(parse_node(root["nodes"][i], "nodes[" + std::to_string(i) + "]"));

  const json jst = root.contains("storage") ? root["storage"] : json::object();
  check_keys(jst, "storage", {"datanodes", "replication", "uplink_mbps", "block_mib"});
  s.storage.datanodes = static_cast<int>(number_or(jst, "storage", "datanodes", 4));
  s.storage.replication = static_cast<int>(number_or(jst, "storage", "replication", 2));
  s.storage.uplink_bw = number_or(jst, "storage", "uplink_mbps", 600.0) * kMbps;
  s.storage.block_size = mib_to_bytes(number_or(jst, "storage", "block_mib", 128.0));
  validate(s.storage);

  if (!root.contains("job"))
    throw std::invalid_argument("scenario: missing required field 'job'");
  const json& jj = root["job"];
  check_keys(jj, "job",
             {"kind", "input_mib", "iterations", "count", "work_per_mib", "shuffle_ratio"});
  s.job_kind = job_kind_from_string(require_string(jj, "job", "kind"));
  s.job.input_bytes = mib_to_bytes(require_number(jj, "job", "input_mib"));
  s.job.iterations = static_cast<int>(number_or(jj, "job", "iterations",
      s.job_kind == JobKind::KMeans ? 30 : (s.job_kind == JobKind::PageRank ? 100 : 1)));
  s.job.work_per_byte = require_number(jj, "job", "work_per_mib") / kMiB;
  s.job.shuffle_ratio = number_or(jj, "job", "shuffle_ratio",
                                  s.job_kind == JobKind::PageRank ? 1.0 : 0.01);
  s.job_count = static_cast<int>(number_or(jj, "job", "count", 1));
  if (s.job_count < 1)
    throw std::invalid_argument("scenario: 'job.count' must be >= 1");

  if (!root.contains("strategies") || !root["strategies"].is_array() ||
      root["strategies"].empty())
    throw std::invalid_argument("scenario: 'strategies' must be a nonempty array");
  for (std::size_t i = 0; i < root["strategies"].size(); ++i)
    s.strategies.push_back(
        parse_strategy(root["strategies"][i], "strategies[" + std::to_string(i) + "]"));

  const json jsim = root.contains("sim") ? root["sim"] : json::object();
  check_keys(jsim, "sim", {"sched_overhead_s", "io_setup_s", "pipeline", "shuffle_mbps"});
  s.sim.sched_overhead = number_or(jsim, "sim", "sched_overhead_s", 0.1);
  s.sim.io_setup = number_or(jsim, "sim", "io_setup_s", 0.05);
  s.sim.pipeline = !jsim.contains("pipeline") || jsim["pipeline"].get<bool>();
  s.sim.shuffle_bw = number_or(jsim, "sim", "shuffle_mbps", 0.0) * kMbps;
  validate(s.sim);

  s.replications = static_cast<int>(number_or(root, "scenario", "replications", 1));
  if (s.replications < 1)
    throw std::invalid_argument("scenario: 'replications' must be >= 1");
  s.seed = static_cast<std::uint64_t>(number_or(root, "scenario", "seed", 1));
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["name"] = s.name;
  root["nodes"] = json::array();
  for (const auto& nspec : s.nodes) {
    json jn;
    jn["id"] = nspec.id;
    jn["kind"] = nspec.kind == NodeKind::Static ? "static" : "burstable";
    jn["capacity"] = nspec.capacity;
    jn["baseline"] = nspec.baseline;
    jn["earn_rate"] = nspec.earn_rate;
    jn["credit_cap"] = nspec.credit_cap;
    jn["initial_credits"] = nspec.initial_credits;
    jn["interference"] = json::array();
    for (const auto& p : nspec.interference)
      jn["interference"].push_back({p.start_time, p.multiplier});
    root["nodes"].push_back(jn);
  }
  root["storage"] = {{"datanodes", s.storage.datanodes},
                     {"replication", s.storage.replication},
                     {"uplink_mbps", s.storage.uplink_bw / kMbps},
                     {"block_mib", static_cast<double>(s.storage.block_size) / kMiB}};
  root["job"] = {{"kind", to_string(s.job_kind)},
                 {"input_mib", static_cast<double>(s.job.input_bytes) / kMiB},
                 {"iterations", s.job.iterations},
                 {"count", s.job_count},
                 {"work_per_mib", s.job.work_per_byte * kMiB},
                 {"shuffle_ratio", s.job.shuffle_ratio}};
  root["strategies"] = json::array();
  for (const auto& st : s.strategies) {
    json js;
    js["name"] = st.kind == StrategyConfig::Kind::HomtK ? "homt-k"
                 : st.kind == StrategyConfig::Kind::HemtStatic ? "hemt-static"
                 : st.kind == StrategyConfig::Kind::HemtCredit ? "hemt-credit"
                                                               : "oa-hemt";
    if (st.kind == StrategyConfig::Kind::HomtK) js["k"] = st.k;
    js["alpha"] = st.alpha;
    js["cold_start"] = st.rule == ColdStartRule::Mean ? "mean"
                       : st.rule == ColdStartRule::Min ? "min"
                                                       : "max";
    js["probe"] = st.probe;
    js["probe_fraction"] = st.probe_fraction;
    root["strategies"].push_back(js);
  }
  root["sim"] = {{"sched_overhead_s", s.sim.sched_overhead},
                 {"io_setup_s", s.sim.io_setup},
                 {"pipeline", s.sim.pipeline},
                 {"shuffle_mbps", s.sim.shuffle_bw / kMbps}};
  root["replications"] = s.replications;
  root["seed"] = s.seed;
  return root.dump(2) + "\n";
}

ScenarioResult run_experiment(const Scenario& scenario) {
  auto base_jobs = build_job(scenario.job_kind, scenario.job);
  std::vector<Job> jobs;
  for (int c = 0; c < scenario.job_count; ++c)
    jobs.insert(jobs.end(), base_jobs.begin(), base_jobs.end());

  ScenarioResult result;
  for (const auto& strategy : scenario.strategies) {
    int k = strategy.kind == StrategyConfig::Kind::HomtK
                ? strategy.k
                : static_cast<int>(scenario.nodes.size());
    std::vector<double> makespans;
    for (int rep = 0; rep < scenario.replications; ++rep) {
      RunResult run = run_jobs(jobs, strategy, scenario.nodes, scenario.storage,
                               scenario.sim, scenario.seed + rep);
      makespans.push_back(run.makespan);
      for (const auto& js : run.stages) {
        StageRow row;
        row.scenario = scenario.name;
        row.strategy = strategy.label();
        row.k = k;
        row.replication = rep;
        row.job = js.job;
        row.stage = js.stage;
        row.completion_s = js.metrics.duration();
        row.sync_delay_s = js.metrics.sync_delay;
        row.idle_cpu_s = js.metrics.idle_cpu_s;
        row.bottleneck_mix = js.metrics.cpu_bound_fraction();
        result.rows.push_back(row);
      }
    }
    SummaryRow sr;
    sr.scenario = scenario.name;
    sr.strategy = strategy.label();
    sr.k = k;
    sr.replications = scenario.replications;
    double sum = 0.0;
    for (double m : makespans) sum += m;
    sr.mean_completion_s = sum / makespans.size();
    double ss = 0.0;
    for (double m : makespans) ss += (m - sr.mean_completion_s) * (m - sr.mean_completion_s);
    sr.stddev_s = makespans.size() > 1 ? std::sqrt(ss / (makespans.size() - 1)) : 0.0;
    double half = sr.stddev_s / std::sqrt(static_cast<double>(makespans.size()));
    sr.lo_1sigma = sr.mean_completion_s - half;
    sr.hi_1sigma = sr.mean_completion_s + half;
    result.summary.push_back(sr);
  }
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string stage_csv(const ScenarioResult& result) {
  std::string out =
      "scenario,strategy,k,replication,job,stage,completion_s,sync_delay_s,"
      "idle_cpu_s,bottleneck_mix\n";
  for (const auto& r : result.rows) {
    out += r.scenario + "," + r.strategy + "," + std::to_string(r.k) + "," +
           std::to_string(r.replication) + "," + std::to_string(r.job) + "," +
           std::to_string(r.stage) + "," + fmt(r.completion_s) + "," +
           fmt(r.sync_delay_s) + "," + fmt(r.idle_cpu_s) + "," +
           fmt(r.bottleneck_mix) + "\n";
  }
  return out;
}

std::string summary_csv(const ScenarioResult& result) {
  std::string out =
      "scenario,strategy,k,mean_completion_s,stddev_s,lo_1sigma,hi_1sigma,"
      "replications\n";
  for (const auto& r : result.summary) {
    out += r.scenario + "," + r.strategy + "," + std::to_string(r.k) + "," +
           fmt(r.mean_completion_s) + "," + fmt(r.stddev_s) + "," +
           fmt(r.lo_1sigma) + "," + fmt(r.hi_1sigma) + "," +
           std::to_string(r.replications) + "\n";
  }
  return out;
}

namespace {

// Scenario library. container04 mirrors the two-container WordCount setup,
// hdfs-contention the network-bottlenecked HDFS sweep, oa-interference the
// fifty-job adaptive sequence with injected interference, burstable-split
// the three-node credit trio, kmeans30/pagerank100 the multi-stage
// workloads at desk scale.
const std::map<std::string, const char*>& builtin_scenarios() {
  static const std::map<std::string, const char*> scenarios = {
      {"container04", R"({
  "name": "container04",
  "nodes": [
    {"id": "full-core", "kind": "static", "capacity": 1.0},
    {"id": "part-core", "kind": "static", "capacity": 0.4}
  ],
  "storage": {"datanodes": 4, "replication": 2, "uplink_mbps": 600, "block_mib": 1024},
  "job": {"kind": "wordcount", "input_mib": 2048, "work_per_mib": 0.04, "shuffle_ratio": 0.01},
  "strategies": [
    {"name": "hemt-static"},
    {"name": "homt-k", "k": 2},
    {"name": "homt-k", "k": 4},
    {"name": "homt-k", "k": 8},
    {"name": "homt-k", "k": 16},
    {"name": "homt-k", "k": 32},
    {"name": "homt-k", "k": 64}
  ],
  "sim": {"sched_overhead_s": 0.1, "io_setup_s": 0.05, "pipeline": true},
  "replications": 5,
  "seed": 7
})"},
      {"hdfs-contention", R"({
  "name": "hdfs-contention",
  "nodes": [
    {"id": "worker0", "kind": "static", "capacity": 1.0},
    {"id": "worker1", "kind": "static", "capacity": 1.0},
    {"id": "worker2", "kind": "static", "capacity": 1.0},
    {"id": "worker3", "kind": "static", "capacity": 1.0}
  ],
  "storage": {"datanodes": 4, "replication": 2, "uplink_mbps": 64, "block_mib": 16},
  "job": {"kind": "synthetic", "input_mib": 512, "work_per_mib": 0.001},
  "strategies": [
    {"name": "homt-k", "k": 4},
    {"name": "homt-k", "k": 8},
    {"name": "homt-k", "k": 16},
    {"name": "homt-k", "k": 32},
    {"name": "homt-k", "k": 64},
    {"name": "hemt-static"}
  ],
  "sim": {"sched_overhead_s": 0.1, "io_setup_s": 0.25, "pipeline": true},
  "replications": 10,
  "seed": 11
})"},
      {"oa-interference", R"({
  "name": "oa-interference",
  "nodes": [
    {"id": "calm", "kind": "static", "capacity": 1.0},
    {"id": "noisy", "kind": "static", "capacity": 1.0,
     "interference": [[45, 0.6], [95, 0.3]]}
  ],
  "storage": {"datanodes": 4, "replication": 2, "uplink_mbps": 600, "block_mib": 128},
  "job": {"kind": "wordcount", "input_mib": 128, "count": 50, "work_per_mib": 0.04, "shuffle_ratio": 0.01},
  "strategies": [
    {"name": "oa-hemt", "alpha": 0.0},
    {"name": "hemt-static"}
  ],
  "sim": {"sched_overhead_s": 0.1, "io_setup_s": 0.05, "pipeline": true},
  "replications": 3,
  "seed": 19
})"},
      {"burstable-split", R"({
  "name": "burstable-split",
  "nodes": [
    {"id": "t2-a", "kind": "burstable", "baseline": 0.2, "earn_rate": 0.2, "initial_credits": 4},
    {"id": "t2-b", "kind": "burstable", "baseline": 0.2, "earn_rate": 0.2, "initial_credits": 8},
    {"id": "t2-c", "kind": "burstable", "baseline": 0.2, "earn_rate": 0.2, "initial_credits": 12}
  ],
  "storage": {"datanodes": 4, "replication": 2, "uplink_mbps": 600, "block_mib": 1024},
  "job": {"kind": "synthetic", "input_mib": 2000, "work_per_mib": 0.6},
  "strategies": [
    {"name": "hemt-credit"},
    {"name": "hemt-static"},
    {"name": "homt-k", "k": 3},
    {"name": "homt-k", "k": 24}
  ],
  "sim": {"sched_overhead_s": 0.1, "io_setup_s": 0.05, "pipeline": true},
  "replications": 3,
  "seed": 23
})"},
      {"kmeans30", R"({
  "name": "kmeans30",
  "nodes": [
    {"id": "full-core", "kind": "static", "capacity": 1.0},
    {"id": "part-core", "kind": "static", "capacity": 0.4}
  ],
  "storage": {"datanodes": 4, "replication": 2, "uplink_mbps": 600, "block_mib": 128},
  "job": {"kind": "kmeans", "input_mib": 64, "iterations": 30, "work_per_mib": 0.2, "shuffle_ratio": 0.01},
  "strategies": [
    {"name": "hemt-static"},
    {"name": "homt-k", "k": 2},
    {"name": "homt-k", "k": 4},
    {"name": "homt-k", "k": 8},
    {"name": "homt-k", "k": 16},
    {"name": "homt-k", "k": 32},
    {"name": "homt-k", "k": 64}
  ],
  "sim": {"sched_overhead_s": 0.1, "io_setup_s": 0.05, "pipeline": true},
  "replications": 3,
  "seed": 29
})"},
      {"pagerank100", R"({
  "name": "pagerank100",
  "nodes": [
    {"id": "full-core", "kind": "static", "capacity": 1.0},
    {"id": "part-core", "kind": "static", "capacity": 0.4}
  ],
  "storage": {"datanodes": 4, "replication": 2, "uplink_mbps": 600, "block_mib": 128},
  "job": {"kind": "pagerank", "input_mib": 64, "iterations": 100, "work_per_mib": 0.04, "shuffle_ratio": 1.0},
  "strategies": [
    {"name": "hemt-static"},
    {"name": "homt-k", "k": 2},
    {"name": "homt-k", "k": 4},
    {"name": "homt-k", "k": 8},
    {"name": "homt-k", "k": 16},
    {"name": "homt-k", "k": 32},
    {"name": "homt-k", "k": 64}
  ],
  "sim": {"sched_overhead_s": 0.1, "io_setup_s": 0.05, "pipeline": true},
  "replications": 3,
  "seed": 31
})"},
  };
  return scenarios;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin_scenarios()) names.push_back(name);
  return names;
}

std::string builtin_scenario_text(const std::string& name) {
  auto it = builtin_scenarios().find(name);
  if (it == builtin_scenarios().end())
    throw std::invalid_argument("unknown builtin scenario: " + name);
  return it->second;
}

}  // namespace hemt
