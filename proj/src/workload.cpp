#include "hemt/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hemt {

std::vector<std::int64_t> partition_even(std::int64_t total, int k) {
  if (k < 1) throw std::invalid_argument("partition_even: k must be >= 1");
  if (total < 0) throw std::invalid_argument("partition_even: total must be >= 0");
  std::vector<std::int64_t> sizes(k, total / k);
  std::int64_t rem = total % k;
  for (std::int64_t i = 0; i < rem; ++i) ++sizes[i];
  return sizes;
}

std::vector<std::int64_t> partition_proportional(std::int64_t total,
                                                 const std::vector<double>& weights) {
  if (weights.empty())
    throw std::invalid_argument("partition_proportional: no weights");
  if (total < 0)
    throw std::invalid_argument("partition_proportional: total must be >= 0");
  long double sum = 0.0L;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("partition_proportional: weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0.0L))
    throw std::invalid_argument("partition_proportional: weights sum to zero");

  const std::size_t k = weights.size();
  std::vector<std::int64_t> sizes(k, 0);
  std::vector<long double> frac(k, 0.0L);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    long double exact = static_cast<long double>(total) * weights[i] / sum;
    sizes[i] = static_cast<std::int64_t>(std::floor(exact));
    frac[i] = exact - sizes[i];
    assigned += sizes[i];
  }
  // Largest-remainder correction; ties broken by lowest index.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::int64_t left = total - assigned; left > 0; --left)
    ++sizes[order[(total - assigned) - left]];
  return sizes;
}

std::vector<std::int64_t> quantize_weights(const std::vector<double>& weights,
                                           std::int64_t scale) {
  if (weights.empty()) throw std::invalid_argument("quantize_weights: no weights");
  std::vector<std::int64_t> out(weights.size());
  std::int64_t g = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0)
      throw std::invalid_argument("quantize_weights: weights must be nonnegative");
    out[i] = std::llround(weights[i] * static_cast<double>(scale));
    g = std::gcd(g, out[i]);
  }
  if (g == 0) throw std::invalid_argument("quantize_weights: all weights are zero");
  for (auto& c : out) c /= g;
  return out;
}

int skewed_bucket(std::int64_t record_hash,
                  const std::vector<std::int64_t>& capacities) {
  if (capacities.empty())
    throw std::invalid_argument("skewed_bucket: no capacities");
  std::int64_t sum = 0;
  for (std::int64_t c : capacities) {
    if (c <= 0) throw std::invalid_argument("skewed_bucket: capacities must be positive");
    sum += c;
  }
  std::int64_t h = record_hash % sum;
  if (h < 0) h += sum;
  std::int64_t prefix = 0;
  for (std::size_t i = 0; i < capacities.size(); ++i) {
    prefix += capacities[i];
    if (prefix > h) return static_cast<int>(i);
  }
  return static_cast<int>(capacities.size() - 1);  // unreachable
}

JobKind job_kind_from_string(const std::string& s) {
  if (s == "wordcount") return JobKind::WordCount;
  if (s == "kmeans") return JobKind::KMeans;
  if (s == "pagerank") return JobKind::PageRank;
  if (s == "synthetic") return JobKind::Synthetic;
  throw std::invalid_argument("unknown job kind: " + s);
}

std::string to_string(JobKind kind) {
  switch (kind) {
    case JobKind::WordCount: return "wordcount";
    case JobKind::KMeans: return "kmeans";
    case JobKind::PageRank: return "pagerank";
    case JobKind::Synthetic: return "synthetic";
  }
  return "?";
}

namespace {

Job two_stage_job(JobKind kind, const JobParams& p) {
  Job job;
  job.kind = kind;
  Stage map;
  map.id = 0;
  map.input_bytes = p.input_bytes;
  map.work_per_byte = p.work_per_byte;
  map.reads_storage = true;
  Stage reduce;
  reduce.id = 1;
  reduce.deps = {0};
  reduce.input_bytes = static_cast<std::int64_t>(
      std::llround(p.shuffle_ratio * static_cast<double>(p.input_bytes)));
  reduce.work_per_byte = p.work_per_byte;
  job.stages = {map, reduce};
  return job;
}

}  // namespace

std::vector<Job> build_job(JobKind kind, const JobParams& p) {
  if (p.input_bytes < 0) throw std::invalid_argument("build_job: input_bytes must be >= 0");
  if (!(p.work_per_byte > 0.0)) throw std::invalid_argument("build_job: work_per_byte must be > 0");
  if (p.shuffle_ratio < 0.0) throw std::invalid_argument("build_job: shuffle_ratio must be >= 0");
  if (p.iterations < 1) throw std::invalid_argument("build_job: iterations must be >= 1");

  std::vector<Job> jobs;
  switch (kind) {
    case JobKind::WordCount:
      jobs.push_back(two_stage_job(kind, p));
      break;
    case JobKind::KMeans:
      for (int i = 0; i < p.iterations; ++i) jobs.push_back(two_stage_job(kind, p));
      break;
    case JobKind::PageRank: {
      Job job;
      job.kind = kind;
      double input = static_cast<double>(p.input_bytes);
      for (int s = 0; s <= p.iterations; ++s) {
        Stage stage;
        stage.id = s;
        if (s > 0) stage.deps = {s - 1};
        stage.input_bytes = static_cast<std::int64_t>(std::llround(input));
        stage.work_per_byte = p.work_per_byte;
        stage.reads_storage = (s == 0);
        job.stages.push_back(stage);
        input *= p.shuffle_ratio;
      }
      jobs.push_back(job);
      break;
    }
    case JobKind::Synthetic: {
      Job job;
      job.kind = kind;
      Stage stage;
      stage.id = 0;
      stage.input_bytes = p.input_bytes;
      stage.work_per_byte = p.work_per_byte;
      stage.reads_storage = true;
      job.stages = {stage};
      jobs.push_back(job);
      break;
    }
  }
  return jobs;
}

}  // namespace hemt
