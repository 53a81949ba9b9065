#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hemt {

// A runnable unit within one stage. Stage-0 tasks read a contiguous byte
// range of the job's input file from storage; later-stage tasks read a
// shuffle bucket.
struct Task {
  int id = 0;
  int stage = 0;
  std::int64_t input_size = 0;    // bytes (d_i)
  std::int64_t input_offset = 0;  // byte offset into the stage input
  double work_per_byte = 0.0;     // full-CPU-seconds per byte
  bool reads_storage = false;     // true for stage 0
};

struct Stage {
  int id = 0;
  std::vector<int> deps;          // predecessor stage ids (barrier semantics)
  std::int64_t input_bytes = 0;   // D_k for this stage
  double work_per_byte = 0.0;
  bool reads_storage = false;
};

enum class JobKind { WordCount, KMeans, PageRank, Synthetic };

struct Job {
  JobKind kind = JobKind::Synthetic;
  std::vector<Stage> stages;      // topologically ordered
};

enum class PlanProvenance { Even, StaticCapacity, CreditBased, Adaptive };

struct PartitionPlan {
  std::vector<double> weights;       // per-executor, nonnegative
  std::vector<std::int64_t> sizes;   // per-task bytes, sums to total exactly
  PlanProvenance provenance = PlanProvenance::Even;
};

// k sizes differing by at most one byte, summing to total.
std::vector<std::int64_t> partition_even(std::int64_t total, int k);

// sizes[i] = round(total*w_i/sum(w)) with largest-remainder correction so
// the sizes sum to total exactly; zero-weight entries get zero.
std::vector<std::int64_t> partition_proportional(std::int64_t total,
                                                 const std::vector<double>& weights);

// Scale real weights to integers (default x1000) and reduce by their GCD,
// for the residue arithmetic of the skewed partitioner.
std::vector<std::int64_t> quantize_weights(const std::vector<double>& weights,
                                           std::int64_t scale = 1000);

// Skewed hash partitioner: with S = sum(capacities) and h the nonnegative
// residue of record_hash mod S, returns the smallest bucket i whose prefix
// sum exceeds h. Over a full residue cycle {0..S-1} bucket i receives
// exactly capacities[i] residues.
int skewed_bucket(std::int64_t record_hash,
                  const std::vector<std::int64_t>& capacities);

struct JobParams {
  std::int64_t input_bytes = 0;
  int iterations = 1;             // kmeans/pagerank
  double work_per_byte = 0.0;
  double shuffle_ratio = 1.0;     // shuffle output bytes per stage input byte
};

JobKind job_kind_from_string(const std::string& s);
std::string to_string(JobKind kind);

// wordcount: one job, heavy map + light reduce. kmeans: `iterations`
// independent two-stage jobs over the same input. pagerank: one job with
// iterations+1 chained stages whose inputs follow the shuffle outputs.
// synthetic: one single-stage job.
std::vector<Job> build_job(JobKind kind, const JobParams& params);

}  // namespace hemt
