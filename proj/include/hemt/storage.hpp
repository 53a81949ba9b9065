#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace hemt {

// HDFS-like replicated block store: n datanodes, replication factor r,
// random placement, uniform replica selection on read, fair-shared uplinks.
struct StorageConfig {
  int datanodes = 4;            // n
  int replication = 2;          // r
  double uplink_bw = 8e6;       // bytes/second per datanode
  std::int64_t block_size = 128LL << 20;  // bytes
};

void validate(const StorageConfig& cfg);

// block id -> r distinct datanode ids (sorted).
struct ReplicaMap {
  std::map<std::int64_t, std::vector<int>> placements;
};

// Collision probabilities between two concurrent readers.
struct CollisionProbabilities {
  double p1 = 0.0;              // same block: share a datanode
  double p2 = 0.0;              // different blocks: share a datanode
  std::map<int, double> pv;     // v -> P(v datanodes hold replicas of both)
};

// Deterministic bounded draw: uniform in [0, n) via rejection sampling.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

// Uniform random r-subset of {0..n-1}, sorted.
std::vector<int> place_block(std::mt19937_64& rng, const StorageConfig& cfg);

// Uniform choice among the replicas of one block.
int select_read_node(std::mt19937_64& rng, const std::vector<int>& replicas);

// p1 = 1/r.
double prob_same_block(const StorageConfig& cfg);

// p2 = sum_v P(v) v/r^2 with P(v) hypergeometric over shared datanodes.
CollisionProbabilities prob_diff_block(const StorageConfig& cfg);

struct CollisionEstimates {
  double p1_hat = 0.0;
  double p2_hat = 0.0;
};

// Monte Carlo cross-check of the closed forms: simulated placements plus
// uniform replica reads for same-block and different-block reader pairs.
CollisionEstimates estimate_collisions_mc(const StorageConfig& cfg,
                                          std::int64_t trials,
                                          std::uint64_t seed);

// Egalitarian processor sharing on one uplink.
double uplink_rate(int active_readers, const StorageConfig& cfg);

// Exact binomial coefficient; valid while the result fits in 64 bits.
std::uint64_t binomial(int n, int k);

}  // namespace hemt
