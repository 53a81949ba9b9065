#include "hemt/storage.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hemt {

void validate(const StorageConfig& cfg) {
  if (cfg.replication < 1) throw std::invalid_argument("storage: replication must be >= 1");
  if (cfg.datanodes < cfg.replication)
    throw std::invalid_argument("storage: datanodes must be >= replication");
  if (!(cfg.uplink_bw > 0.0)) throw std::invalid_argument("storage: uplink_bw must be > 0");
  if (cfg.block_size <= 0) throw std::invalid_argument("storage: block_size must be > 0");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::vector<int> place_block(std::mt19937_64& rng, const StorageConfig& cfg) {
  validate(cfg);
  // Partial Fisher-Yates over node ids.
  std::vector<int> pool(cfg.datanodes);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> chosen;
  chosen.reserve(cfg.replication);
  for (int i = 0; i < cfg.replication; ++i) {
    std::uint64_t j = i + uniform_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
    chosen.push_back(pool[i]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

int select_read_node(std::mt19937_64& rng, const std::vector<int>& replicas) {
  if (replicas.empty())
    throw std::invalid_argument("select_read_node: empty replica set");
  return replicas[uniform_below(rng, replicas.size())];
}

double prob_same_block(const StorageConfig& cfg) {
  validate(cfg);
  return 1.0 / cfg.replication;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;  // exact: result*(n-k+i) divisible by i
  }
  return result;
}

CollisionProbabilities prob_diff_block(const StorageConfig& cfg) {
  validate(cfg);
  const int n = cfg.datanodes;
  const int r = cfg.replication;
  CollisionProbabilities out;
  out.p1 = prob_same_block(cfg);
  const double total = static_cast<double>(binomial(n, r));
  const int v_min = std::max(2 * r - n, 0);
  for (int v = v_min; v <= r; ++v) {
    double pv = static_cast<double>(binomial(r, v)) *
                static_cast<double>(binomial(n - r, r - v)) / total;
    out.pv[v] = pv;
    out.p2 += pv * v / (static_cast<double>(r) * r);
  }
  return out;
}

CollisionEstimates estimate_collisions_mc(const StorageConfig& cfg,
                                          std::int64_t trials,
                                          std::uint64_t seed) {
  validate(cfg);
  if (trials < 1) throw std::invalid_argument("estimate_collisions_mc: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::int64_t same_hits = 0;
  std::int64_t diff_hits = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    auto block_a = place_block(rng, cfg);
    if (select_read_node(rng, block_a) == select_read_node(rng, block_a))
      ++same_hits;
    auto block_b = place_block(rng, cfg);
    auto block_c = place_block(rng, cfg);
    if (select_read_node(rng, block_b) == select_read_node(rng, block_c))
      ++diff_hits;
  }
  return {static_cast<double>(same_hits) / trials,
          static_cast<double>(diff_hits) / trials};
}

double uplink_rate(int active_readers, const StorageConfig& cfg) {
  if (active_readers < 1)
    throw std::invalid_argument("uplink_rate: need at least one reader");
  return cfg.uplink_bw / active_readers;
}

}  // namespace hemt
