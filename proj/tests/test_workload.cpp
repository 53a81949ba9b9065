#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "hemt/workload.hpp"

using namespace hemt;

TEST_CASE("partition_even") {
  const std::int64_t gib = 1LL << 30;
  auto halves = partition_even(2 * gib, 2);
  CHECK(halves == std::vector<std::int64_t>{gib, gib});
  CHECK(partition_even(10, 3) == std::vector<std::int64_t>{4, 3, 3});
  CHECK(partition_even(0, 4) == std::vector<std::int64_t>{0, 0, 0, 0});
  CHECK_THROWS_AS(partition_even(10, 0), std::invalid_argument);
}

TEST_CASE("partition_proportional worked examples") {
  const std::int64_t mib = 1LL << 20;
  // 2048 * (1/1.4) = 1462.857...; largest remainder rounds the fast node up.
  auto split = partition_proportional(2048 * mib, {1.0, 0.4});
  CHECK(split[0] + split[1] == 2048 * mib);
  CHECK(std::llround(static_cast<double>(split[0]) / mib) == 1463);
  CHECK(std::llround(static_cast<double>(split[1]) / mib) == 585);

  // In whole MiB units the same split is exactly {1463, 585}.
  CHECK(partition_proportional(2048, {1.0, 0.4}) == std::vector<std::int64_t>{1463, 585});

  CHECK(partition_proportional(11, {3, 4, 4}) == std::vector<std::int64_t>{3, 4, 4});
  CHECK(partition_proportional(9999, {2.5}) == std::vector<std::int64_t>{9999});
  CHECK(partition_proportional(10, {0.0, 1.0}) == std::vector<std::int64_t>{0, 10});
  CHECK_THROWS_AS(partition_proportional(10, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("proportional with equal weights matches even partitioning") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    std::int64_t total = rng() % 1000000;
    int k = 1 + static_cast<int>(rng() % 12);
    auto even = partition_even(total, k);
    auto prop = partition_proportional(total, std::vector<double>(k, 3.7));
    std::sort(even.begin(), even.end());
    std::sort(prop.begin(), prop.end());
    CHECK(even == prop);
  }
}

TEST_CASE("partition sizes always sum to the total (exhaustive small cases)") {
  const std::vector<std::vector<double>> grid = {
      {1.0},       {1.0, 0.4},     {0.3, 0.3, 0.4}, {1.0, 1.0, 1.0},
      {5.0, 0.01}, {2.0, 3.0, 5.0}, {0.0, 1.0, 2.0}, {0.7, 0.2, 0.1, 0.05}};
  for (std::int64_t total = 0; total <= 100; ++total) {
    for (const auto& weights : grid) {
      auto sizes = partition_proportional(total, weights);
      CHECK(std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0}) == total);
      double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        // Within one rounding unit of the exact share.
        double exact = total * weights[i] / wsum;
        CHECK(std::abs(static_cast<double>(sizes[i]) - exact) <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("skewed_bucket residue arithmetic") {
  std::vector<std::int64_t> caps = {3, 4, 4};
  CHECK(skewed_bucket(0, caps) == 0);
  CHECK(skewed_bucket(3, caps) == 1);
  CHECK(skewed_bucket(7, caps) == 2);

  // A full residue cycle gives exactly the capacities as bucket counts.
  std::vector<int> counts(3, 0);
  for (int h = 0; h < 11; ++h) ++counts[skewed_bucket(h, caps)];
  CHECK(counts == std::vector<int>{3, 4, 4});

  CHECK(skewed_bucket(123456789, {7}) == 0);
  CHECK(skewed_bucket(0, {1, 1}) == 0);
  CHECK(skewed_bucket(1, {1, 1}) == 1);

  // Negative hash codes map to nonnegative residues.
  CHECK(skewed_bucket(-1, caps) == skewed_bucket(10, caps));
  CHECK(skewed_bucket(-11, caps) == skewed_bucket(0, caps));

  CHECK_THROWS_AS(skewed_bucket(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(skewed_bucket(0, {2, 0}), std::invalid_argument);
}

TEST_CASE("skewed_bucket frequencies follow capacities on random hashes") {
  std::vector<std::int64_t> caps = {3, 4, 4};
  const int trials = 100000;
  std::mt19937_64 rng(77);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < trials; ++i)
    ++counts[skewed_bucket(static_cast<std::int64_t>(rng()), caps)];
  for (int i = 0; i < 3; ++i) {
    double freq = static_cast<double>(counts[i]) / trials;
    CHECK(std::abs(freq - caps[i] / 11.0) < 0.01);
  }
}

TEST_CASE("quantize_weights reduces by the gcd") {
  CHECK(quantize_weights({1.0, 0.4}) == std::vector<std::int64_t>{5, 2});
  CHECK(quantize_weights({3, 4, 4}, 1) == std::vector<std::int64_t>{3, 4, 4});
  CHECK(quantize_weights({0.5, 0.5}) == std::vector<std::int64_t>{1, 1});
  CHECK_THROWS_AS(quantize_weights({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("build_job shapes") {
  JobParams p;
  p.input_bytes = 256LL << 20;
  p.work_per_byte = 1e-8;
  p.shuffle_ratio = 0.01;

  p.iterations = 30;
  auto kmeans = build_job(JobKind::KMeans, p);
  CHECK(kmeans.size() == 30);
  for (const auto& job : kmeans) {
    CHECK(job.stages.size() == 2);
    CHECK(job.stages[0].reads_storage);
    CHECK_FALSE(job.stages[1].reads_storage);
    CHECK(job.stages[1].deps == std::vector<int>{0});
  }

  p.iterations = 100;
  p.shuffle_ratio = 1.0;
  auto pagerank = build_job(JobKind::PageRank, p);
  CHECK(pagerank.size() == 1);
  CHECK(pagerank[0].stages.size() == 101);
  for (std::size_t i = 1; i < pagerank[0].stages.size(); ++i) {
    CHECK(pagerank[0].stages[i].input_bytes == pagerank[0].stages[i - 1].input_bytes);
    CHECK(pagerank[0].stages[i].deps == std::vector<int>{static_cast<int>(i) - 1});
  }

  p.iterations = 1;
  p.shuffle_ratio = 0.0;
  auto synth = build_job(JobKind::Synthetic, p);
  CHECK(synth.size() == 1);
  CHECK(synth[0].stages.size() == 1);

  auto wc = build_job(JobKind::WordCount, p);
  CHECK(wc[0].stages.size() == 2);
  CHECK(wc[0].stages[1].input_bytes == 0);

  CHECK_THROWS_AS(job_kind_from_string("sort"), std::invalid_argument);
}
