// Copyright 2026 The dsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Seeded simulation of the threshold rule at sizes far beyond enumeration.
//
// Reproducibility under parallelism: the trial space is cut into fixed
// 16384-trial blocks and block b draws from mt19937_64 seeded with
// splitmix64(seed + b * golden_gamma). Results are integer success counts per
// block merged by addition, so the estimate is bit-identical for any worker
// count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dsp/exact.hpp"
#include "dsp/oracle.hpp"

namespace dsp::mc {

inline constexpr int64_t kBlockSize = 16384;
inline constexpr std::string_view kRngId = "mt19937_64+splitmix64/block16384";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t block_seed(std::uint64_t seed, int64_t block) {
  return splitmix64(seed + static_cast<std::uint64_t>(block) * 0x9E3779B97F4A7C15ull);
}

// Unbiased draw from {0, ..., bound-1} by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t reject_below = (-bound) % bound;  // 2^64 mod bound
  std::uint64_t x = rng();
  while (x < reject_below) x = rng();
  return x % bound;
}

/// Uniform draw over the (2n)!/2^n distinct orderings: Fisher-Yates shuffle
/// of the 2n labelled cards, whose labels collapse to the duplicated
/// qualities.
inline void sample_ordering(int64_t n, std::mt19937_64& rng, std::vector<int>& out) {
  out.resize(static_cast<size_t>(2 * n));
  for (int64_t v = 1; v <= n; ++v) {
    out[static_cast<size_t>(2 * v - 2)] = static_cast<int>(v);
    out[static_cast<size_t>(2 * v - 1)] = static_cast<int>(v);
  }
  for (int64_t k = 2 * n - 1; k >= 1; --k) {
    const auto pick = static_cast<int64_t>(uniform_below(rng, static_cast<std::uint64_t>(k + 1)));
    std::swap(out[static_cast<size_t>(k)], out[static_cast<size_t>(pick)]);
  }
}

struct SimEstimate {
  int64_t n = 0;
  int64_t threshold = 0;
  int64_t trials = 0;
  int64_t successes = 0;
  double p_hat = 0;
  double std_err = 0;
  std::uint64_t seed = 0;
  std::string rng = std::string(kRngId);
};

/// Simulates the threshold-t rule. Deterministic in (n, t, trials, seed)
/// regardless of the worker count.
inline SimEstimate estimate(int64_t n, int64_t t, int64_t trials, std::uint64_t seed,
                            int threads = 1) {
  if (n < 1) throw std::invalid_argument("estimate: n must be >= 1");
  if (t < 1 || t > n) throw std::invalid_argument("estimate: threshold out of range");
  if (trials < 1) throw std::invalid_argument("estimate: trials must be >= 1");
  const int64_t blocks = (trials + kBlockSize - 1) / kBlockSize;
  std::atomic<int64_t> next_block{0};
  std::atomic<int64_t> successes{0};
  auto work = [&] {
    std::vector<int> ordering;
    oracle::PolicyScratch scratch;
    int64_t local = 0;
    for (int64_t b = next_block.fetch_add(1); b < blocks; b = next_block.fetch_add(1)) {
      std::mt19937_64 rng(block_seed(seed, b));
      const int64_t block_trials = std::min(kBlockSize, trials - b * kBlockSize);
      for (int64_t k = 0; k < block_trials; ++k) {
        sample_ordering(n, rng, ordering);
        local += oracle::run_policy(ordering, t, scratch).success;
      }
    }
    successes.fetch_add(local);
  };
  const int workers = std::max(1, static_cast<int>(std::min<int64_t>(threads, blocks)));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  SimEstimate est;
  est.n = n;
  est.threshold = t;
  est.trials = trials;
  est.successes = successes.load();
  est.p_hat = static_cast<double>(est.successes) / static_cast<double>(trials);
  est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(trials));
  est.seed = seed;
  return est;
}

struct SweepRow {
  SimEstimate est;
  double p_exact = 0;  // closed-form success probability
  double delta = 0;    // p_hat - p_exact
  double z = 0;        // delta / std_err (0 when both are 0)
};

/// Batch estimates at the optimal threshold for each n, with z-scores against
/// the closed-form success probability.
inline std::vector<SweepRow> sweep(const std::vector<int64_t>& ns, int64_t trials,
                                   std::uint64_t seed, int threads = 1) {
  std::vector<SweepRow> rows;
  rows.reserve(ns.size());
  for (const int64_t n : ns) {
    SweepRow row;
    row.est = estimate(n, threshold_r(n), trials, seed, threads);
    row.p_exact = success_prob(n).to_double();
    row.delta = row.est.p_hat - row.p_exact;
    if (row.est.std_err > 0) {
      row.z = row.delta / row.est.std_err;
    } else {
      row.z = row.delta == 0 ? 0 : std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dsp::mc
