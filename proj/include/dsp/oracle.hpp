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

// Ground-truth engine: exhaustive enumeration of all (2n)!/2^n applicant
// orderings at small n, exact policy evaluation, and counting-based checks of
// the kernel, the next-stop win probabilities and optimality.
//
// Enumeration is lexicographic over the multiset {1,1,2,2,...,n,n}; each
// distinct ordering is produced exactly once. The stream is splittable by the
// value in the first position, so parallel counting reduces exactly via
// integer sums. The default size cap is 6 (7,484,400 orderings); it can be
// raised per call or through the DSP_MAX_ENUM_N environment variable.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dsp/chain.hpp"
#include "dsp/exact.hpp"
#include "dsp/rational.hpp"

namespace dsp::oracle {

class enum_limit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int64_t default_enum_cap() {
  if (const char* env = std::getenv("DSP_MAX_ENUM_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return v;
  }
  return 6;
}

inline int64_t resolve_cap(int64_t cap) { return cap < 0 ? default_enum_cap() : cap; }

inline void require_within_cap(int64_t n, int64_t cap, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
  if (n > cap)
    throw enum_limit_error(std::string(what) + ": n exceeds the enumeration cap (" +
                           std::to_string(cap) + "); raise it explicitly to proceed");
}

/// Number of distinct orderings, (2n)!/2^n.
inline BigInt total_orderings(int64_t n) {
  if (n < 1) throw std::invalid_argument("total_orderings: n must be >= 1");
  BigInt t = 1;
  for (int64_t k = 2; k <= 2 * n; ++k) t *= k;
  return t >> static_cast<unsigned>(n);
}

/// Streams every distinct multiset permutation in lexicographic order.
/// The two-argument form restricts to orderings whose first applicant has the
/// given quality (one partition of the splittable stream).
class OrderingStream {
 public:
  explicit OrderingStream(int64_t n) : OrderingStream(n, 0) {}

  OrderingStream(int64_t n, int fixed_first) : fixed_(fixed_first) {
    if (n < 1) throw std::invalid_argument("OrderingStream: n must be >= 1");
    if (fixed_first < 0 || fixed_first > n)
      throw std::invalid_argument("OrderingStream: bad partition value");
    for (int v = 1; v <= n; ++v) {
      suffix_.push_back(v);
      if (v != fixed_first) suffix_.push_back(v);
    }
  }

  bool next(std::vector<int>& out) {
    if (first_) {
      first_ = false;
    } else if (!std::next_permutation(suffix_.begin(), suffix_.end())) {
      return false;
    }
    out.clear();
    if (fixed_ != 0) out.push_back(fixed_);
    out.insert(out.end(), suffix_.begin(), suffix_.end());
    return true;
  }

 private:
  int fixed_ = 0;
  bool first_ = true;
  std::vector<int> suffix_;
};

/// Cap-checked entry point for full enumeration; the stream itself is the
/// mechanism and carries no policy.
inline OrderingStream enumerate_orderings(int64_t n, int64_t cap = -1) {
  require_within_cap(n, resolve_cap(cap), "enumerate_orderings");
  return OrderingStream(n);
}

struct TraceStep {
  int x = 0;  // relative rank of applicant j (counting distinct qualities)
  int d = 0;  // distinct qualities seen
  int s = 0;  // times the current leader has been seen
};

/// Per-step observables for one ordering.
inline std::vector<TraceStep> derive_trace(const std::vector<int>& ranks) {
  const int len = static_cast<int>(ranks.size());
  const int n = len / 2;
  std::vector<int> count(static_cast<size_t>(n) + 1, 0);
  std::vector<TraceStep> trace(static_cast<size_t>(len));
  int distinct = 0;
  int leader = n + 1;
  int leader_seen = 0;
  for (int j = 0; j < len; ++j) {
    const int v = ranks[static_cast<size_t>(j)];
    if (v < 1 || v > n) throw std::invalid_argument("derive_trace: rank out of range");
    if (count[static_cast<size_t>(v)]++ == 0) {
      ++distinct;
      if (v < leader) {
        leader = v;
        leader_seen = 1;
      }
    } else if (v == leader) {
      ++leader_seen;
    }
    int x = 0;
    for (int u = 1; u <= v; ++u) x += count[static_cast<size_t>(u)] > 0;
    trace[static_cast<size_t>(j)] = {x, distinct, leader_seen};
  }
  return trace;
}

struct PolicyOutcome {
  int64_t stop_index = 0;  // 1-based; 2n if the rule never fired
  bool success = false;    // selected applicant has quality 1
};

// Reusable stamp buffer so million-trial simulations do not clear an array
// per run.
struct PolicyScratch {
  std::vector<int64_t> stamp;
  int64_t tick = 0;
};

/// Runs the threshold rule "stop at the first relatively best applicant seen
/// twice with at least t distinct qualities known"; an unfired rule selects
/// applicant 2n.
inline PolicyOutcome run_policy(std::span<const int> ranks, int64_t t, PolicyScratch& scratch) {
  const int64_t len = static_cast<int64_t>(ranks.size());
  const int64_t n = len / 2;
  if (t < 1 || t > n) throw std::invalid_argument("run_policy: threshold out of range");
  if (scratch.stamp.size() < static_cast<size_t>(n) + 1)
    scratch.stamp.assign(static_cast<size_t>(n) + 1, 0);
  const int64_t tick = ++scratch.tick;
  int leader = std::numeric_limits<int>::max();
  int64_t distinct = 0;
  for (int64_t j = 0; j < len; ++j) {
    const int v = ranks[static_cast<size_t>(j)];
    if (scratch.stamp[static_cast<size_t>(v)] != tick) {
      scratch.stamp[static_cast<size_t>(v)] = tick;
      ++distinct;
      if (v < leader) leader = v;
    } else if (v == leader) {
      // second copy of the current leader: the only kind of decision epoch
      if (distinct >= t) return {j + 1, v == 1};
    }
  }
  return {len, ranks[static_cast<size_t>(len - 1)] == 1};
}

inline PolicyOutcome run_policy(const std::vector<int>& ranks, int64_t t) {
  PolicyScratch scratch;
  return run_policy(std::span<const int>(ranks), t, scratch);
}

namespace detail {

// Runs fn over the partitions {first applicant = v} on the requested number
// of worker threads; fn(v) must return an integer count. Exact and
// order-independent by construction.
template <typename Fn>
int64_t sum_over_partitions(int64_t n, int threads, Fn fn) {
  std::atomic<int> next{1};
  std::atomic<int64_t> total{0};
  auto work = [&] {
    int64_t local = 0;
    for (int v = next.fetch_add(1); v <= n; v = next.fetch_add(1)) local += fn(v);
    total.fetch_add(local);
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return total.load();
}

}  // namespace detail

/// Exact success probability of the threshold-t rule over the full
/// enumeration.
inline Rat exact_policy_prob(int64_t n, int64_t t, int threads = 1, int64_t cap = -1) {
  cap = resolve_cap(cap);
  require_within_cap(n, cap, "exact_policy_prob");
  if (t < 1 || t > n) throw std::invalid_argument("exact_policy_prob: threshold out of range");
  const auto count_partition = [n, t](int v) {
    OrderingStream stream(n, v);
    std::vector<int> ordering;
    PolicyScratch scratch;
    int64_t wins = 0;
    while (stream.next(ordering)) wins += run_policy(ordering, t, scratch).success;
    return wins;
  };
  int64_t wins = 0;
  if (threads > 1) {
    wins = detail::sum_over_partitions(n, threads, count_partition);
  } else {
    OrderingStream stream(n);
    std::vector<int> ordering;
    PolicyScratch scratch;
    while (stream.next(ordering)) wins += run_policy(ordering, t, scratch).success;
  }
  return Rat(BigInt(wins), total_orderings(n));
}

struct ThresholdTable {
  std::vector<int64_t> wins;        // wins[t - 1] = successes of threshold t
  std::vector<Rat> probs;           // probs[t - 1] = wins / total
  std::vector<int64_t> maximizers;  // thresholds achieving the maximum
};

namespace detail {

// Adds, for every threshold t, the wins contributed by the stream's
// orderings. Decision epochs within one ordering have strictly increasing
// distinct-counts, so threshold t fires at the first epoch with d >= t.
inline void scan_threshold_wins(int64_t n, OrderingStream stream, std::vector<int64_t>& wins) {
  std::vector<int> ordering;
  std::vector<int> count(static_cast<size_t>(n) + 1);
  std::vector<std::pair<int, bool>> epochs;  // (distinct count, leader == 1)
  while (stream.next(ordering)) {
    std::fill(count.begin(), count.end(), 0);
    epochs.clear();
    int distinct = 0;
    int leader = std::numeric_limits<int>::max();
    for (const int r : ordering) {
      if (count[static_cast<size_t>(r)]++ == 0) {
        ++distinct;
        if (r < leader) leader = r;
      } else if (r == leader) {
        epochs.emplace_back(distinct, leader == 1);
      }
    }
    size_t idx = 0;
    for (int64_t t = 1; t <= n; ++t) {
      while (idx < epochs.size() && epochs[idx].first < t) ++idx;
      if (idx == epochs.size()) break;  // an unfired rule takes applicant 2n and loses
      wins[static_cast<size_t>(t - 1)] += epochs[idx].second;
    }
  }
}

}  // namespace detail

/// Success counts of every threshold rule t = 1..n in one enumeration pass.
inline ThresholdTable best_threshold(int64_t n, int threads = 1, int64_t cap = -1) {
  cap = resolve_cap(cap);
  require_within_cap(n, cap, "best_threshold");
  std::vector<int64_t> wins(static_cast<size_t>(n), 0);
  if (threads > 1) {
    std::mutex merge_mutex;
    detail::sum_over_partitions(n, threads, [n, &wins, &merge_mutex](int v) {
      std::vector<int64_t> local(static_cast<size_t>(n), 0);
      detail::scan_threshold_wins(n, OrderingStream(n, v), local);
      const std::lock_guard<std::mutex> lock(merge_mutex);
      for (size_t k = 0; k < local.size(); ++k) wins[k] += local[k];
      return int64_t{0};
    });
  } else {
    detail::scan_threshold_wins(n, OrderingStream(n), wins);
  }
  ThresholdTable table;
  table.wins = wins;
  const BigInt total = total_orderings(n);
  const int64_t best = *std::max_element(wins.begin(), wins.end());
  for (int64_t t = 1; t <= n; ++t) {
    table.probs.emplace_back(BigInt(wins[static_cast<size_t>(t - 1)]), total);
    if (wins[static_cast<size_t>(t - 1)] == best) table.maximizers.push_back(t);
  }
  return table;
}

struct ConditionalReport {
  bool ok = false;
  bool win_probs_ok = false;     // counted next-stop win conditionals match closed forms
  bool kernel_ok = false;        // one-step frequencies match the kernel rows exactly
  bool reachability_ok = false;  // every valid state occurs in the enumeration
  std::vector<std::string> mismatches;
};

/// Counts, over the full enumeration, (a) the conditional probability that
/// the next decision epoch after time j is the final leader change, per state
/// (j, i, m), and (b) the one-step transition frequencies; compares both with
/// the closed forms and the kernel, exactly.
inline ConditionalReport conditional_prob_check(int64_t n, int64_t cap = -1) {
  cap = resolve_cap(cap);
  require_within_cap(n, cap, "conditional_prob_check");
  const int64_t len = 2 * n;
  // Dense tallies indexed by (j, i, m) and a target slot. Slots: 0 -> (i,1),
  // 1 -> (i,2), 2 -> (i+1,1), 3 -> (i+1,2).
  const auto key = [n](int64_t j, int64_t i, int64_t m) {
    return ((j - 1) * (n + 1) + i) * 2 + (m - 1);
  };
  std::vector<int64_t> state_count(static_cast<size_t>(key(len, n, 2)) + 1, 0);
  std::vector<int64_t> final_epoch_count(state_count.size(), 0);
  std::vector<std::array<int64_t, 4>> step_count(state_count.size(), {0, 0, 0, 0});

  OrderingStream stream(n);
  std::vector<int> ordering;
  while (stream.next(ordering)) {
    const auto trace = derive_trace(ordering);
    int64_t second_best_arrival = 0;  // time of the second quality-1 applicant
    int seen_best = 0;
    for (int64_t j = 1; j <= len; ++j) {
      if (ordering[static_cast<size_t>(j - 1)] == 1 && ++seen_best == 2) second_best_arrival = j;
    }
    std::vector<int64_t> next_epoch(static_cast<size_t>(len) + 1, len);  // min empty = 2n
    for (int64_t j = len - 1; j >= 1; --j) {
      const auto& step = trace[static_cast<size_t>(j)];  // observation at time j+1
      next_epoch[static_cast<size_t>(j)] =
          (step.x == 1 && step.s == 2) ? j + 1 : next_epoch[static_cast<size_t>(j + 1)];
    }
    for (int64_t j = 1; j <= len; ++j) {
      const auto& step = trace[static_cast<size_t>(j - 1)];
      const auto k = static_cast<size_t>(key(j, step.d, step.s));
      ++state_count[k];
      if (j < len) {
        final_epoch_count[k] += next_epoch[static_cast<size_t>(j)] == second_best_arrival;
        const auto& next = trace[static_cast<size_t>(j)];
        const int slot = (next.d == step.d ? 0 : 2) + (next.s - 1);
        ++step_count[k][static_cast<size_t>(slot)];
      }
    }
  }

  ConditionalReport rep;
  rep.win_probs_ok = rep.kernel_ok = rep.reachability_ok = true;
  const auto flag = [&rep](bool& which, std::string text) {
    which = false;
    rep.mismatches.push_back(std::move(text));
  };
  for (int64_t j = 1; j <= len; ++j) {
    for (int64_t i = 1; i <= n; ++i) {
      for (int64_t m = 1; m <= 2; ++m) {
        const ChainState s{j, i, m};
        const auto k = static_cast<size_t>(key(j, i, m));
        if (!is_valid_state(n, s)) {
          if (state_count[k] != 0)
            flag(rep.reachability_ok, "invalid state occurred: j=" + std::to_string(j) +
                                          " i=" + std::to_string(i) + " m=" + std::to_string(m));
          continue;
        }
        if (state_count[k] == 0) {
          flag(rep.reachability_ok, "valid state never occurred: j=" + std::to_string(j) +
                                        " i=" + std::to_string(i) + " m=" + std::to_string(m));
          continue;
        }
        if (j <= len - 1) {
          const Rat counted{BigInt(final_epoch_count[k]), BigInt(state_count[k])};
          const Rat closed = m == 1 ? next_stop_win_once(n, i) : next_stop_win_twice(n, i);
          if (counted != closed)
            flag(rep.win_probs_ok, "next-stop win mismatch at j=" + std::to_string(j) +
                                       " i=" + std::to_string(i) + " m=" + std::to_string(m) +
                                       ": counted " + counted.str() + " vs " + closed.str());
          const TransitionRow row = transitions(n, s);
          std::array<Rat, 4> kernel{Rat(0), Rat(0), Rat(0), Rat(0)};
          for (const auto& tr : row.targets) {
            const int slot =
                static_cast<int>((tr.to.i == i ? 0 : 2) + (tr.to.m - 1));
            kernel[static_cast<size_t>(slot)] += tr.prob;
          }
          for (int slot = 0; slot < 4; ++slot) {
            const Rat freq{BigInt(step_count[k][static_cast<size_t>(slot)]),
                           BigInt(state_count[k])};
            if (freq != kernel[static_cast<size_t>(slot)])
              flag(rep.kernel_ok, "kernel frequency mismatch at j=" + std::to_string(j) +
                                      " i=" + std::to_string(i) + " m=" + std::to_string(m) +
                                      " slot=" + std::to_string(slot) + ": counted " +
                                      freq.str() + " vs " + kernel[static_cast<size_t>(slot)].str());
          }
        }
      }
    }
  }
  rep.ok = rep.win_probs_ok && rep.kernel_ok && rep.reachability_ok;
  return rep;
}

namespace detail {

struct HistoryDp {
  const std::vector<std::vector<int>>* orderings = nullptr;
  const std::vector<std::vector<TraceStep>>* traces = nullptr;
  int64_t len = 0;

  // Optimal number of wins over the group of orderings sharing the observable
  // prefix of length depth, when stopping at the current applicant is still
  // allowed.
  int64_t best_wins(const std::vector<int>& group, int64_t depth) const {
    int64_t stop_wins = 0;
    for (const int idx : group)
      stop_wins += (*orderings)[static_cast<size_t>(idx)][static_cast<size_t>(depth - 1)] == 1;
    if (depth == len) return stop_wins;
    std::map<std::tuple<int, int, int>, std::vector<int>> children;
    for (const int idx : group) {
      const auto& step = (*traces)[static_cast<size_t>(idx)][static_cast<size_t>(depth)];
      children[{step.x, step.d, step.s}].push_back(idx);
    }
    int64_t continue_wins = 0;
    for (const auto& [obs, child] : children) continue_wins += best_wins(child, depth + 1);
    return std::max(stop_wins, continue_wins);
  }
};

}  // namespace detail

/// Optimal success probability over all stopping rules adapted to the full
/// observable history (not just the chain state), by backward induction on
/// the tree of histories. Certifies that the chain reduction loses nothing.
inline Rat history_dp_optimal(int64_t n, int64_t cap = 4) {
  require_within_cap(n, cap, "history_dp_optimal");
  std::vector<std::vector<int>> orderings;
  std::vector<std::vector<TraceStep>> traces;
  OrderingStream stream(n);
  std::vector<int> ordering;
  while (stream.next(ordering)) {
    orderings.push_back(ordering);
    traces.push_back(derive_trace(ordering));
  }
  std::vector<int> everyone(orderings.size());
  for (size_t k = 0; k < everyone.size(); ++k) everyone[k] = static_cast<int>(k);
  const detail::HistoryDp dp{&orderings, &traces, 2 * n};
  const int64_t wins = dp.best_wins(everyone, 1);
  return Rat(BigInt(wins), BigInt(static_cast<int64_t>(orderings.size())));
}

/// Exact success probability of the classical secretary rule (cutoff a_n)
/// over all n! orderings of n distinct qualities.
inline Rat csp_oracle(int64_t n, int64_t cap = 8) {
  require_within_cap(n, cap, "csp_oracle");
  const int64_t a = csp_threshold_a(n);
  std::vector<int> perm(static_cast<size_t>(n));
  for (int64_t k = 0; k < n; ++k) perm[static_cast<size_t>(k)] = static_cast<int>(k + 1);
  int64_t wins = 0;
  int64_t count = 0;
  do {
    ++count;
    int best_so_far = std::numeric_limits<int>::max();
    int selected = perm[static_cast<size_t>(n - 1)];
    for (int64_t j = 1; j <= n; ++j) {
      const int v = perm[static_cast<size_t>(j - 1)];
      if (v < best_so_far) {
        if (j >= a) {
          selected = v;
          break;
        }
        best_so_far = v;
      }
    }
    wins += selected == 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Rat(BigInt(wins), BigInt(count));
}

struct CspComparisonReport {
  bool subset_ok = false;       // every CSP win is also a threshold-rule win
  bool prob_matches_q = false;  // CSP rule win frequency equals q_n exactly
  int64_t csp_wins = 0;
  int64_t tau_wins = 0;
  int64_t subset_violations = 0;       // orderings where CSP wins but the rule loses
  std::vector<int> first_violation;    // lexicographically first such ordering
};

/// Event-level dominance check: maps the classical rule onto the doubled
/// sequence (select the first NEW quality with relative rank 1 at position
/// >= a_n among new qualities) and verifies its success event is contained in
/// the threshold rule's success event, ordering by ordering.
inline CspComparisonReport csp_vs_threshold_check(int64_t n, int64_t cap = -1) {
  cap = resolve_cap(cap);
  require_within_cap(n, cap, "csp_vs_threshold_check");
  const int64_t a = csp_threshold_a(n);
  const int64_t r = threshold_r(n);
  CspComparisonReport rep;
  rep.subset_ok = true;
  OrderingStream stream(n);
  std::vector<int> ordering;
  PolicyScratch scratch;
  while (stream.next(ordering)) {
    const auto trace = derive_trace(ordering);
    // first_new[d] = arrival time of the d-th new quality
    std::vector<int64_t> first_new(static_cast<size_t>(n) + 1, 0);
    for (int64_t j = 1; j <= 2 * n; ++j) {
      const auto& step = trace[static_cast<size_t>(j - 1)];
      if (first_new[static_cast<size_t>(step.d)] == 0) first_new[static_cast<size_t>(step.d)] = j;
    }
    int64_t selected = first_new[static_cast<size_t>(n)];
    for (int64_t d = a; d <= n; ++d) {
      const int64_t arrival = first_new[static_cast<size_t>(d)];
      if (trace[static_cast<size_t>(arrival - 1)].x == 1) {
        selected = arrival;
        break;
      }
    }
    const bool csp_win = ordering[static_cast<size_t>(selected - 1)] == 1;
    const bool tau_win = run_policy(ordering, r, scratch).success;
    rep.csp_wins += csp_win;
    rep.tau_wins += tau_win;
    if (csp_win && !tau_win) {
      rep.subset_ok = false;
      if (rep.subset_violations++ == 0) rep.first_violation = ordering;
    }
  }
  rep.prob_matches_q =
      Rat(BigInt(rep.csp_wins), total_orderings(n)) == csp_success_prob(n);
  return rep;
}

}  // namespace dsp::oracle
