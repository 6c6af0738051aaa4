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

// The observable Markov chain of the double secretary problem and its exact
// dynamic program.
//
// After j interviews the observable state is (i, m): i distinct qualities
// seen so far, and the current leader (relatively best quality) seen m = 1 or
// 2 times. With 2n - j applicants left, the one-step kernel is
//
//   from (i, 1):  -> (i, 2)    w.p.  1 / (2n - j)          leader's duplicate
//                 -> (i, 1)    w.p.  (2i - j - 1)/(2n - j) non-leader duplicate
//                 -> (i+1, 1)  w.p.  2(n - i) / (2n - j)   new quality
//
//   from (i, 2):  -> (i, 2)    w.p.  (2i - j)/(2n - j)     non-leader duplicate
//                 -> (i+1, 1)  w.p.  2(n-i)/(2n-j) * 1/(i+1)   new best quality
//                 -> (i+1, 2)  w.p.  2(n-i)/(2n-j) * i/(i+1)   new non-best quality
//
// A stop decision exists exactly on the (i,1) -> (i,2) transition: the
// arriving applicant is relatively best and has been seen twice. Stopping
// there wins with probability i/n.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dsp/exact.hpp"
#include "dsp/rational.hpp"

namespace dsp {

struct ChainState {
  int64_t j = 0;  // applicants interviewed so far (1..2n)
  int64_t i = 0;  // distinct qualities seen
  int64_t m = 0;  // times the current leader has been seen (1 or 2)

  friend auto operator<=>(const ChainState&, const ChainState&) = default;
};

// m = 1 requires i <= j <= 2i - 1 (at j = 2i every quality seen is paired, so
// the leader must have been seen twice); m = 2 requires i + 1 <= j <= 2i.
inline bool is_valid_state(int64_t n, const ChainState& s) {
  if (n < 1 || s.i < 1 || s.i > n || s.j < 1 || s.j > 2 * n) return false;
  if (s.m == 1) return s.i <= s.j && s.j <= 2 * s.i - 1;
  if (s.m == 2) return s.i + 1 <= s.j && s.j <= 2 * s.i;
  return false;
}

struct Transition {
  ChainState to;
  Rat prob;
};

struct TransitionRow {
  ChainState source;
  std::vector<Transition> targets;
};

/// One-step kernel row from a valid, non-terminal state. All three kernel
/// entries are emitted, including exact zeros (e.g. the (i,1) -> (i,1) entry
/// at j = 2i - 1), so rows always sum to exactly 1; entries with positive
/// probability always point at valid states for time j + 1.
inline TransitionRow transitions(int64_t n, const ChainState& s) {
  if (!is_valid_state(n, s)) throw std::invalid_argument("transitions: invalid state");
  if (s.j == 2 * n) throw std::domain_error("transitions: terminal state");
  const int64_t left = 2 * n - s.j;
  TransitionRow row{s, {}};
  if (s.m == 1) {
    row.targets.push_back({{s.j + 1, s.i, 2}, Rat(1, left)});
    row.targets.push_back({{s.j + 1, s.i, 1}, Rat(2 * s.i - s.j - 1, left)});
    row.targets.push_back({{s.j + 1, s.i + 1, 1}, Rat(2 * (n - s.i), left)});
  } else {
    row.targets.push_back({{s.j + 1, s.i, 2}, Rat(2 * s.i - s.j, left)});
    row.targets.push_back({{s.j + 1, s.i + 1, 1}, Rat(2 * (n - s.i), left * (s.i + 1))});
    row.targets.push_back({{s.j + 1, s.i + 1, 2}, Rat(2 * (n - s.i) * s.i, left * (s.i + 1))});
  }
  return row;
}

/// Win probability of stopping at a decision epoch with i distinct qualities
/// seen: i/n (the leader is overall best iff no later new quality beats it).
inline Rat stop_value(int64_t n, int64_t i) {
  if (n < 1) throw std::invalid_argument("stop_value: n must be >= 1");
  if (i < 1 || i > n) throw std::invalid_argument("stop_value: i out of range");
  return Rat(i, n);
}

struct DpSolution {
  int64_t n = 0;
  // Optimal success probability, starting before the first interview.
  Rat value_at_start;
  // i values at which stopping is (weakly) optimal at every decision epoch.
  std::set<int64_t> stop_region;
  // Value of continuing from each state, exact.
  std::map<ChainState, Rat> value_table;
};

/// Exact backward induction over all valid states. value_table[s] is the
/// success probability from state s under optimal play, given that any stop
/// opportunity at s itself has already been declined. A trajectory that never
/// stops selects applicant 2n, which wins only if that final applicant itself
/// qualifies, so the terminal continue-value is 0.
inline DpSolution dp_solve(int64_t n) {
  if (n < 1) throw std::invalid_argument("dp_solve: n must be >= 1");
  DpSolution sol;
  sol.n = n;
  auto& table = sol.value_table;
  table[{2 * n, n, 2}] = Rat(0);
  for (int64_t j = 2 * n - 1; j >= 1; --j) {
    const int64_t left = 2 * n - j;
    // m = 1: i in [ceil((j+1)/2), min(j, n)]
    for (int64_t i = (j + 2) / 2; i <= std::min(j, n); ++i) {
      Rat v = Rat(1, left) * std::max(stop_value(n, i), table.at({j + 1, i, 2}));
      if (2 * i - j - 1 > 0) v += Rat(2 * i - j - 1, left) * table.at({j + 1, i, 1});
      if (i < n) v += Rat(2 * (n - i), left) * table.at({j + 1, i + 1, 1});
      table[{j, i, 1}] = v;
    }
    // m = 2: i in [ceil(j/2), min(j - 1, n)]
    for (int64_t i = (j + 1) / 2; i <= std::min(j - 1, n); ++i) {
      Rat v(0);
      if (2 * i - j > 0) v += Rat(2 * i - j, left) * table.at({j + 1, i, 2});
      if (i < n) {
        v += Rat(2 * (n - i), left * (i + 1)) * table.at({j + 1, i + 1, 1});
        v += Rat(2 * (n - i) * i, left * (i + 1)) * table.at({j + 1, i + 1, 2});
      }
      table[{j, i, 2}] = v;
    }
  }
  sol.value_at_start = table.at({1, 1, 1});
  for (int64_t i = 1; i <= n; ++i) {
    bool stop_everywhere = true;
    for (int64_t j = i + 1; j <= std::min(2 * i, 2 * n); ++j) {
      if (stop_value(n, i) < table.at({j, i, 2})) {
        stop_everywhere = false;
        break;
      }
    }
    if (stop_everywhere) sol.stop_region.insert(i);
  }
  return sol;
}

struct OlaDisagreement {
  int64_t j = 0;
  int64_t i = 0;
  bool dp_stops = false;  // what the DP decided; the threshold rule says i >= r_n
};

struct OlaReport {
  bool ok = false;
  int64_t threshold = 0;  // r_n
  std::vector<OlaDisagreement> disagreements;
};

/// Checks that the DP-optimal stop decision at every decision epoch agrees
/// with the one-stage look-ahead threshold rule "stop iff i >= r_n" (ties in
/// favor of stopping), state by state.
inline OlaReport ola_region_check(int64_t n) {
  OlaReport rep;
  rep.threshold = threshold_r(n);
  const DpSolution sol = dp_solve(n);
  for (int64_t i = 1; i <= n; ++i) {
    for (int64_t j = i + 1; j <= std::min(2 * i, 2 * n); ++j) {
      const bool dp_stops = stop_value(n, i) >= sol.value_table.at({j, i, 2});
      if (dp_stops != (i >= rep.threshold)) rep.disagreements.push_back({j, i, dp_stops});
    }
  }
  rep.ok = rep.disagreements.empty();
  return rep;
}

/// Rebuilds the next-stop win probabilities from the kernel alone, by
/// backward induction over (i, j), and verifies they are constant in j and
/// equal to the closed forms next_stop_win_once/_twice.
///
/// Decomposing on the next arrival: the (i,1) -> (i,2) edge is a decision
/// epoch that is final with probability i/n; every other edge defers to the
/// value one step later. Terminal boundary: from state (n, 2) at time 2n
/// there is no future epoch, so its value is 0.
inline bool next_stop_win_recursion_check(int64_t n) {
  if (n < 1) throw std::invalid_argument("next_stop_win_recursion_check: n must be >= 1");
  std::map<std::pair<int64_t, int64_t>, Rat> once, twice;  // keyed by (i, j)
  twice[{n, 2 * n}] = Rat(0);
  for (int64_t i = n; i >= 1; --i) {
    for (int64_t j = std::min(2 * i - 1, 2 * n - 1); j >= i; --j) {
      const int64_t left = 2 * n - j;
      Rat v = Rat(1, left) * Rat(i, n);
      if (2 * i - j - 1 > 0) v += Rat(2 * i - j - 1, left) * once.at({i, j + 1});
      if (i < n) v += Rat(2 * (n - i), left) * once.at({i + 1, j + 1});
      once[{i, j}] = v;
      if (once.at({i, j}) != next_stop_win_once(n, i)) return false;
    }
    for (int64_t j = std::min(2 * i, 2 * n - 1); j >= i + 1; --j) {
      const int64_t left = 2 * n - j;
      Rat v(0);
      if (2 * i - j > 0) v += Rat(2 * i - j, left) * twice.at({i, j + 1});
      if (i < n) {
        v += Rat(2 * (n - i), left * (i + 1)) * once.at({i + 1, j + 1});
        v += Rat(2 * (n - i) * i, left * (i + 1)) * twice.at({i + 1, j + 1});
      }
      twice[{i, j}] = v;
      if (twice.at({i, j}) != next_stop_win_twice(n, i)) return false;
    }
  }
  return true;
}

}  // namespace dsp
