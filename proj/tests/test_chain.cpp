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

#include <catch2/catch_amalgamated.hpp>

#include "dsp/chain.hpp"

using dsp::ChainState;
using dsp::Rat;

TEST_CASE("state validity matches the feasible region") {
  CHECK(dsp::is_valid_state(2, {1, 1, 1}));
  CHECK_FALSE(dsp::is_valid_state(2, {2, 1, 1}));  // only one quality seen twice
  CHECK(dsp::is_valid_state(2, {2, 1, 2}));
  CHECK(dsp::is_valid_state(2, {2, 2, 1}));
  CHECK_FALSE(dsp::is_valid_state(2, {2, 2, 2}));  // a pair needs j > i
  CHECK(dsp::is_valid_state(2, {4, 2, 2}));        // terminal
  CHECK_FALSE(dsp::is_valid_state(2, {4, 2, 1}));
  CHECK_FALSE(dsp::is_valid_state(2, {1, 3, 1}));  // i > n
  CHECK_FALSE(dsp::is_valid_state(2, {1, 1, 3}));  // m must be 1 or 2
  CHECK_FALSE(dsp::is_valid_state(2, {5, 2, 2}));  // beyond the horizon
}

TEST_CASE("kernel row from the initial state of n = 2") {
  const auto row = dsp::transitions(2, {1, 1, 1});
  REQUIRE(row.targets.size() == 3);
  CHECK(row.targets[0].to == ChainState{2, 1, 2});
  CHECK(row.targets[0].prob == Rat(1, 3));
  CHECK(row.targets[1].to == ChainState{2, 1, 1});
  CHECK(row.targets[1].prob == Rat(0));  // zero entries are kept for normalization
  CHECK(row.targets[2].to == ChainState{2, 2, 1});
  CHECK(row.targets[2].prob == Rat(2, 3));
}

TEST_CASE("kernel row from a doubled-leader state of n = 3") {
  const auto row = dsp::transitions(3, {3, 2, 2});
  REQUIRE(row.targets.size() == 3);
  CHECK(row.targets[0].to == ChainState{4, 2, 2});
  CHECK(row.targets[0].prob == Rat(1, 3));
  CHECK(row.targets[1].to == ChainState{4, 3, 1});
  CHECK(row.targets[1].prob == Rat(2, 9));
  CHECK(row.targets[2].to == ChainState{4, 3, 2});
  CHECK(row.targets[2].prob == Rat(4, 9));
}

TEST_CASE("kernel rows normalize exactly and positive targets stay valid") {
  for (std::int64_t n = 1; n <= 40; ++n) {
    for (std::int64_t j = 1; j < 2 * n; ++j) {
      for (std::int64_t i = 1; i <= n; ++i) {
        for (std::int64_t m = 1; m <= 2; ++m) {
          const ChainState s{j, i, m};
          if (!dsp::is_valid_state(n, s)) continue;
          const auto row = dsp::transitions(n, s);
          Rat sum;
          for (const auto& tr : row.targets) {
            REQUIRE(tr.prob >= Rat(0));
            if (tr.prob > Rat(0)) REQUIRE(dsp::is_valid_state(n, tr.to));
            sum += tr.prob;
          }
          REQUIRE(sum == Rat(1));
        }
      }
    }
  }
}

TEST_CASE("transitions rejects invalid and terminal states") {
  CHECK_THROWS_AS(dsp::transitions(2, {2, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(dsp::transitions(2, {4, 2, 2}), std::domain_error);
}

TEST_CASE("stop_value is i/n") {
  for (const std::int64_t n : {1, 2, 6, 19}) CHECK(dsp::stop_value(n, n) == Rat(1));
  CHECK(dsp::stop_value(2, 1) == Rat(1, 2));
  CHECK(dsp::stop_value(4, 2) == Rat(1, 2));
  CHECK_THROWS_AS(dsp::stop_value(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(dsp::stop_value(4, 5), std::invalid_argument);
}

TEST_CASE("dp_solve reproduces the closed-form optimum") {
  CHECK(dsp::dp_solve(1).value_at_start == Rat(1));
  CHECK(dsp::dp_solve(2).value_at_start == Rat(5, 6));
  for (std::int64_t n = 1; n <= 50; ++n) {
    CHECK(dsp::dp_solve(n).value_at_start == dsp::success_prob(n));
  }
}

TEST_CASE("dp stop region is the upward-closed threshold region") {
  for (std::int64_t n = 1; n <= 30; ++n) {
    const auto sol = dsp::dp_solve(n);
    const std::int64_t r = dsp::threshold_r(n);
    REQUIRE(sol.stop_region.size() == static_cast<size_t>(n - r + 1));
    CHECK(*sol.stop_region.begin() == r);
    // upward closed: every i from the minimum to n belongs to the region
    std::int64_t expected = r;
    for (const std::int64_t i : sol.stop_region) CHECK(i == expected++);
  }
}

TEST_CASE("ola_region_check certifies the look-ahead rule") {
  for (const std::int64_t n : {1, 2, 3, 7, 20, 50}) {
    const auto rep = dsp::ola_region_check(n);
    CHECK(rep.ok);
    CHECK(rep.disagreements.empty());
  }
  CHECK(dsp::ola_region_check(7).threshold == 4);
  CHECK(dsp::ola_region_check(2).threshold == 1);
}

TEST_CASE("kernel-driven recursion reproduces the next-stop win closed forms") {
  for (std::int64_t n = 1; n <= 20; ++n) CHECK(dsp::next_stop_win_recursion_check(n));
}
