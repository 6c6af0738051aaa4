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

// Command-line front end. Tables are CSV by default (one leading '#' comment
// with command echo and version); --json switches to one JSON object per
// line. Rationals are serialized as "num/den" strings and floats at 12
// significant digits, so outputs are stable and parse back losslessly.
//
// Exit codes: 0 success, 2 usage error, 1 failed --verify cross-check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsp/chain.hpp"
#include "dsp/exact.hpp"
#include "dsp/montecarlo.hpp"
#include "dsp/oracle.hpp"
#include "dsp/rational.hpp"
#include "dsp/version.hpp"

namespace {

using dsp::Rat;
using nlohmann::ordered_json;

class verify_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Rows are ordered key/value maps; values are ints or preformatted strings.
class Writer {
 public:
  Writer(bool json_mode, std::string command)
      : json_(json_mode), command_(std::move(command)), timestamp_(iso_timestamp()) {}

  void emit(const ordered_json& row) {
    if (json_) {
      ordered_json out = row;
      out["command"] = command_;
      out["version"] = std::string(dsp::kVersion);
      out["timestamp"] = timestamp_;
      std::cout << out.dump() << "\n";
      return;
    }
    if (!header_done_) {
      std::cout << "# command=" << command_ << " version=" << dsp::kVersion
                << " timestamp=" << timestamp_ << "\n";
      bool first = true;
      for (const auto& [key, value] : row.items()) {
        std::cout << (first ? "" : ",") << key;
        first = false;
      }
      std::cout << "\n";
      header_done_ = true;
    }
    bool first = true;
    for (const auto& [key, value] : row.items()) {
      std::cout << (first ? "" : ",");
      if (value.is_string()) {
        std::cout << value.get<std::string>();
      } else {
        std::cout << value.dump();
      }
      first = false;
    }
    std::cout << "\n";
  }

 private:
  bool json_;
  bool header_done_ = false;
  std::string command_;
  std::string timestamp_;
};

struct CommonFlags {
  bool json = false;
  bool verify = false;
  int threads = 1;
};

void add_common(CLI::App* sub, CommonFlags* flags) {
  sub->add_flag("--json", flags->json, "emit one JSON object per line instead of CSV");
  sub->add_flag("--verify", flags->verify, "run cross-checks; exit 1 on any mismatch");
  sub->add_option("--threads", flags->threads, "worker thread count (never changes results)")
      ->check(CLI::Range(1, 256));
}

std::string echo_command(int argc, char** argv) {
  std::string echo = "dsp";
  for (int k = 1; k < argc; ++k) {
    echo += ' ';
    echo += argv[k];
  }
  return echo;
}

void run_thresholds(const CommonFlags& flags, std::int64_t n_max, Writer& out) {
  if (n_max < 1) throw std::invalid_argument("thresholds: --n-max must be >= 1");
  const auto rs = dsp::threshold_r_table(n_max);
  const auto as = dsp::csp_threshold_a_table(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto r = rs[static_cast<size_t>(n - 1)];
    const auto a = as[static_cast<size_t>(n - 1)];
    out.emit({{"n", n},
              {"r_n", r},
              {"a_n", a},
              {"r_over_n", fmt_double(static_cast<double>(r) / static_cast<double>(n))},
              {"a_over_n", fmt_double(static_cast<double>(a) / static_cast<double>(n))}});
  }
  if (flags.verify) {
    for (std::int64_t n = 1; n <= n_max; n = n < 64 ? n + 1 : n + n / 7) {
      if (rs[static_cast<size_t>(n - 1)] != dsp::threshold_r(n) ||
          as[static_cast<size_t>(n - 1)] != dsp::csp_threshold_a(n))
        throw verify_failure("thresholds: table and direct computation disagree at n=" +
                             std::to_string(n));
    }
    for (std::int64_t n = 2; n <= n_max; ++n) {
      if (rs[static_cast<size_t>(n - 1)] < rs[static_cast<size_t>(n - 2)])
        throw verify_failure("thresholds: r_n is not nondecreasing at n=" + std::to_string(n));
    }
  }
}

void run_prob(const CommonFlags& flags, std::int64_t n, bool exact, Writer& out) {
  if (n < 1) throw std::invalid_argument("prob: --n must be >= 1");
  if (exact && n > dsp::kExactComparisonBound)
    throw std::invalid_argument("prob: --exact supports n <= 10000");
  ordered_json row{{"n", n}};
  if (n <= dsp::kExactComparisonBound) {
    const Rat p = dsp::success_prob(n);
    const Rat q = dsp::csp_success_prob(n);
    row["p"] = fmt_double(p.to_double());
    row["q"] = fmt_double(q.to_double());
    row["p_minus_q"] = fmt_double((p - q).to_double());
    if (exact) {
      row["p_exact"] = p.str();
      row["q_exact"] = q.str();
      row["p_minus_q_exact"] = (p - q).str();
    }
    if (flags.verify) {
      if (!(p > q) && n >= 2) throw verify_failure("prob: p_n > q_n failed");
      if (n <= 50 && dsp::dp_solve(n).value_at_start != p)
        throw verify_failure("prob: dynamic program disagrees with the closed form");
      if (n <= dsp::oracle::default_enum_cap() &&
          dsp::oracle::exact_policy_prob(n, dsp::threshold_r(n), flags.threads) != p)
        throw verify_failure("prob: enumeration disagrees with the closed form");
    }
  } else {
    const double p = dsp::success_prob_approx(n);
    const double q = dsp::csp_success_prob_approx(n);
    row["p"] = fmt_double(p);
    row["q"] = fmt_double(q);
    row["p_minus_q"] = fmt_double(p - q);
    if (flags.verify && !(p > q)) throw verify_failure("prob: p_n > q_n failed");
  }
  out.emit(row);
}

void run_limits(const CommonFlags& flags, double tol, Writer& out) {
  const auto sol = dsp::solve_limit(tol);
  const double residual = std::fabs(sol.r * std::exp(-2.0 / sol.r) - std::exp(-5.0));
  out.emit({{"r", fmt_double(sol.r)},
            {"p_limit", fmt_double(sol.p_limit)},
            {"residual", fmt_double(residual)},
            {"iterations", sol.iterations},
            {"tol", fmt_double(sol.tolerance)}});
  if (flags.verify) {
    if (residual > tol) throw verify_failure("limits: residual above tolerance");
    const auto r2000 = static_cast<double>(dsp::threshold_r(2000)) / 2000.0;
    if (std::fabs(r2000 - sol.r) > 5e-3)
      throw verify_failure("limits: finite-size cutoff ratio far from the limit");
  }
}

void run_oracle(const CommonFlags& flags, std::int64_t n, std::int64_t threshold,
                bool allow_large, Writer& out) {
  if (n < 1) throw std::invalid_argument("oracle: --n must be >= 1");
  const std::int64_t cap = allow_large ? n : dsp::oracle::default_enum_cap();
  const std::int64_t t = threshold > 0 ? threshold : dsp::threshold_r(n);
  const Rat p = dsp::oracle::exact_policy_prob(n, t, flags.threads, cap);
  out.emit({{"n", n},
            {"threshold", t},
            {"p", fmt_double(p.to_double())},
            {"p_exact", p.str()}});
  if (flags.verify) {
    if (t == dsp::threshold_r(n)) {
      if (p != dsp::success_prob(n))
        throw verify_failure("oracle: enumeration disagrees with the closed form");
      if (p != dsp::dp_solve(n).value_at_start)
        throw verify_failure("oracle: enumeration disagrees with the dynamic program");
    }
    const auto table = dsp::oracle::best_threshold(n, flags.threads, cap);
    const auto& maxers = table.maximizers;
    if (std::find(maxers.begin(), maxers.end(), dsp::threshold_r(n)) == maxers.end())
      throw verify_failure("oracle: optimal cutoff not among the empirical maximizers");
  }
}

void run_dp(const CommonFlags& flags, std::int64_t n, Writer& out) {
  if (n < 1) throw std::invalid_argument("dp: --n must be >= 1");
  const auto sol = dsp::dp_solve(n);
  out.emit({{"n", n},
            {"value", fmt_double(sol.value_at_start.to_double())},
            {"value_exact", sol.value_at_start.str()},
            {"region_min", *sol.stop_region.begin()},
            {"r_n", dsp::threshold_r(n)}});
  if (flags.verify) {
    if (sol.value_at_start != dsp::success_prob(n))
      throw verify_failure("dp: value disagrees with the closed form");
    if (!dsp::ola_region_check(n).ok)
      throw verify_failure("dp: stop region differs from the threshold region");
  }
}

void run_simulate(const CommonFlags& flags, std::int64_t n, std::int64_t threshold,
                  std::int64_t trials, std::uint64_t seed, Writer& out) {
  if (n < 1) throw std::invalid_argument("simulate: --n must be >= 1");
  if (trials < 1) throw std::invalid_argument("simulate: --trials must be >= 1");
  const std::int64_t t = threshold > 0 ? threshold : dsp::threshold_r(n);
  const auto est = dsp::mc::estimate(n, t, trials, seed, flags.threads);
  out.emit({{"n", est.n},
            {"threshold", est.threshold},
            {"trials", est.trials},
            {"successes", est.successes},
            {"p_hat", fmt_double(est.p_hat)},
            {"std_err", fmt_double(est.std_err)},
            {"seed", est.seed},
            {"rng", est.rng}});
  if (flags.verify && n <= dsp::kExactComparisonBound) {
    const double exact = dsp::success_prob(n).to_double();
    if (est.std_err > 0 && std::fabs(est.p_hat - exact) > 5.0 * est.std_err)
      throw verify_failure("simulate: estimate more than 5 standard errors from the closed form");
  }
}

void run_transitions(const CommonFlags& flags, std::int64_t n, std::int64_t j, std::int64_t i,
                     std::int64_t m, Writer& out) {
  if (n < 1) throw std::invalid_argument("transitions: --n must be >= 1");
  const auto row = dsp::transitions(n, {j, i, m});
  Rat sum;
  for (const auto& tr : row.targets) {
    sum += tr.prob;
    if (tr.prob == Rat(0)) continue;  // zero entries stay internal
    out.emit({{"j", j},
              {"i", i},
              {"m", m},
              {"j_next", tr.to.j},
              {"i_next", tr.to.i},
              {"m_next", tr.to.m},
              {"p", fmt_double(tr.prob.to_double())},
              {"p_exact", tr.prob.str()}});
  }
  if (flags.verify && sum != Rat(1)) throw verify_failure("transitions: row does not sum to 1");
}

void run_table(const CommonFlags& flags, std::int64_t n_max, bool exact, Writer& out) {
  if (n_max < 1) throw std::invalid_argument("table: --n-max must be >= 1");
  constexpr std::int64_t kExactTableBound = 1000;
  if (exact && n_max > kExactTableBound)
    throw std::invalid_argument("table: --exact supports n-max <= 1000");
  const auto rs = dsp::threshold_r_table(n_max);
  const auto as = dsp::csp_threshold_a_table(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    ordered_json row{{"n", n},
                     {"r_n", rs[static_cast<size_t>(n - 1)]},
                     {"a_n", as[static_cast<size_t>(n - 1)]}};
    if (n <= kExactTableBound) {
      const Rat p = dsp::success_prob(n);
      const Rat q = dsp::csp_success_prob(n);
      row["p"] = fmt_double(p.to_double());
      row["q"] = fmt_double(q.to_double());
      row["p_minus_q"] = fmt_double((p - q).to_double());
      if (exact) {
        row["p_exact"] = p.str();
        row["q_exact"] = q.str();
      }
      if (flags.verify && n >= 2 && !(p > q))
        throw verify_failure("table: p_n > q_n failed at n=" + std::to_string(n));
    } else {
      row["p"] = fmt_double(dsp::success_prob_approx(n));
      row["q"] = fmt_double(dsp::csp_success_prob_approx(n));
      row["p_minus_q"] =
          fmt_double(dsp::success_prob_approx(n) - dsp::csp_success_prob_approx(n));
    }
    out.emit(row);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double secretary problem: exact thresholds, probabilities, oracles, simulation"};
  app.require_subcommand(1);

  CommonFlags flags;

  std::int64_t n = 1;
  std::int64_t n_max = 1;
  std::int64_t threshold = 0;  // 0 = use r_n
  std::int64_t trials = 100000;
  std::int64_t j = 1, i = 1, m = 1;
  double tol = 1e-12;
  bool exact = false;
  bool allow_large = false;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* c_thresholds = app.add_subcommand("thresholds", "cutoffs r_n and a_n for n = 1..n-max");
  c_thresholds->add_option("--n-max", n_max, "largest n")->required();
  add_common(c_thresholds, &flags);

  auto* c_prob = app.add_subcommand("prob", "success probabilities p_n and q_n");
  c_prob->add_option("--n", n, "problem size")->required();
  c_prob->add_flag("--exact", exact, "also emit exact rationals (n <= 10000)");
  add_common(c_prob, &flags);

  auto* c_limits = app.add_subcommand("limits", "limiting cutoff ratio and success probability");
  c_limits->add_option("--tol", tol, "residual tolerance, in (0, 1e-6)");
  add_common(c_limits, &flags);

  auto* c_oracle = app.add_subcommand("oracle", "exhaustive-enumeration success probability");
  c_oracle->add_option("--n", n, "problem size")->required();
  c_oracle->add_option("--threshold", threshold, "cutoff t (default r_n)");
  c_oracle->add_flag("--allow-large", allow_large, "lift the enumeration cap up to n");
  add_common(c_oracle, &flags);

  auto* c_dp = app.add_subcommand("dp", "exact backward-induction value and stop region");
  c_dp->add_option("--n", n, "problem size")->required();
  add_common(c_dp, &flags);

  auto* c_sim = app.add_subcommand("simulate", "seeded Monte Carlo estimate");
  c_sim->add_option("--n", n, "problem size")->required();
  c_sim->add_option("--threshold", threshold, "cutoff t (default r_n)");
  c_sim->add_option("--trials", trials, "number of simulated orderings");
  c_sim->add_option("--seed", seed, "RNG seed (generated and reported if omitted)");
  add_common(c_sim, &flags);

  auto* c_trans = app.add_subcommand("transitions", "one-step kernel row from a chain state");
  c_trans->add_option("--n", n, "problem size")->required();
  c_trans->add_option("--j", j, "applicants interviewed")->required();
  c_trans->add_option("--i", i, "distinct qualities seen")->required();
  c_trans->add_option("--m", m, "times the leader was seen (1 or 2)")->required();
  add_common(c_trans, &flags);

  auto* c_table = app.add_subcommand("table", "combined reproduction table (r, a, p, q)");
  c_table->add_option("--n-max", n_max, "largest n")->required();
  c_table->add_flag("--exact", exact, "also emit exact rationals (n-max <= 1000)");
  add_common(c_table, &flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Writer out(flags.json, echo_command(argc, argv));
  try {
    if (c_thresholds->parsed()) {
      run_thresholds(flags, n_max, out);
    } else if (c_prob->parsed()) {
      run_prob(flags, n, exact, out);
    } else if (c_limits->parsed()) {
      run_limits(flags, tol, out);
    } else if (c_oracle->parsed()) {
      run_oracle(flags, n, threshold, allow_large, out);
    } else if (c_dp->parsed()) {
      run_dp(flags, n, out);
    } else if (c_sim->parsed()) {
      seed_given = c_sim->count("--seed") > 0;
      if (!seed_given) {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      }
      run_simulate(flags, n, threshold, trials, seed, out);
    } else if (c_trans->parsed()) {
      run_transitions(flags, n, j, i, m, out);
    } else if (c_table->parsed()) {
      run_table(flags, n_max, exact, out);
    }
  } catch (const verify_failure& e) {
    std::cerr << "verify failed: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dsp::oracle::enum_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    // state-space domain violations (e.g. kernel row of a terminal state)
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
