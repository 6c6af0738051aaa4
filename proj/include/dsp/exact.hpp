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

// Closed-form quantities for the double secretary problem: 2n applicants of n
// distinct qualities, two of each, interviewed in uniformly random order. The
// optimal rule accepts the first applicant that is relatively best, has been
// seen twice, and arrives once at least r_n distinct qualities are known.
//
// Everything here is a pure function; thresholds are decided with exact
// rational comparisons unless the problem size exceeds `exact_bound`, above
// which a guarded floating-point path is allowed (the comparison margin is
// checked against rounding error and the exact path is the fallback).

#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dsp/rational.hpp"

namespace dsp {

using std::int64_t;

// Problem sizes up to this bound use exact rational threshold comparisons.
inline constexpr int64_t kExactComparisonBound = 10000;

// Thrown when an iterative numeric routine fails to meet its tolerance.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Unreduced sum_{j=a}^{b} 1/j as (num, den), den = product of the range.
// Divide and conquer keeps the intermediate integers balanced.
inline std::pair<BigInt, BigInt> harmonic_raw(int64_t a, int64_t b) {
  if (a > b) return {BigInt(0), BigInt(1)};
  if (a == b) return {BigInt(1), BigInt(a)};
  const int64_t mid = a + (b - a) / 2;
  auto [n1, d1] = harmonic_raw(a, mid);
  auto [n2, d2] = harmonic_raw(mid + 1, b);
  return {n1 * d2 + n2 * d1, d1 * d2};
}

// 2n/i + sum_{l=i}^{n-1} 1/l <= bound, decided in integers (no reduction).
inline bool alpha_leq(int64_t n, int64_t i, int64_t bound) {
  auto [num, den] = harmonic_raw(i, n - 1);
  return den * (2 * n) + num * i <= den * (bound * i);
}

// sum_{l=i}^{n-1} 1/l <= 1
inline bool csp_tail_leq_one(int64_t n, int64_t i) {
  auto [num, den] = harmonic_raw(i, n - 1);
  return num <= den;
}

// Exact running sum of unit fractions over a sliding window. Kept unreduced
// between operations; a gcd pass runs every few hundred updates so the
// denominator stays near lcm(window) instead of growing without bound.
class WindowSum {
 public:
  void add_unit(int64_t q) {
    num_ = num_ * q + den_;
    den_ *= q;
    maybe_reduce();
  }
  void sub_unit(int64_t q) {
    num_ = num_ * q - den_;
    den_ *= q;
    maybe_reduce();
  }
  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

 private:
  void maybe_reduce() {
    if (++pending_ < 256) return;
    pending_ = 0;
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  BigInt num_ = 0;
  BigInt den_ = 1;
  int pending_ = 0;
};

// H_{n-1} - H_{i-1} in doubles via digamma.
inline double harmonic_tail_f(int64_t i, int64_t n) {
  return boost::math::digamma(static_cast<double>(n)) -
         boost::math::digamma(static_cast<double>(i));
}

inline double alpha_f(int64_t n, int64_t i) {
  return 2.0 * static_cast<double>(n) / static_cast<double>(i) +
         harmonic_tail_f(i, n);
}

// Smallest i in [1, n] with pred(i) true; pred must be monotone (false..true).
template <typename Pred>
int64_t first_true(int64_t n, Pred pred) {
  int64_t lo = 1, hi = n;
  while (lo < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

// s_{r-1} = sum_{i=1}^{r-1} prod_{j=i}^{r-1} 2(n-j)/(2(n-j)+1) as an
// unreduced (num, den) pair via the forward recurrence s_i = c_i (1 + s_{i-1}).
// Working in integers avoids a gcd per step; the caller reduces once.
inline std::pair<BigInt, BigInt> chained_product_sum_raw(int64_t n, int64_t r) {
  BigInt num = 0;
  BigInt den = 1;
  for (int64_t i = 1; i < r; ++i) {
    const BigInt even = 2 * (n - i);
    num = even * (den + num);
    den *= even + 1;
  }
  return {num, den};
}

}  // namespace detail

/// sum_{j=a}^{b} 1/j, exactly; zero when a > b (empty-sum convention).
inline Rat harmonic_tail(int64_t a, int64_t b) {
  if (a < 1) throw std::invalid_argument("harmonic_tail: a must be >= 1");
  auto [num, den] = detail::harmonic_raw(a, b);
  return Rat(num, den);
}

/// Look-ahead index alpha(i) = 2n/i + sum_{j=i+1}^{n} 1/(j-1). Stopping at a
/// qualifying applicant with i distinct qualities seen is optimal exactly
/// when alpha(i) <= 5. Strictly decreasing in i, with alpha(n) = 2; an index,
/// not a probability.
inline Rat alpha(int64_t n, int64_t i) {
  if (n < 1) throw std::invalid_argument("alpha: n must be >= 1");
  if (i < 1 || i > n) throw std::invalid_argument("alpha: i out of range");
  return Rat(2 * n, i) + harmonic_tail(i, n - 1);
}

/// Optimal cutoff r_n = min{ i >= 1 : alpha(i) <= 5 }.
///
/// Exact rational comparisons for n <= exact_bound. At n = 2 the comparison
/// is a tight equality (alpha(1) = 5), so floating point would misclassify;
/// above the bound a digamma-based evaluation is used and the result is
/// accepted only if the comparison margin clearly exceeds rounding error.
inline int64_t threshold_r(int64_t n, int64_t exact_bound = kExactComparisonBound) {
  if (n < 1) throw std::invalid_argument("threshold_r: n must be >= 1");
  const auto exact = [n] {
    return detail::first_true(n, [n](int64_t i) { return detail::alpha_leq(n, i, 5); });
  };
  if (n <= exact_bound) return exact();
  const int64_t r = detail::first_true(
      n, [n](int64_t i) { return detail::alpha_f(n, i) <= 5.0; });
  double margin = std::fabs(detail::alpha_f(n, r) - 5.0);
  if (r > 1) margin = std::min(margin, std::fabs(detail::alpha_f(n, r - 1) - 5.0));
  if (margin > 1e-7) return r;
  return exact();
}

/// Classical secretary cutoff a_n = min{ i >= 1 : sum_{j=i+1}^{n} 1/(j-1) <= 1 }.
/// Tight equality at n = 2 again (the sum is exactly 1 at i = 1).
inline int64_t csp_threshold_a(int64_t n, int64_t exact_bound = kExactComparisonBound) {
  if (n < 1) throw std::invalid_argument("csp_threshold_a: n must be >= 1");
  const auto exact = [n] {
    return detail::first_true(n, [n](int64_t i) { return detail::csp_tail_leq_one(n, i); });
  };
  if (n <= exact_bound) return exact();
  const int64_t a = detail::first_true(
      n, [n](int64_t i) { return detail::harmonic_tail_f(i, n) <= 1.0; });
  double margin = std::fabs(detail::harmonic_tail_f(a, n) - 1.0);
  if (a > 1) margin = std::min(margin, std::fabs(detail::harmonic_tail_f(a - 1, n) - 1.0));
  if (margin > 1e-7) return a;
  return exact();
}

/// r_1..r_{n_max} in one sweep. Maintains the tail sum over a sliding window
/// [i, n-1]; correctness rests on alpha being decreasing in i and increasing
/// in n (alpha(n+1, i) - alpha(n, i) = 2/i + 1/(n-1) > 0), so the candidate
/// cutoff never moves backwards.
inline std::vector<int64_t> threshold_r_table(int64_t n_max,
                                              int64_t exact_bound = kExactComparisonBound) {
  if (n_max < 1) throw std::invalid_argument("threshold_r_table: n_max must be >= 1");
  std::vector<int64_t> out;
  out.reserve(static_cast<size_t>(n_max));
  detail::WindowSum tail;  // sum_{l=i}^{n-1} 1/l
  int64_t i = 1;
  for (int64_t n = 1; n <= std::min(n_max, exact_bound); ++n) {
    if (n - 1 >= i) tail.add_unit(n - 1);
    // alpha(n, i) > 5  <=>  2n*den + i*num > 5*i*den
    while (tail.den() * (2 * n) + tail.num() * i > tail.den() * (5 * i)) {
      tail.sub_unit(i);
      ++i;
    }
    out.push_back(i);
  }
  for (int64_t n = exact_bound + 1; n <= n_max; ++n) out.push_back(threshold_r(n, exact_bound));
  return out;
}

/// a_1..a_{n_max}; same sliding-window scheme as threshold_r_table.
inline std::vector<int64_t> csp_threshold_a_table(int64_t n_max,
                                                  int64_t exact_bound = kExactComparisonBound) {
  if (n_max < 1) throw std::invalid_argument("csp_threshold_a_table: n_max must be >= 1");
  std::vector<int64_t> out;
  out.reserve(static_cast<size_t>(n_max));
  detail::WindowSum tail;
  int64_t i = 1;
  for (int64_t n = 1; n <= std::min(n_max, exact_bound); ++n) {
    if (n - 1 >= i) tail.add_unit(n - 1);
    while (tail.num() > tail.den()) {
      tail.sub_unit(i);
      ++i;
    }
    out.push_back(i);
  }
  for (int64_t n = exact_bound + 1; n <= n_max; ++n) out.push_back(csp_threshold_a(n, exact_bound));
  return out;
}

/// Probability that committing to the next qualifying stop wins, given i
/// distinct qualities seen and the current leader seen once: (2n+i)/(3n).
inline Rat next_stop_win_once(int64_t n, int64_t i) {
  if (n < 1) throw std::invalid_argument("next_stop_win_once: n must be >= 1");
  if (i < 1 || i > n) throw std::invalid_argument("next_stop_win_once: i out of range");
  return Rat(2 * n + i, 3 * n);
}

/// Same as next_stop_win_once but with the current leader already seen twice:
/// 2(n-i)/(3n) + (i/(3n)) * sum_{l=i+1}^{n} 1/(l-1).
inline Rat next_stop_win_twice(int64_t n, int64_t i) {
  if (n < 1) throw std::invalid_argument("next_stop_win_twice: n must be >= 1");
  if (i < 1 || i > n) throw std::invalid_argument("next_stop_win_twice: i out of range");
  return Rat(2 * (n - i), 3 * n) + Rat(i, 3 * n) * harmonic_tail(i, n - 1);
}

/// Probability that when the distinct-quality count first reaches r_n, the
/// current leader has been seen only once (its duplicate is still pending):
/// (1/r_n) * (1 + sum_{i=1}^{r_n-1} prod_{j=i}^{r_n-1} 2(n-j)/(2(n-j)+1)).
inline Rat prob_duplicate_pending(int64_t n) {
  if (n < 1) throw std::invalid_argument("prob_duplicate_pending: n must be >= 1");
  const int64_t r = threshold_r(n);
  auto [num, den] = detail::chained_product_sum_raw(n, r);
  return Rat(den + num, r * den);
}

/// Success probability p_n of the optimal rule:
/// (1/(3n)) * { (1 - r_n + s) * (3 - sum_{l=r_n}^{n-1} 1/l) + 2n + r_n },
/// where s is the chained product sum from prob_duplicate_pending.
inline Rat success_prob(int64_t n) {
  if (n < 1) throw std::invalid_argument("success_prob: n must be >= 1");
  const int64_t r = threshold_r(n);
  auto [num, den] = detail::chained_product_sum_raw(n, r);
  const Rat s(num, den);
  return Rat(1, 3 * n) *
         ((Rat(1 - r) + s) * (Rat(3) - harmonic_tail(r, n - 1)) + Rat(2 * n + r));
}

/// Classical secretary success probability q_n with n distinct applicants:
/// ((a_n - 1)/n) * sum_{j=a_n}^{n} 1/(j-1).
///
/// The displayed formula degenerates to 0 when a_n = 1 although the rule
/// "accept the first applicant" plainly wins with probability 1/n (and q_1
/// must be 1, q_2 must be 1/2); that case is special-cased to 1/n.
inline Rat csp_success_prob(int64_t n) {
  if (n < 1) throw std::invalid_argument("csp_success_prob: n must be >= 1");
  const int64_t a = csp_threshold_a(n);
  if (a == 1) return Rat(1, n);
  return Rat(a - 1, n) * harmonic_tail(a - 1, n - 1);
}

/// Floating-point evaluation of p_n for sizes where the exact integer
/// recurrence is too large to be worthwhile. All terms are positive and
/// bounded, so the error stays near rounding level.
inline double success_prob_approx(int64_t n) {
  if (n < 1) throw std::invalid_argument("success_prob_approx: n must be >= 1");
  const int64_t r = threshold_r(n);
  double s = 0;
  for (int64_t i = 1; i < r; ++i) {
    const auto even = static_cast<double>(2 * (n - i));
    s = even / (even + 1.0) * (1.0 + s);
  }
  const double tail = r <= n - 1 ? detail::harmonic_tail_f(r, n) : 0.0;
  return ((1.0 - static_cast<double>(r) + s) * (3.0 - tail) +
          static_cast<double>(2 * n + r)) /
         (3.0 * static_cast<double>(n));
}

/// Floating-point evaluation of q_n, same caveats as success_prob_approx.
inline double csp_success_prob_approx(int64_t n) {
  if (n < 1) throw std::invalid_argument("csp_success_prob_approx: n must be >= 1");
  const int64_t a = csp_threshold_a(n);
  if (a == 1) return 1.0 / static_cast<double>(n);
  return static_cast<double>(a - 1) / static_cast<double>(n) *
         detail::harmonic_tail_f(a - 1, n);
}

struct LimitSolution {
  double r = 0;          // limit of r_n / n
  double p_limit = 0;    // limit of the success probability p_n
  double tolerance = 0;  // residual bound |f(r) - e^{-5}| that was requested
  int iterations = 0;    // bisection steps performed
};

/// Limiting success probability as a function of the limiting cutoff ratio:
/// p(r) = r + (4/(3r)) * ((1-r)^{3/2} - (1-r)^2). Degenerates to 1 at r = 1.
inline double limit_p_at(double r) {
  const double u = 1.0 - r;
  return r + 4.0 / (3.0 * r) * (u * std::sqrt(u) - u * u);
}

/// Solves f(x) = x e^{-2/x} = e^{-5} on [e^{-5}, 1] by bisection. f is
/// strictly increasing there and f(e^{-5}) < e^{-5} < f(1) = e^{-2}, so the
/// root exists and is unique; r_n / n converges to it.
inline LimitSolution solve_limit(double tolerance) {
  if (!(tolerance > 0.0) || !(tolerance < 1e-6))
    throw std::invalid_argument("solve_limit: tolerance must be in (0, 1e-6)");
  const double target = std::exp(-5.0);
  const auto f = [](double x) { return x * std::exp(-2.0 / x); };
  double lo = target, hi = 1.0;
  double mid = 0.5 * (lo + hi);
  constexpr int kMaxIterations = 200;
  int it = 0;
  while (it < kMaxIterations) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // interval is one ulp wide
    ++it;
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::fabs(f(mid) - target) > tolerance)
    throw convergence_error("solve_limit: residual above tolerance");
  return LimitSolution{mid, limit_p_at(mid), tolerance, it};
}

/// Limit of r_n / n (approx. 0.470927).
inline double limit_r(double tolerance) { return solve_limit(tolerance).r; }

/// Limit of p_n (approx. 0.767974).
inline double limit_p(double tolerance) { return solve_limit(tolerance).p_limit; }

}  // namespace dsp
