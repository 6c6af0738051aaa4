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

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dsp {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational number: always reduced to lowest terms, denominator > 0.
//
// Several threshold decisions in this library are tight equalities at small
// problem sizes (e.g. the look-ahead index equals the cutoff exactly at n=2),
// so every probability and comparison is kept exact; conversion to double
// happens only at the output boundary.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long long value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  Rat(const BigInt& value) : v_(value) {}  // NOLINT(google-explicit-constructor)

  Rat(BigInt num, BigInt den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    v_ = Q(std::move(num), std::move(den));  // canonicalizes
  }

  Rat(long long num, long long den) : Rat(BigInt(num), BigInt(den)) {}

  BigInt num() const { return numerator(v_); }
  BigInt den() const { return denominator(v_); }

  bool is_zero() const { return v_.is_zero(); }

  double to_double() const { return v_.convert_to<double>(); }

  // "num/den", always with the slash ("1/1", "-2/3").
  std::string str() const { return num().str() + "/" + den().str(); }

  // Accepts "num/den" or a bare integer.
  static Rat parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rat(BigInt(std::string(text)));
    return Rat(BigInt(std::string(text.substr(0, slash))),
               BigInt(std::string(text.substr(slash + 1))));
  }

  Rat operator-() const { return Rat(Q(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.v_.is_zero()) throw std::domain_error("Rat: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
    return os << r.str();
  }

 private:
  using Q = boost::multiprecision::cpp_rational;
  explicit Rat(Q v) : v_(std::move(v)) {}
  Q v_;
};

}  // namespace dsp
