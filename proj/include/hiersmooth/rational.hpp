/*
Copyright 2026 The hiersmooth Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HIERSMOOTH_RATIONAL_HPP_
#define HIERSMOOTH_RATIONAL_HPP_

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hiersmooth {

// Exact rational number. gmpxx keeps every arithmetic result in lowest
// terms with a positive denominator; values built from text must go through
// parse_rational(), which canonicalizes.
using Rational = mpq_class;

inline std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const auto slash = text.find('/');
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  };
  std::string_view num = text.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
  if (!valid_int(num, true)) return std::nullopt;
  if (slash != std::string_view::npos && !valid_int(den, false)) return std::nullopt;

  std::string num_str(num);
  if (num_str[0] == '+') num_str.erase(0, 1);
  Rational r;
  r.get_num() = mpz_class(num_str, 10);
  if (slash == std::string_view::npos) {
    r.get_den() = 1;
  } else {
    mpz_class d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    r.get_den() = d;
  }
  r.canonicalize();
  return r;
}

// "p/q" in lowest terms, or a bare integer when q == 1.
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline bool is_integral(const Rational& r) { return r.get_den() == 1; }

// A capacity that is either a finite rational or unbounded. Only ever used
// as an operand of min(); there is no arithmetic on the unbounded value.
class Capacity {
 public:
  static Capacity unbounded() { return Capacity{}; }
  static Capacity finite(Rational value) {
    Capacity c;
    c.value_ = std::move(value);
    return c;
  }

  bool is_unbounded() const { return !value_.has_value(); }
  const Rational& value() const {
    if (!value_) throw std::logic_error("Capacity: value() on unbounded capacity");
    return *value_;
  }

  // min(this, other) where other is finite.
  Rational min_with(const Rational& other) const {
    if (!value_ || other < *value_) return other;
    return *value_;
  }

 private:
  std::optional<Rational> value_;
};

}  // namespace hiersmooth

#endif  // HIERSMOOTH_RATIONAL_HPP_
