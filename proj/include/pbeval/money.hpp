#pragma once

// Exact monetary amounts backed by GMP rationals.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pbeval {

using Rational = mpq_class;

inline double to_double(const Rational& r) { return r.get_d(); }

/// Renders a rational as a terminating decimal when one exists, else as "p/q".
inline std::string format_rational(Rational r) {
  r.canonicalize();
  mpz_class den = r.get_den();
  int twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
  }
  const int digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled = r.get_num() * scale / r.get_den();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.get_str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) {
      s.insert(0, static_cast<std::size_t>(digits - static_cast<int>(s.size()) + 1), '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  return negative ? "-" + s : s;
}

/// Parses "123", "123.45" or "p/q". Signs, exponents, whitespace and thousands
/// separators are rejected. Returns false on malformed input.
inline bool parse_rational(std::string_view text, Rational& out) {
  if (text.empty()) return false;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    auto all_digits = [](std::string_view s) {
      if (s.empty()) return false;
      for (char c : s) if (c < '0' || c > '9') return false;
      return true;
    };
    if (!all_digits(num) || !all_digits(den)) return false;
    mpz_class d(std::string(den), 10);
    if (d == 0) return false;
    out = Rational(mpz_class(std::string(num), 10), d);
    out.canonicalize();
    return true;
  }
  std::size_t dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty()) return false;
  if (dot != std::string_view::npos && frac.empty()) return false;
  for (char c : whole) if (c < '0' || c > '9') return false;
  for (char c : frac) if (c < '0' || c > '9') return false;
  mpz_class num(std::string(whole) + std::string(frac), 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  out = Rational(num, den);
  out.canonicalize();
  return true;
}

/// A non-negative exact amount of euros.
class Money {
 public:
  Money() = default;
  Money(long whole) : value_(whole) { check(); }  // NOLINT: implicit from integer literals
  explicit Money(Rational value) : value_(std::move(value)) {
    value_.canonicalize();
    check();
  }

  static Money parse(std::string_view text) {
    Rational r;
    if (!parse_rational(text, r)) {
      throw std::invalid_argument("not a monetary amount: '" + std::string(text) + "'");
    }
    return Money(std::move(r));
  }

  /// Integer cents, e.g. Money::cents(1) == 0.01.
  static Money cents(long count) { return Money(Rational(count, 100)); }

  const Rational& value() const { return value_; }
  bool is_zero() const { return sgn(value_) == 0; }
  double to_double() const { return value_.get_d(); }
  std::string str() const { return format_rational(value_); }

  Money& operator+=(const Money& o) { value_ += o.value_; return *this; }
  Money& operator-=(const Money& o) {
    value_ -= o.value_;
    check();
    return *this;
  }

  friend Money operator+(Money a, const Money& b) { return a += b; }
  friend Money operator-(Money a, const Money& b) { return a -= b; }
  friend Money operator*(const Money& a, long k) { return Money(Rational(a.value_ * k)); }
  friend Money operator*(long k, const Money& a) { return a * k; }
  friend Money operator*(const Money& a, const Rational& k) { return Money(Rational(a.value_ * k)); }
  friend Money operator/(const Money& a, long k) {
    if (k <= 0) throw std::domain_error("Money divided by a non-positive count");
    return Money(Rational(a.value_ / k));
  }
  /// Ratio of two amounts.
  friend Rational operator/(const Money& a, const Money& b) {
    if (b.is_zero()) throw std::domain_error("ratio with a zero amount");
    return Rational(a.value_ / b.value_);
  }

  friend bool operator==(const Money& a, const Money& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Money& a, const Money& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Money& m) { return os << m.str(); }

 private:
  void check() const {
    if (sgn(value_) < 0) throw std::domain_error("negative monetary amount");
  }

  Rational value_{0};
};

}  // namespace pbeval
