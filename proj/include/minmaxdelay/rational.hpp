#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mmd {

// Arbitrary-precision rational number, kept in lowest terms with a positive
// denominator. All arithmetic is exact; there is no implicit conversion to
// floating point anywhere in the library.
class Rational {
 public:
  Rational() : value_(0) {}
  Rational(int n) : value_(n) {}
  Rational(long n) : value_(static_cast<long>(n)) {}
  Rational(long long n) : value_(int64_str(n), 10) {}

  Rational(long long num, long long den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(int64_str(num) + "/" + int64_str(den), 10);
    value_.canonicalize();
  }

  explicit Rational(const mpq_class& q) : value_(q) { value_.canonicalize(); }

  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }

  // Accepts "p" or "p/q" with an optional leading minus on p.
  // Returns nullopt for anything else (whitespace included).
  static std::optional<Rational> parse(const std::string& text);

  const mpz_class& numerator() const { return value_.get_num(); }
  const mpz_class& denominator() const { return value_.get_den(); }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_negative() const { return sgn(value_) < 0; }
  bool is_positive() const { return sgn(value_) > 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  // Value as int64, valid only for integers in range.
  std::int64_t to_int64() const {
    if (!is_integer() || !value_.get_num().fits_slong_p())
      throw std::domain_error("rational does not fit in int64");
    return value_.get_num().get_si();
  }

  // "p" for integers, "p/q" otherwise.
  std::string str() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.value_ + b.value_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.value_ - b.value_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.value_ * b.value_)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("rational division by zero");
    return Rational(mpq_class(a.value_ / b.value_));
  }
  Rational operator-() const { return Rational(mpq_class(-value_)); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.value_.get_mpq_t(), b.value_.get_mpq_t()) != 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = mpq_cmp(a.value_.get_mpq_t(), b.value_.get_mpq_t());
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  const mpq_class& raw() const { return value_; }

 private:
  static std::string int64_str(long long n) {
    return std::to_string(n);
  }

  mpq_class value_;
};

inline std::optional<Rational> Rational::parse(const std::string& text) {
  auto digits = [](const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  bool neg = !num.empty() && num[0] == '-';
  if (neg) num = num.substr(1);
  if (!digits(num) || !digits(den)) return std::nullopt;
  mpz_class n(num, 10), d(den, 10);
  if (d == 0) return std::nullopt;
  if (neg) n = -n;
  return Rational(n, d);
}

inline Rational rational_min(const Rational& a, const Rational& b) { return a <= b ? a : b; }
inline Rational rational_max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

}  // namespace mmd
