#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pagesel {

/// Exact rational arithmetic over 128-bit integers.
///
/// Relation-graph weights are sums of prevalue/|VOP| terms, so keeping them
/// exact makes edge comparisons, the greedy argmax, and the
/// residual + saved = total identity reproducible bit for bit. Denominators
/// are bounded by lcm(1..NOF) times the prevalue denominator, which stays
/// far below the 128-bit range for any instance this tool handles; on
/// overflow the operations throw instead of silently wrapping.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(Int num, Int den) : num_(num), den_(den) { normalize(); }

  /// Parses a non-negative decimal literal ("2", "0.5", "1.25") exactly.
  static Rational from_decimal(std::string_view text);

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator+(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const {
    return Rational(checked_sub(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator*(const Rational& o) const {
    return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    return Rational(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
  }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  /// Lowest-terms form: "7", "-3/2".
  std::string to_string() const;

  /// Exact decimal when the denominator divides a power of ten ("1.5"),
  /// otherwise falls back to the fraction form.
  std::string to_decimal_string() const;

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

 private:
  static Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }
  static Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }
  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    Int g = gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  Int num_;
  Int den_;
};

std::string int128_to_string(__int128 v);

}  // namespace pagesel
