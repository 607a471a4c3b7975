#include "pagesel/rational.hpp"

#include <cctype>

namespace pagesel {

std::string int128_to_string(__int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Avoid overflow on the minimum value by working in unsigned space.
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  char buf[48];
  int pos = 48;
  while (u != 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(u % 10));
    u /= 10;
  }
  std::string s;
  if (neg) s.push_back('-');
  s.append(buf + pos, 48 - pos);
  return s;
}

Rational Rational::from_decimal(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty decimal literal");
  size_t i = 0;
  Int num = 0;
  Int den = 1;
  bool any_digit = false;
  for (; i < text.size() && text[i] != '.'; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw std::invalid_argument("bad decimal literal: " + std::string(text));
    num = checked_add(checked_mul(num, 10), text[i] - '0');
    any_digit = true;
  }
  if (i < text.size()) {  // fractional part
    ++i;
    if (i == text.size()) throw std::invalid_argument("bad decimal literal: " + std::string(text));
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw std::invalid_argument("bad decimal literal: " + std::string(text));
      num = checked_add(checked_mul(num, 10), text[i] - '0');
      den = checked_mul(den, 10);
      any_digit = true;
    }
  }
  if (!any_digit) throw std::invalid_argument("bad decimal literal: " + std::string(text));
  return Rational(num, den);
}

std::string Rational::to_string() const {
  if (den_ == 1) return int128_to_string(num_);
  return int128_to_string(num_) + "/" + int128_to_string(den_);
}

std::string Rational::to_decimal_string() const {
  if (den_ == 1) return int128_to_string(num_);
  // Finite decimal iff the reduced denominator is 2^a * 5^b.
  Int d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return to_string();
  int digits = twos > fives ? twos : fives;
  Int scaled = num_;
  for (int i = 0; i < digits - twos; ++i) scaled = checked_mul(scaled, 2);
  for (int i = 0; i < digits - fives; ++i) scaled = checked_mul(scaled, 5);
  std::string s = int128_to_string(scaled < 0 ? -scaled : scaled);
  while (static_cast<int>(s.size()) <= digits) s.insert(s.begin(), '0');
  s.insert(s.size() - digits, ".");
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (scaled < 0) s.insert(s.begin(), '-');
  return s;
}

}  // namespace pagesel
