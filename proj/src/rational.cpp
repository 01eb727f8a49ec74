#include "qcf/rational.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <numeric>

namespace qcf {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

u128 magnitude(i128 x) { return x < 0 ? -static_cast<u128>(x) : static_cast<u128>(x); }

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(i128 x) {
  return x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max();
}

// Reduces num/den (den != 0) and narrows to 64 bits.
void narrow(i128 num, i128 den, std::int64_t& out_num, std::int64_t& out_den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  u128 g = gcd128(magnitude(num), static_cast<u128>(den));
  if (g > 1) {
    num /= static_cast<i128>(g);
    den /= static_cast<i128>(g);
  }
  if (num == 0) den = 1;
  if (!fits(num) || !fits(den)) throw RationalOverflow("rational overflow");
  out_num = static_cast<std::int64_t>(num);
  out_den = static_cast<std::int64_t>(den);
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) throw RationalOverflow("integer literal out of range: " + std::string(whole));
  if (ec != std::errc() || ptr != last || first == last)
    throw std::invalid_argument("not a rational literal: '" + std::string(whole) + "'");
  return value;
}

Rational parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    exponent = static_cast<int>(parse_int(text.substr(e + 1), text));
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  i128 digits = 0;
  int fraction_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
    any_digit = true;
    digits = digits * 10 + (c - '0');
    if (!fits(digits)) throw RationalOverflow("decimal literal too long: " + std::string(text));
    if (seen_point) ++fraction_digits;
  }
  if (!any_digit) throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
  exponent -= fraction_digits;
  i128 num = negative ? -digits : digits;
  i128 den = 1;
  for (; exponent > 0; --exponent) {
    num *= 10;
    if (!fits(num)) throw RationalOverflow("decimal literal out of range: " + std::string(text));
  }
  for (; exponent < 0; ++exponent) {
    den *= 10;
    if (!fits(den)) throw RationalOverflow("decimal literal out of range: " + std::string(text));
  }
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::domain_error("rational with zero denominator");
  narrow(numerator, denominator, num_, den_);
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t p = parse_int(text.substr(0, slash), text);
    std::int64_t q = parse_int(text.substr(slash + 1), text);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
  }
  if (is_decimal_literal(text)) return parse_decimal(text);
  return Rational(parse_int(text, text));
}

bool Rational::is_decimal_literal(std::string_view text) {
  return text.find('/') == std::string_view::npos && text.find_first_of(".eE") != std::string_view::npos;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

Rational Rational::operator-() const {
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw RationalOverflow("rational overflow");
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  if (den_ == rhs.den_) {
    narrow(static_cast<i128>(num_) + rhs.num_, den_, num_, den_);
  } else {
    narrow(static_cast<i128>(num_) * rhs.den_ + static_cast<i128>(rhs.num_) * den_,
           static_cast<i128>(den_) * rhs.den_, num_, den_);
  }
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  if (den_ == rhs.den_) {
    narrow(static_cast<i128>(num_) - rhs.num_, den_, num_, den_);
  } else {
    narrow(static_cast<i128>(num_) * rhs.den_ - static_cast<i128>(rhs.num_) * den_,
           static_cast<i128>(den_) * rhs.den_, num_, den_);
  }
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  narrow(static_cast<i128>(num_) * rhs.num_, static_cast<i128>(den_) * rhs.den_, num_, den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw std::domain_error("rational division by zero");
  narrow(static_cast<i128>(num_) * rhs.den_, static_cast<i128>(den_) * rhs.num_, num_, den_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
  i128 a = static_cast<i128>(lhs.num_) * rhs.den_;
  i128 b = static_cast<i128>(rhs.num_) * lhs.den_;
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

}  // namespace qcf
