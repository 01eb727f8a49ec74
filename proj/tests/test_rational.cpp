#include <gtest/gtest.h>

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "qcf/rational.hpp"

using qcf::Rational;

TEST(Rational, LowestTermsAndSign) {
  Rational r(6, -8);
  EXPECT_EQ(r.numerator(), -3);
  EXPECT_EQ(r.denominator(), 4);
  EXPECT_EQ(Rational(0, -5), Rational());
  EXPECT_EQ(Rational(0, -5).denominator(), 1);
  EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, Arithmetic) {
  const Rational third(1, 3), half(1, 2);
  EXPECT_EQ(third + half, Rational(5, 6));
  EXPECT_EQ(third - half, Rational(-1, 6));
  EXPECT_EQ(third * half, Rational(1, 6));
  EXPECT_EQ(third / half, Rational(2, 3));
  EXPECT_EQ(-third, Rational(-1, 3));
  EXPECT_THROW(third / Rational(), std::domain_error);
}

TEST(Rational, Ordering) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_GT(Rational(-1, 3), Rational(-1, 2));
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  // Cross products beyond 64 bits still compare correctly.
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  EXPECT_LT(Rational(big - 1, big), Rational(big, big - 1));
}

TEST(Rational, FloorCeil) {
  EXPECT_EQ(Rational(7, 2).floor(), 3);
  EXPECT_EQ(Rational(7, 2).ceil(), 4);
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_EQ(Rational(-7, 2).ceil(), -3);
  EXPECT_EQ(Rational(6, 3).floor(), 2);
  EXPECT_EQ(Rational(6, 3).ceil(), 2);
}

TEST(Rational, Parse) {
  EXPECT_EQ(Rational::parse("1/3"), Rational(1, 3));
  EXPECT_EQ(Rational::parse("-2/6"), Rational(-1, 3));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse("0.125"), Rational(1, 8));
  EXPECT_EQ(Rational::parse("-0.1"), Rational(-1, 10));
  EXPECT_EQ(Rational::parse("2.5e-3"), Rational(1, 400));
  EXPECT_EQ(Rational::parse("1e2"), Rational(100));
  EXPECT_TRUE(Rational::is_decimal_literal("0.5"));
  EXPECT_TRUE(Rational::is_decimal_literal("1e-6"));
  EXPECT_FALSE(Rational::is_decimal_literal("1/2"));
  EXPECT_FALSE(Rational::is_decimal_literal("3"));
  EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
  EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Rational::parse(""), std::invalid_argument);
  EXPECT_THROW(Rational::parse("1/2/3"), std::invalid_argument);
}

TEST(Rational, StrRoundTrip) {
  for (const Rational r : {Rational(1, 3), Rational(-5, 7), Rational(42), Rational()})
    EXPECT_EQ(Rational::parse(r.str()), r);
  EXPECT_EQ(Rational(-1, 3).str(), "-1/3");
  EXPECT_EQ(Rational(4).str(), "4");
}

TEST(Rational, OverflowThrowsInsteadOfRounding) {
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  EXPECT_THROW(Rational(big) + Rational(1), qcf::RationalOverflow);
  EXPECT_THROW(Rational(1, big) * Rational(1, big - 1), qcf::RationalOverflow);
}

TEST(Rational, FieldLawsOnRandomValues) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000), den(1, 1000);
  for (int k = 0; k < 2000; ++k) {
    const Rational a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a - a, Rational());
    if (!b.is_zero()) {
      EXPECT_EQ((a / b) * b, a);
    }
    EXPECT_EQ(std::gcd(a.numerator(), a.denominator()), 1);
    EXPECT_GT(a.denominator(), 0);
    if (a.to_double() != b.to_double()) {
      EXPECT_EQ(a < b, a.to_double() < b.to_double());
    }
  }
}
