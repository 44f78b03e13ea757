#include <catch2/catch_amalgamated.hpp>

#include <minmaxdelay/rational.hpp>

#include <map>
#include <sstream>

using mmd::Rational;

TEST_CASE("construction normalizes to lowest terms") {
  Rational r(4, 6);
  CHECK(r.numerator() == 2);
  CHECK(r.denominator() == 3);

  Rational neg(3, -9);
  CHECK(neg.numerator() == -1);
  CHECK(neg.denominator() == 3);

  CHECK(Rational(0, 5) == Rational(0));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("arithmetic is exact") {
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1) - Rational(2, 3) == Rational(1, 3));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(5, 7) / Rational(5, 7) == Rational(1));
  CHECK(-Rational(1, 2) == Rational(-1, 2));
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);

  // No drift over repeated accumulation of a non-dyadic step.
  Rational acc;
  for (int i = 0; i < 300; ++i) acc += Rational(1, 3);
  CHECK(acc == Rational(100));
}

TEST_CASE("comparisons order by value") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0));
  CHECK(Rational(7, 3) > Rational(2));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(mmd::rational_min(Rational(3, 2), Rational(2)) == Rational(3, 2));
  CHECK(mmd::rational_max(Rational(3, 2), Rational(2)) == Rational(2));

  std::map<Rational, int> m;
  m[Rational(1, 2)] = 1;
  m[Rational(2, 4)] = 2;
  CHECK(m.size() == 1);
}

TEST_CASE("predicates and int64 conversion") {
  CHECK(Rational(0).is_zero());
  CHECK(Rational(-1, 5).is_negative());
  CHECK(Rational(1, 5).is_positive());
  CHECK(Rational(6, 3).is_integer());
  CHECK_FALSE(Rational(1, 3).is_integer());
  CHECK(Rational(6, 3).to_int64() == 2);
  CHECK_THROWS_AS(Rational(1, 3).to_int64(), std::domain_error);
}

TEST_CASE("formatting and parsing round-trip") {
  CHECK(Rational(4, 3).str() == "4/3");
  CHECK(Rational(-4, 3).str() == "-4/3");
  CHECK(Rational(8, 4).str() == "2");
  CHECK(Rational(0).str() == "0");

  CHECK(Rational::parse("4/3") == Rational(4, 3));
  CHECK(Rational::parse("-4/6") == Rational(-2, 3));
  CHECK(Rational::parse("17") == Rational(17));
  CHECK(Rational::parse("0") == Rational(0));

  CHECK_FALSE(Rational::parse("").has_value());
  CHECK_FALSE(Rational::parse("1/0").has_value());
  CHECK_FALSE(Rational::parse("1.5").has_value());
  CHECK_FALSE(Rational::parse(" 1").has_value());
  CHECK_FALSE(Rational::parse("1/").has_value());
  CHECK_FALSE(Rational::parse("/3").has_value());
  CHECK_FALSE(Rational::parse("a/b").has_value());
  CHECK_FALSE(Rational::parse("1/-3").has_value());

  std::ostringstream os;
  os << Rational(22, 7);
  CHECK(os.str() == "22/7");
}

TEST_CASE("values beyond 64 bits stay exact") {
  Rational big(9'000'000'000'000'000'000LL, 1);
  Rational sum = big + big;
  CHECK(sum.str() == "18000000000000000000");
  CHECK((sum / Rational(2)) == big);
}
