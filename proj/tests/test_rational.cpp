#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "lexnet/rational.hpp"
#include "lexnet/synth.hpp"

using lexnet::Rational;

TEST_CASE("construction canonicalizes") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(0, 7) == Rational(0));
    CHECK(Rational(6, 3).is_integer());
    CHECK(Rational(6, 3).num_str() == "2");
    CHECK(Rational(6, 3).den_str() == "1");
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("arithmetic stays exact") {
    Rational third(1, 3);
    CHECK(third + third + third == Rational(1));
    CHECK(Rational(1) - Rational(2, 3) == Rational(1, 3));
    CHECK(Rational(3, 4) * Rational(2, 9) == Rational(1, 6));
    CHECK(Rational(5, 6) / Rational(10, 3) == Rational(1, 4));
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
    CHECK(2 * Rational(3, 4) == Rational(3, 2));
}

TEST_CASE("repeated halving and re-summation is lossless") {
    Rational v(1);
    for (int i = 0; i < 200; ++i) v /= Rational(2);
    for (int i = 0; i < 200; ++i) v *= Rational(2);
    CHECK(v == Rational(1));
}

TEST_CASE("ordering") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(7, 2) > Rational(3));
    CHECK(Rational(2, 4) <= Rational(1, 2));
    CHECK(Rational(2, 4) >= Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(0));
}

TEST_CASE("parse accepts integers and fractions") {
    CHECK(Rational::parse("42") == Rational(42));
    CHECK(Rational::parse("-3") == Rational(-3));
    CHECK(Rational::parse("7/20") == Rational(7, 20));
    CHECK(Rational::parse("-7/20") == Rational(-7, 20));
    CHECK(Rational::parse("10/4") == Rational(5, 2));
    CHECK(Rational::parse("1.5") == Rational(3, 2));  // decimal text is a superset
    CHECK_THROWS(Rational::parse(""));
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("a/b"));
    CHECK_THROWS(Rational::parse("1/2/3"));
    CHECK_THROWS(Rational::parse("1e3"));
}

TEST_CASE("from_decimal_string is exact") {
    CHECK(Rational::from_decimal_string("0.35") == Rational(7, 20));
    CHECK(Rational::from_decimal_string("0.1") == Rational(1, 10));
    CHECK(Rational::from_decimal_string("2") == Rational(2));
    CHECK(Rational::from_decimal_string("-0.25") == Rational(-1, 4));
    CHECK(Rational::from_decimal_string("0.000001") == Rational(1, 1000000));
    CHECK_THROWS(Rational::from_decimal_string("0.3.5"));
    CHECK_THROWS(Rational::from_decimal_string("abc"));
    CHECK_THROWS(Rational::from_decimal_string(""));
}

TEST_CASE("to_string uses slash form only for proper fractions") {
    CHECK(Rational(5).to_string() == "5");
    CHECK(Rational(1, 3).to_string() == "1/3");
    CHECK(Rational(4, 2).to_string() == "2");
    CHECK(Rational(-1, 3).to_string() == "-1/3");
}

TEST_CASE("floor and ceil") {
    CHECK(Rational(7, 2).floor_long() == 3);
    CHECK(Rational(7, 2).ceil_long() == 4);
    CHECK(Rational(3).floor_long() == 3);
    CHECK(Rational(3).ceil_long() == 3);
    CHECK(Rational(-7, 2).floor_long() == -4);
    CHECK(Rational(-7, 2).ceil_long() == -3);
    CHECK(Rational(0).floor_long() == 0);
}

TEST_CASE("decimal rendering rounds half to even") {
    CHECK(Rational(1, 3).decimal(6) == "0.333333");
    CHECK(Rational(2, 3).decimal(6) == "0.666667");
    CHECK(Rational(1, 2).decimal(6) == "0.500000");
    CHECK(Rational(1).decimal(3) == "1.000");
    CHECK(Rational(1, 16).decimal(2) == "0.06");  // 0.0625, below half
    CHECK(Rational(3, 16).decimal(2) == "0.19");  // 0.1875, above half
    CHECK(Rational(1, 8).decimal(2) == "0.12");   // 0.125 ties to even 12
    CHECK(Rational(3, 8).decimal(2) == "0.38");   // 0.375 ties to even 38
    CHECK(Rational(-1, 8).decimal(2) == "-0.12");
    CHECK(Rational(1, 8).decimal(3) == "0.125");
    CHECK(Rational(7, 20).decimal(2) == "0.35");
    CHECK(Rational(-1, 1000).decimal(2) == "0.00");  // sign suppressed at zero
}

TEST_CASE("decimal rendering of values above one") {
    CHECK(Rational(22, 7).decimal(4) == "3.1429");
    CHECK(Rational(1685078).decimal(1) == "1685078.0");
}

TEST_CASE("random arithmetic round trips") {
    lexnet::io::Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        long n1 = static_cast<long>(rng.between(-50, 50));
        long d1 = static_cast<long>(rng.between(1, 30));
        long n2 = static_cast<long>(rng.between(-50, 50));
        long d2 = static_cast<long>(rng.between(1, 30));
        Rational a(n1, d1), b(n2, d2);
        CHECK(a + b - b == a);
        if (!b.is_zero()) CHECK(a * b / b == a);
        CHECK((a + b) == (b + a));
        CHECK(Rational::parse(a.to_string()) == a);
        // Small numerators and denominators convert to distinct doubles.
        CHECK((a.to_double() == b.to_double()) == (a == b));
    }
}
