#include "stakepool/errors.hpp"
#include "stakepool/scalar.hpp"

#include <doctest.h>

using namespace stakepool;

TEST_CASE("exact arithmetic stays exact") {
    Scalar x = Scalar::ratio(1, 3) + Scalar::ratio(1, 6);
    CHECK(x.is_exact());
    CHECK(x == Scalar::ratio(1, 2));
    CHECK(x.str() == "1/2");
    CHECK((Scalar(3) / 4 * 4).str() == "3");
}

TEST_CASE("a float operand makes the result a float") {
    Scalar x = Scalar(1) + Scalar::real(0.5);
    CHECK_FALSE(x.is_exact());
    CHECK(x.to_double() == doctest::Approx(1.5));
}

TEST_CASE("sqrt is exact on perfect squares only") {
    CHECK(sqrt(Scalar::ratio(9, 4)) == Scalar::ratio(3, 2));
    CHECK(sqrt(Scalar::ratio(9, 4)).is_exact());
    Scalar r = sqrt(Scalar(2));
    CHECK_FALSE(r.is_exact());
    CHECK(r.to_double() == doctest::Approx(1.41421356237));
}

TEST_CASE("parse_scalar") {
    CHECK(parse_scalar("3") == Scalar(3));
    CHECK(parse_scalar("-2/6") == Scalar::ratio(-1, 3));
    CHECK(parse_scalar("0.1") == Scalar::ratio(1, 10));
    CHECK(parse_scalar("1.5e2") == Scalar(150));
    CHECK(parse_scalar("2.5E-1") == Scalar::ratio(1, 4));
    CHECK_THROWS_AS(parse_scalar("abc"), InputError);
    CHECK_THROWS_AS(parse_scalar("1/0"), InputError);
    CHECK_THROWS_AS(parse_scalar(""), InputError);
}

TEST_CASE("decimal_from_double uses the shortest representation") {
    CHECK(decimal_from_double(0.1) == Scalar::ratio(1, 10));
    CHECK(decimal_from_double(2.0) == Scalar(2));
}

TEST_CASE("tolerant comparisons") {
    Scalar a = Scalar::ratio(1, 2);
    Scalar b = Scalar::real(0.5 + 1e-12);
    CHECK(near(a, b, 1e-9));
    CHECK_FALSE(exceeds(b, a, 1e-9));
    CHECK(at_least(a, b, 1e-9));
    CHECK(exceeds(Scalar::ratio(1, 2), Scalar::ratio(499999, 1000000), 0));
    CHECK_FALSE(near(Scalar::ratio(1, 3), Scalar::ratio(1, 3) + Scalar::ratio(1, 1000000000000LL), 0));
}

TEST_CASE("floor and ceil") {
    CHECK(floor_int(Scalar::ratio(7, 2)) == 3);
    CHECK(ceil_int(Scalar::ratio(7, 2)) == 4);
    CHECK(floor_int(Scalar::ratio(-7, 2)) == -4);
    CHECK(ceil_int(Scalar(5)) == 5);
}

TEST_CASE("decimal formatting") {
    CHECK(Scalar::ratio(1, 3).decimal(12) == "0.333333333333");
    CHECK(Scalar(4).decimal(12) == "4");
}
