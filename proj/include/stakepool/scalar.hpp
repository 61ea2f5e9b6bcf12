#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace stakepool {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Stake or payoff value. Exact while every operand was exact; any float
// operand (or an irrational sqrt) turns the result into a double.
class Scalar {
public:
    Scalar() : value_(Rational(0)) {}
    Scalar(int v) : value_(Rational(v)) {}
    Scalar(long v) : value_(Rational(v)) {}
    Scalar(long long v) : value_(Rational(v)) {}
    Scalar(unsigned long v) : value_(Rational(v)) {}
    Scalar(Rational v) : value_(std::move(v)) {}

    static Scalar real(double v);
    static Scalar ratio(long long num, long long den);

    bool is_exact() const { return std::holds_alternative<Rational>(value_); }
    const Rational& exact() const;
    double to_double() const;
    bool is_integer() const;
    bool is_zero() const;
    int sign() const;

    // p/q for exact values, shortest round-trip decimal otherwise
    std::string str() const;
    // %.{digits}g
    std::string decimal(int digits = 12) const;

    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    Scalar operator-() const;

    friend bool operator==(const Scalar& a, const Scalar& b);
    friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b);

private:
    std::variant<Rational, double> value_;
};

Scalar sqrt(const Scalar& x);
Scalar min(const Scalar& a, const Scalar& b);
Scalar max(const Scalar& a, const Scalar& b);
Scalar abs(const Scalar& x);
long long floor_int(const Scalar& x);
long long ceil_int(const Scalar& x);

// Tolerant comparisons: exact when both sides are exact, otherwise
// against `tol` in absolute terms.
bool exceeds(const Scalar& a, const Scalar& b, double tol);
bool at_least(const Scalar& a, const Scalar& b, double tol);
bool near(const Scalar& a, const Scalar& b, double tol);

// Accepts integers, decimals with optional exponent, and "p/q".
Scalar parse_scalar(std::string_view text);
// Exact decimal value of the shortest representation of `v`.
Scalar decimal_from_double(double v);

}  // namespace stakepool
