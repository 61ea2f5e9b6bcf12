#include "stakepool/scalar.hpp"

#include "stakepool/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <system_error>

namespace stakepool {

namespace {

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool perfect_square(const BigInt& n, BigInt& root) {
    if (n < 0) return false;
    root = boost::multiprecision::sqrt(n);
    return root * root == n;
}

}  // namespace

Scalar Scalar::real(double v) {
    if (!std::isfinite(v)) throw InputError("non-finite value");
    Scalar s;
    s.value_ = v;
    return s;
}

Scalar Scalar::ratio(long long num, long long den) {
    if (den == 0) throw InputError("zero denominator");
    return Scalar(Rational(num, den));
}

const Rational& Scalar::exact() const {
    if (auto p = std::get_if<Rational>(&value_)) return *p;
    throw std::logic_error("scalar is not exact");
}

double Scalar::to_double() const {
    if (auto p = std::get_if<Rational>(&value_)) return rational_to_double(*p);
    return std::get<double>(value_);
}

bool Scalar::is_integer() const {
    auto p = std::get_if<Rational>(&value_);
    return p && boost::multiprecision::denominator(*p) == 1;
}

bool Scalar::is_zero() const { return sign() == 0; }

int Scalar::sign() const {
    if (auto p = std::get_if<Rational>(&value_)) return p->sign();
    double d = std::get<double>(value_);
    return (d > 0) - (d < 0);
}

std::string Scalar::str() const {
    if (auto p = std::get_if<Rational>(&value_)) {
        if (boost::multiprecision::denominator(*p) == 1)
            return boost::multiprecision::numerator(*p).str();
        return boost::multiprecision::numerator(*p).str() + "/" +
               boost::multiprecision::denominator(*p).str();
    }
    return shortest(std::get<double>(value_));
}

std::string Scalar::decimal(int digits) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, to_double());
    std::string s(buf);
    return s == "-0" ? "0" : s;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    if (is_exact() && o.is_exact())
        std::get<Rational>(value_) += o.exact();
    else
        value_ = to_double() + o.to_double();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    if (is_exact() && o.is_exact())
        std::get<Rational>(value_) -= o.exact();
    else
        value_ = to_double() - o.to_double();
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    if (is_exact() && o.is_exact())
        std::get<Rational>(value_) *= o.exact();
    else
        value_ = to_double() * o.to_double();
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    if (is_exact() && o.is_exact())
        std::get<Rational>(value_) /= o.exact();
    else
        value_ = to_double() / o.to_double();
    return *this;
}

Scalar Scalar::operator-() const {
    if (is_exact()) return Scalar(Rational(-exact()));
    return real(-to_double());
}

bool operator==(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
    return a.to_double() == b.to_double();
}

std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) {
        int c = a.exact().compare(b.exact());
        return c < 0 ? std::partial_ordering::less
               : c > 0 ? std::partial_ordering::greater
                       : std::partial_ordering::equivalent;
    }
    return a.to_double() <=> b.to_double();
}

Scalar sqrt(const Scalar& x) {
    if (x.sign() < 0) throw std::domain_error("sqrt of negative value");
    if (x.is_exact()) {
        BigInt rn, rd;
        const Rational& r = x.exact();
        if (perfect_square(boost::multiprecision::numerator(r), rn) &&
            perfect_square(boost::multiprecision::denominator(r), rd))
            return Scalar(Rational(rn, rd));
    }
    return Scalar::real(std::sqrt(x.to_double()));
}

Scalar min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
Scalar max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }
Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }

long long floor_int(const Scalar& x) {
    if (x.is_exact()) {
        const Rational& r = x.exact();
        BigInt q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
        if (r.sign() < 0 && Rational(q) != r) q -= 1;
        return q.convert_to<long long>();
    }
    return static_cast<long long>(std::floor(x.to_double()));
}

long long ceil_int(const Scalar& x) { return -floor_int(-x); }

bool exceeds(const Scalar& a, const Scalar& b, double tol) {
    if (a.is_exact() && b.is_exact()) return a.exact() > b.exact();
    return a.to_double() > b.to_double() + tol;
}

bool at_least(const Scalar& a, const Scalar& b, double tol) {
    if (a.is_exact() && b.is_exact()) return a.exact() >= b.exact();
    return a.to_double() >= b.to_double() - tol;
}

bool near(const Scalar& a, const Scalar& b, double tol) {
    if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
    return std::abs(a.to_double() - b.to_double()) <= tol;
}

Scalar parse_scalar(std::string_view text) {
    auto fail = [&] { return InputError("malformed number '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Scalar num = parse_scalar(text.substr(0, slash));
        Scalar den = parse_scalar(text.substr(slash + 1));
        if (!num.is_integer() || !den.is_integer()) throw fail();
        if (den.is_zero()) throw InputError("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
    BigInt digits = 0;
    long long scale = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            seen_digit = true;
            if (seen_point) --scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw fail();
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') throw fail();
        ++pos;
        long long e = 0;
        auto sv = text.substr(pos);
        if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), e);
        if (ec != std::errc() || ptr != sv.data() + sv.size() || e > 4000 || e < -4000)
            throw fail();
        scale += e;
    }
    Rational value(digits);
    BigInt ten = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    if (scale < 0) value /= ten;
    else value *= ten;
    if (negative) value = -value;
    return Scalar(value);
}

Scalar decimal_from_double(double v) {
    if (!std::isfinite(v)) throw InputError("non-finite value");
    return parse_scalar(shortest(v));
}

}  // namespace stakepool
