#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lexnet {

/// Exact non-negative rational used for all reference-mass bookkeeping.
///
/// A thin value wrapper around GMP's mpq_class. Masses are kept in canonical
/// reduced form at all times, so conservation checks are bit-exact equality,
/// never tolerance comparisons. Conversion to decimal text happens only at
/// report emission, via decimal() (round-half-even).
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long value) : v_(value) {}
    Rational(long num, long den) : v_(num, den) {
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        v_.canonicalize();
    }

    static Rational from_decimal_string(const std::string& text);

    /// Parses "num/den" or a plain integer literal.
    static Rational parse(const std::string& text);

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.v_ == 0) throw std::invalid_argument("rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
    friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    std::string num_str() const { return v_.get_num().get_str(); }
    std::string den_str() const { return v_.get_den().get_str(); }
    std::string to_string() const;  // "n" when integral, "n/d" otherwise

    double to_double() const { return v_.get_d(); }

    /// Largest integer <= value / smallest integer >= value. Throws
    /// std::overflow_error outside the long range.
    long floor_long() const;
    long ceil_long() const;

    /// Exact decimal rendering with `digits` fractional digits,
    /// rounding half to even. Used anywhere a float column is emitted.
    std::string decimal(int digits = 6) const;

private:
    mpq_class v_;
};

inline Rational operator*(long a, const Rational& b) { return Rational(a) * b; }

}  // namespace lexnet
