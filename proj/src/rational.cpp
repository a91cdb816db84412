#include "lexnet/rational.hpp"

#include <gmp.h>

namespace lexnet {

std::string Rational::to_string() const {
    if (is_integer()) return num_str();
    return num_str() + "/" + den_str();
}

Rational Rational::from_decimal_string(const std::string& text) {
    // Accepts [-]digits[.digits]; exponent forms are intentionally rejected so
    // config files stay human-auditable.
    std::string s = text;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = (s[i] == '-');
        ++i;
    }
    std::string digits;
    int frac = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("rational: bad decimal '" + text + "'");
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_dot) ++frac;
        } else {
            throw std::invalid_argument("rational: bad decimal '" + text + "'");
        }
    }
    if (!seen_digit) throw std::invalid_argument("rational: bad decimal '" + text + "'");
    mpz_class num(digits, 10);
    mpz_class den(1);
    for (int k = 0; k < frac; ++k) den *= 10;
    Rational r;
    r.v_ = mpq_class(neg ? -num : num, den);
    r.v_.canonicalize();
    return r;
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return from_decimal_string(text);
    Rational n = from_decimal_string(text.substr(0, slash));
    Rational d = from_decimal_string(text.substr(slash + 1));
    return n / d;
}

namespace {

long to_long_checked(const mpz_class& z) {
    if (!z.fits_slong_p()) throw std::overflow_error("rational: value out of long range");
    return z.get_si();
}

}  // namespace

long Rational::floor_long() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
    return to_long_checked(q);
}

long Rational::ceil_long() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
    return to_long_checked(q);
}

std::string Rational::decimal(int digits) const {
    if (digits < 0) digits = 0;
    mpz_class num = v_.get_num();
    mpz_class den = v_.get_den();
    bool neg = num < 0;
    if (neg) num = -num;

    mpz_class scale(1);
    for (int k = 0; k < digits; ++k) scale *= 10;

    // q + r/den = num*scale/den with 0 <= r < den
    mpz_class scaled = num * scale;
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());

    // Half-even tie-break on the remainder.
    mpz_class twice = r * 2;
    if (twice > den || (twice == den && mpz_odd_p(q.get_mpz_t()))) q += 1;

    std::string body = q.get_str();
    std::string out;
    if (digits == 0) {
        out = body;
    } else {
        if ((int)body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
        out = body.substr(0, body.size() - digits) + "." + body.substr(body.size() - digits);
    }
    if (neg && out.find_first_not_of("0.") != std::string::npos) out.insert(0, 1, '-');
    return out;
}

}  // namespace lexnet
