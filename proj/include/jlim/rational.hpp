#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cctype>
#include <string>

#include "jlim/errors.hpp"

namespace jlim {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Int rat_num(const Rational& r) { return numerator(r); }
inline Int rat_den(const Rational& r) { return denominator(r); }

inline Rational make_rational(const Int& num, const Int& den) {
    if (den == 0) throw InvalidInput("rational with zero denominator");
    return Rational(num, den);
}

// accepts "p", "-p", "p/q"
inline Rational parse_rational(const std::string& s) {
    auto bad = [&]() { return InvalidInput("malformed rational: '" + s + "'"); };
    if (s.empty()) throw bad();
    std::size_t slash = s.find('/');
    auto check_int = [&](const std::string& t) {
        if (t.empty()) throw bad();
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) throw bad();
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw bad();
    };
    if (slash == std::string::npos) {
        check_int(s);
        return Rational(Int(s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    check_int(num);
    check_int(den);
    return make_rational(Int(num), Int(den));
}

inline std::string format_rational(const Rational& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

inline Rational pow_rational(const Rational& base, long long k) {
    if (k == 0) return Rational(1);
    if (base == 0) {
        if (k < 0) throw ZeroToNegativePower();
        return Rational(0);
    }
    Rational b = base;
    unsigned long long e;
    if (k < 0) {
        b = Rational(rat_den(base), rat_num(base));
        e = static_cast<unsigned long long>(-(k + 1)) + 1;
    } else {
        e = static_cast<unsigned long long>(k);
    }
    Rational acc(1);
    while (e) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline Rational abs_rational(const Rational& r) { return r < 0 ? Rational(-r) : r; }

} // namespace jlim
