#pragma once

#include "jlim/rational.hpp"

namespace jlim {

// complex number with rational real and imaginary parts
struct GaussianRational {
    Rational re{0};
    Rational im{0};

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    explicit GaussianRational(Rational r) : re(std::move(r)), im(0) {}
    explicit GaussianRational(long long r) : re(r), im(0) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
};

inline GaussianRational conj(const GaussianRational& z) { return {z.re, -z.im}; }

// |z|^2, exact
inline Rational norm2(const GaussianRational& z) { return z.re * z.re + z.im * z.im; }

inline GaussianRational inverse(const GaussianRational& z) {
    if (z.is_zero()) throw Error("inverse of zero");
    Rational n = norm2(z);
    return {z.re / n, -z.im / n};
}

inline GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    return a * inverse(b);
}

inline GaussianRational pow(const GaussianRational& z, long long k) {
    if (k == 0) return GaussianRational(1);
    GaussianRational b = z;
    unsigned long long e;
    if (k < 0) {
        if (z.is_zero()) throw ZeroToNegativePower();
        b = inverse(z);
        e = static_cast<unsigned long long>(-(k + 1)) + 1;
    } else {
        e = static_cast<unsigned long long>(k);
    }
    GaussianRational acc(1);
    while (e) {
        if (e & 1) acc = acc * b;
        b = b * b;
        e >>= 1;
    }
    return acc;
}

inline std::string format_gaussian(const GaussianRational& z) {
    if (z.im == 0) return format_rational(z.re);
    std::string s = format_rational(z.re);
    s += (z.im < 0) ? " - " : " + ";
    s += format_rational(abs_rational(z.im)) + "i";
    return s;
}

} // namespace jlim
