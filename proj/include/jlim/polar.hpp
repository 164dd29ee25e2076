#pragma once

#include <numeric>
#include <optional>

#include "jlim/gaussian.hpp"

namespace jlim {

// modulus * e^(2*pi*i*p/q), with 0 <= p < q, gcd(p,q) = 1
struct PolarExact {
    Rational modulus{0};
    long long p{0};
    long long q{1};

    PolarExact() = default;
    PolarExact(Rational mod, long long pp, long long qq) : modulus(std::move(mod)) {
        if (qq <= 0) throw InvalidInput("polar angle denominator must be positive");
        if (modulus < 0) throw InvalidInput("polar modulus must be nonnegative");
        if (modulus == 0) { p = 0; q = 1; return; }
        pp %= qq;
        if (pp < 0) pp += qq;
        long long g = std::gcd(pp, qq);
        if (g == 0) g = 1;
        p = pp / g;
        q = qq / g;
        if (p == 0) q = 1;
    }

    bool is_zero() const { return modulus == 0; }

    friend bool operator==(const PolarExact& a, const PolarExact& b) {
        return a.modulus == b.modulus && a.p == b.p && a.q == b.q;
    }
    friend bool operator!=(const PolarExact& a, const PolarExact& b) { return !(a == b); }
};

inline PolarExact mul(const PolarExact& a, const PolarExact& b) {
    if (a.is_zero() || b.is_zero()) return PolarExact(Rational(0), 0, 1);
    long long g = std::gcd(a.q, b.q);
    long long l = a.q / g * b.q;
    long long pp = a.p * (l / a.q) + b.p * (l / b.q);
    return PolarExact(a.modulus * b.modulus, pp, l);
}

inline PolarExact conj(const PolarExact& z) {
    return PolarExact(z.modulus, -z.p, z.q);
}

inline PolarExact inverse(const PolarExact& z) {
    if (z.is_zero()) throw Error("inverse of zero");
    return PolarExact(Rational(rat_den(z.modulus), rat_num(z.modulus)), -z.p, z.q);
}

inline PolarExact pow(const PolarExact& z, long long k) {
    if (k == 0) return PolarExact(Rational(1), 0, 1);
    if (z.is_zero()) {
        if (k < 0) throw ZeroToNegativePower();
        return z;
    }
    long long pk = (z.p % z.q) * (k % z.q); // |p| < q, |k mod q| < q
    return PolarExact(pow_rational(z.modulus, k), pk, z.q);
}

// exact Cartesian form exists only for angle denominators 1, 2, 4
inline std::optional<GaussianRational> polar_to_gaussian(const PolarExact& z) {
    if (z.is_zero()) return GaussianRational(0);
    if (z.q == 1) return GaussianRational(z.modulus, Rational(0));
    if (z.q == 2) return GaussianRational(-z.modulus, Rational(0));
    if (z.q == 4) {
        if (z.p == 1) return GaussianRational(Rational(0), z.modulus);
        return GaussianRational(Rational(0), -z.modulus);
    }
    return std::nullopt;
}

inline std::optional<PolarExact> gaussian_to_polar(const GaussianRational& z) {
    if (z.is_zero()) return PolarExact(Rational(0), 0, 1);
    if (z.im == 0) {
        if (z.re > 0) return PolarExact(z.re, 0, 1);
        return PolarExact(-z.re, 1, 2);
    }
    if (z.re == 0) {
        if (z.im > 0) return PolarExact(z.im, 1, 4);
        return PolarExact(-z.im, 3, 4);
    }
    return std::nullopt;
}

inline std::string format_polar(const PolarExact& z) {
    return format_rational(z.modulus) + " * e^(2*pi*i * " + std::to_string(z.p) + "/" + std::to_string(z.q) + ")";
}

} // namespace jlim
