#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "jlim/exact_complex.hpp"

namespace jlim {

using Real = boost::multiprecision::mpfr_float;

namespace detail {
inline thread_local unsigned current_precision_bits = 192;

inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(bits * 0.3010299957) + 4;
}
} // namespace detail

// scopes the working precision; nests
class PrecisionGuard {
    unsigned saved_digits_;
    unsigned saved_bits_;

public:
    explicit PrecisionGuard(unsigned bits) {
        saved_digits_ = Real::default_precision();
        saved_bits_ = detail::current_precision_bits;
        Real::default_precision(detail::digits10_for_bits(bits));
        detail::current_precision_bits = bits;
    }
    ~PrecisionGuard() {
        Real::default_precision(saved_digits_);
        detail::current_precision_bits = saved_bits_;
    }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;
};

inline unsigned current_precision_bits() { return detail::current_precision_bits; }

// 2^(1 - bits), the working relative error unit
inline Real real_eps() {
    return boost::multiprecision::ldexp(Real(1), 1 - static_cast<int>(detail::current_precision_bits));
}

// complex float with a tracked absolute error bound
struct CF {
    Real re{0};
    Real im{0};
    Real err{0};

    CF() = default;
    CF(Real r, Real i, Real e = Real(0)) : re(std::move(r)), im(std::move(i)), err(std::move(e)) {}
};

inline Real abs_value(const CF& a) {
    return boost::multiprecision::sqrt(a.re * a.re + a.im * a.im);
}

// sqrt-free upper bound on |a|, for error bookkeeping only
inline Real abs_bound(const CF& a) {
    return boost::multiprecision::abs(a.re) + boost::multiprecision::abs(a.im);
}

inline Real abs_upper(const CF& a) {
    return abs_value(a) * (1 + 4 * real_eps()) + a.err;
}

inline Real abs_lower(const CF& a) {
    Real v = abs_value(a) * (1 - 4 * real_eps()) - a.err;
    return v > 0 ? v : Real(0);
}

inline CF cf_add(const CF& a, const CF& b) {
    CF r(a.re + b.re, a.im + b.im);
    r.err = a.err + b.err + abs_bound(r) * 2 * real_eps();
    return r;
}

inline CF cf_sub(const CF& a, const CF& b) {
    CF r(a.re - b.re, a.im - b.im);
    r.err = a.err + b.err + abs_bound(r) * 2 * real_eps();
    return r;
}

inline CF cf_neg(const CF& a) { return CF(-a.re, -a.im, a.err); }

inline CF cf_mul(const CF& a, const CF& b) {
    CF r(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    Real ua = abs_bound(a) + a.err, ub = abs_bound(b) + b.err;
    r.err = a.err * ub + b.err * ua + ua * ub * 6 * real_eps();
    return r;
}

inline CF cf_scale(const CF& a, const Real& s) {
    Real as = boost::multiprecision::abs(s);
    CF r(a.re * s, a.im * s);
    r.err = a.err * as + abs_bound(r) * 2 * real_eps();
    return r;
}

inline CF cf_div(const CF& a, const CF& b) {
    Real lb = abs_lower(b);
    if (lb == 0) throw PrecisionExhausted("division by a value indistinguishable from zero");
    Real n2 = b.re * b.re + b.im * b.im;
    CF r((a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2);
    Real ua = abs_bound(a) + a.err;
    r.err = (a.err + ua * b.err / lb) / lb + abs_bound(r) * 8 * real_eps();
    return r;
}

inline CF cf_pow(const CF& z, long long k) {
    if (k == 0) return CF(Real(1), Real(0));
    CF b = z;
    unsigned long long e;
    if (k < 0) {
        b = cf_div(CF(Real(1), Real(0)), z);
        e = static_cast<unsigned long long>(-(k + 1)) + 1;
    } else {
        e = static_cast<unsigned long long>(k);
    }
    CF acc(Real(1), Real(0));
    while (e) {
        if (e & 1) acc = cf_mul(acc, b);
        b = cf_mul(b, b);
        e >>= 1;
    }
    return acc;
}

inline CF cf_from_rational(const Rational& re, const Rational& im = Rational(0)) {
    CF r{Real(re), Real(im), Real(0)};
    r.err = abs_bound(r) * 2 * real_eps();
    return r;
}

inline CF cf_from_gaussian(const GaussianRational& g) { return cf_from_rational(g.re, g.im); }

inline CF cf_from_int(const Int& k) {
    CF r{Real(k), Real(0), Real(0)};
    r.err = abs_bound(r) * real_eps();
    return r;
}

// exact in any working precision of 64 bits or more, so no rounding term
inline CF cf_from_ll(long long k) { return CF{Real(k), Real(0), Real(0)}; }

// value of any exact scalar; trig for polar directions runs at elevated precision
inline CF cf_from_exact(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return cf_from_gaussian(*g);
    const auto& pl = std::get<PolarExact>(z);
    if (pl.is_zero()) return CF();
    Real c, s;
    {
        PrecisionGuard hi(current_precision_bits() + 32);
        Real theta = 2 * boost::math::constants::pi<Real>() * Real(pl.p) / Real(pl.q);
        c = boost::multiprecision::cos(theta);
        s = boost::multiprecision::sin(theta);
    }
    Real mod(pl.modulus);
    CF r{mod * c, mod * s, Real(0)};
    r.err = mod * 8 * real_eps();
    return r;
}

// to_float contract: result within 2^(1-bits) * |z| of the exact value
inline CF to_float(const ExactComplex& z, unsigned precision_bits) {
    PrecisionGuard guard(precision_bits);
    CF v = cf_from_exact(z);
    v.err = abs_upper(v) * real_eps();
    return v;
}

inline Real dist_cf(const CF& a, const CF& b, Real* err_out = nullptr) {
    CF d = cf_sub(a, b);
    if (err_out) *err_out = d.err + abs_value(d) * 2 * real_eps();
    return abs_value(d);
}

// sup norm over coordinates, with accumulated error bound; the winner is
// picked on squared moduli so only one square root runs per call
inline Real sup_dist_cf(const std::vector<CF>& a, const std::vector<CF>& b, Real* err_out = nullptr) {
    if (a.size() != b.size()) throw DimensionMismatch();
    Real best_sq(0), best_err(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CF d = cf_sub(a[i], b[i]);
        Real sq = d.re * d.re + d.im * d.im;
        if (sq > best_sq) best_sq = sq;
        Real e = d.err + abs_bound(d) * 2 * real_eps();
        if (e > best_err) best_err = e;
    }
    if (err_out) *err_out = best_err;
    return boost::multiprecision::sqrt(best_sq);
}

inline std::vector<CF> cf_vector(const std::vector<GaussianRational>& v) {
    std::vector<CF> out;
    out.reserve(v.size());
    for (const auto& g : v) out.push_back(cf_from_gaussian(g));
    return out;
}

// fixed-width decimal for deterministic reports
inline std::string real_to_string(const Real& v, unsigned digits = 20) {
    return v.str(digits, std::ios_base::scientific);
}

} // namespace jlim
