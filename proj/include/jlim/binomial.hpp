#pragma once

#include "jlim/rational.hpp"

namespace jlim {

// C(k, j) for k >= 0
inline Int binomial(long long k, long long j) {
    if (j < 0 || j > k) return Int(0);
    if (j > k - j) j = k - j;
    Int acc(1);
    for (long long t = 0; t < j; ++t) {
        acc *= Int(k - t);
        acc /= Int(t + 1); // exact at every step
    }
    return acc;
}

// C(k, j) extended to negative upper index: C(-k, j) = (-1)^j C(k+j-1, j)
inline Int binomial_signed(long long k, long long j) {
    if (j < 0) return Int(0);
    if (k >= 0) return binomial(k, j);
    Int b = binomial(-k + j - 1, j);
    return (j % 2 == 0) ? b : Int(-b);
}

// machine-word path for the small j that block rows use; false when the
// value might not fit
inline bool binomial_signed_ll(long long k, long long j, long long& out) {
    if (j < 0) { out = 0; return true; }
    bool neg = false;
    if (k < 0) {
        neg = j % 2 != 0;
        k = -k + j - 1;
    }
    if (j > k) { out = 0; return true; }
    if (j > k - j) j = k - j;
    if (j > 8) return false;
    unsigned long long acc = 1;
    const unsigned long long cap = 1ULL << 62;
    for (long long t = 0; t < j; ++t) {
        unsigned long long f = static_cast<unsigned long long>(k - t);
        if (acc > cap / (f ? f : 1)) return false;
        acc = acc * f / static_cast<unsigned long long>(t + 1); // exact at every step
    }
    out = neg ? -static_cast<long long>(acc) : static_cast<long long>(acc);
    return true;
}

} // namespace jlim
