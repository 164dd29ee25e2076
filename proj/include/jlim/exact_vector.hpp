#pragma once

#include <vector>

#include "jlim/exact_complex.hpp"

namespace jlim {

using ExactVector = std::vector<GaussianRational>;

inline bool vec_is_zero(const ExactVector& v) {
    for (const auto& z : v)
        if (!z.is_zero()) return false;
    return true;
}

// squared sup norm, exact
inline Rational sup_norm_squared(const ExactVector& v) {
    Rational best(0);
    for (const auto& z : v) {
        Rational n2 = norm2(z);
        if (n2 > best) best = n2;
    }
    return best;
}

inline Rational sup_dist_squared(const ExactVector& a, const ExactVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch();
    Rational best(0);
    for (size_t i = 0; i < a.size(); ++i) {
        Rational n2 = norm2(a[i] - b[i]);
        if (n2 > best) best = n2;
    }
    return best;
}

inline json vector_to_json(const ExactVector& v) {
    json arr = json::array();
    for (const auto& z : v) arr.push_back(complex_to_json(ExactComplex(z)));
    return arr;
}

inline ExactVector vector_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("vector must be a JSON array");
    ExactVector v;
    v.reserve(j.size());
    for (const auto& e : j) {
        ExactComplex z = complex_from_json(e);
        auto g = to_gaussian(z);
        if (!g) throw InvalidInput("vector entries must be Cartesian-representable");
        v.push_back(*g);
    }
    return v;
}

} // namespace jlim
