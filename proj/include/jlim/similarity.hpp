#pragma once

#include <utility>
#include <vector>

#include "jlim/exact_vector.hpp"

namespace jlim {

// dense square matrix over the Gaussian rationals, row-major
struct GaussianMatrix {
    long long n{0};
    std::vector<GaussianRational> a;

    GaussianMatrix() = default;
    explicit GaussianMatrix(long long dim) : n(dim), a(static_cast<size_t>(dim * dim)) {
        if (dim <= 0) throw InvalidInput("matrix dimension must be positive");
    }

    GaussianRational& at(long long i, long long j) { return a[static_cast<size_t>(i * n + j)]; }
    const GaussianRational& at(long long i, long long j) const { return a[static_cast<size_t>(i * n + j)]; }
};

inline GaussianMatrix identity_matrix(long long n) {
    GaussianMatrix m(n);
    for (long long i = 0; i < n; ++i) m.at(i, i) = GaussianRational(1);
    return m;
}

inline bool operator==(const GaussianMatrix& x, const GaussianMatrix& y) {
    return x.n == y.n && x.a == y.a;
}

inline ExactVector mat_vec(const GaussianMatrix& m, const ExactVector& v) {
    if (static_cast<long long>(v.size()) != m.n) throw DimensionMismatch();
    ExactVector out(v.size());
    for (long long i = 0; i < m.n; ++i) {
        GaussianRational s;
        for (long long j = 0; j < m.n; ++j) s = s + m.at(i, j) * v[j];
        out[static_cast<size_t>(i)] = s;
    }
    return out;
}

inline GaussianMatrix mat_mul(const GaussianMatrix& x, const GaussianMatrix& y) {
    if (x.n != y.n) throw DimensionMismatch();
    GaussianMatrix out(x.n);
    for (long long i = 0; i < x.n; ++i)
        for (long long k = 0; k < x.n; ++k) {
            if (x.at(i, k).is_zero()) continue;
            for (long long j = 0; j < x.n; ++j)
                out.at(i, j) = out.at(i, j) + x.at(i, k) * y.at(k, j);
        }
    return out;
}

// exact Gauss-Jordan with full pivoting; pivot choice by largest norm2 keeps entries small
inline GaussianMatrix invert_matrix(const GaussianMatrix& m) {
    long long n = m.n;
    GaussianMatrix w = m;
    GaussianMatrix inv = identity_matrix(n);
    std::vector<long long> colperm(static_cast<size_t>(n));
    for (long long i = 0; i < n; ++i) colperm[static_cast<size_t>(i)] = i;

    for (long long step = 0; step < n; ++step) {
        long long pr = -1, pc = -1;
        Rational best(0);
        for (long long i = step; i < n; ++i)
            for (long long j = step; j < n; ++j) {
                Rational n2 = norm2(w.at(i, j));
                if (n2 > best) { best = n2; pr = i; pc = j; }
            }
        if (pr < 0) throw SingularSystem();
        if (pr != step) {
            for (long long j = 0; j < n; ++j) {
                std::swap(w.at(step, j), w.at(pr, j));
                std::swap(inv.at(step, j), inv.at(pr, j));
            }
        }
        if (pc != step) {
            for (long long i = 0; i < n; ++i) std::swap(w.at(i, step), w.at(i, pc));
            std::swap(colperm[static_cast<size_t>(step)], colperm[static_cast<size_t>(pc)]);
        }
        GaussianRational piv_inv = inverse(w.at(step, step));
        for (long long j = 0; j < n; ++j) {
            w.at(step, j) = w.at(step, j) * piv_inv;
            inv.at(step, j) = inv.at(step, j) * piv_inv;
        }
        for (long long i = 0; i < n; ++i) {
            if (i == step || w.at(i, step).is_zero()) continue;
            GaussianRational f = w.at(i, step);
            for (long long j = 0; j < n; ++j) {
                w.at(i, j) = w.at(i, j) - f * w.at(step, j);
                inv.at(i, j) = inv.at(i, j) - f * inv.at(step, j);
            }
        }
    }
    // column swaps in w are row swaps of the inverse
    GaussianMatrix out(n);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j)
            out.at(colperm[static_cast<size_t>(i)], j) = inv.at(i, j);
    return out;
}

// change of basis B = P J P^{-1}; P_inverse is computed once and cached
struct SimilaritySpec {
    GaussianMatrix P;
    GaussianMatrix P_inverse;

    static SimilaritySpec from_matrix(GaussianMatrix p) {
        SimilaritySpec s;
        s.P_inverse = invert_matrix(p);
        s.P = std::move(p);
        return s;
    }
};

enum class ConjDirection { Forward, Backward };

inline ExactVector conjugate_vector(const SimilaritySpec& sim, const ExactVector& v, ConjDirection dir) {
    return mat_vec(dir == ConjDirection::Forward ? sim.P : sim.P_inverse, v);
}

inline json matrix_to_json(const GaussianMatrix& m) {
    json rows = json::array();
    for (long long i = 0; i < m.n; ++i) {
        json row = json::array();
        for (long long j = 0; j < m.n; ++j) row.push_back(complex_to_json(ExactComplex(m.at(i, j))));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline GaussianMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidInput("matrix must be a nonempty array of rows");
    long long n = static_cast<long long>(j.size());
    GaussianMatrix m(n);
    for (long long i = 0; i < n; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<long long>(row.size()) != n)
            throw InvalidInput("matrix rows must all have the same length as the row count");
        for (long long c = 0; c < n; ++c) {
            auto g = to_gaussian(complex_from_json(row[static_cast<size_t>(c)]));
            if (!g) throw InvalidInput("matrix entries must be Cartesian-representable");
            m.at(i, c) = *g;
        }
    }
    return m;
}

} // namespace jlim
