#pragma once

#include <optional>
#include <vector>

#include "jlim/binomial.hpp"
#include "jlim/floatc.hpp"
#include "jlim/similarity.hpp"

namespace jlim {

struct JordanBlockSpec {
    ExactComplex lambda;
    long long size{1};
};

struct BlockRange {
    long long base{0};
    long long size{0};
};

struct JordanFormSpec {
    std::vector<JordanBlockSpec> blocks;
    std::optional<SimilaritySpec> similarity;

    long long dimension() const {
        long long n = 0;
        for (const auto& b : blocks) n += b.size;
        return n;
    }

    std::vector<BlockRange> ranges() const {
        std::vector<BlockRange> r;
        long long base = 0;
        for (const auto& b : blocks) {
            r.push_back({base, b.size});
            base += b.size;
        }
        return r;
    }

    void validate() const {
        if (blocks.empty()) throw InvalidInput("a Jordan form needs at least one block");
        for (const auto& b : blocks)
            if (b.size < 1) throw InvalidInput("block sizes must be at least 1");
        if (similarity && similarity->P.n != dimension())
            throw DimensionMismatch("similarity matrix dimension does not match the block sizes");
    }
};

// (i, i+j) entry of the k-th power of one block: C(k,j) * lambda^(k-j).
// Accepts negative k for invertible eigenvalues.
inline ExactComplex block_power_entry(const ExactComplex& lambda, long long k, long long j) {
    if (j < 0) throw InvalidInput("entry offset must be nonnegative");
    if (is_zero(lambda)) {
        if (k < j) throw ZeroToNegativePower();
        return j == k ? ec(1) : ec(0);
    }
    if (k >= 0 && j > k) return ec(0);
    Int c = binomial_signed(k, j);
    if (c == 0) return ec(0);
    return mul(ec_rat(Rational(c)), pow(lambda, k - j));
}

namespace detail {

inline GaussianRational require_gaussian(const ExactComplex& z) {
    auto g = to_gaussian(z);
    if (!g) throw NotRepresentable("result is not exactly Cartesian-representable");
    return *g;
}

} // namespace detail

inline ExactVector apply_power(const JordanFormSpec& spec, long long k, const ExactVector& v) {
    if (k < 0) throw InvalidInput("apply_power takes a nonnegative exponent");
    if (static_cast<long long>(v.size()) != spec.dimension()) throw DimensionMismatch();
    ExactVector out(v.size());
    long long base = 0;
    for (const auto& b : spec.blocks) {
        for (long long i = 0; i < b.size; ++i) {
            ExactComplex s = ec(0);
            for (long long j = i; j < b.size; ++j) {
                if (j - i > k) break;
                const GaussianRational& x = v[static_cast<size_t>(base + j)];
                if (x.is_zero()) continue;
                ExactComplex e = block_power_entry(b.lambda, k, j - i);
                if (is_zero(e)) continue;
                s = add(s, mul(e, ec(x)));
            }
            out[static_cast<size_t>(base + i)] = detail::require_gaussian(s);
        }
        base += b.size;
    }
    return out;
}

// the unique w with apply_power(spec, k, w) = v, by back-substitution
inline ExactVector apply_inverse_power(const JordanFormSpec& spec, long long k, const ExactVector& v) {
    if (k < 0) throw InvalidInput("apply_inverse_power takes a nonnegative exponent");
    if (static_cast<long long>(v.size()) != spec.dimension()) throw DimensionMismatch();
    for (const auto& b : spec.blocks)
        if (is_zero(b.lambda)) throw NilpotentEigenvalue();
    ExactVector w(v.size());
    long long base = 0;
    for (const auto& b : spec.blocks) {
        ExactComplex lam_k_inv = inverse(pow(b.lambda, k));
        for (long long i = b.size - 1; i >= 0; --i) {
            ExactComplex s = ec(v[static_cast<size_t>(base + i)]);
            for (long long j = i + 1; j < b.size; ++j) {
                const GaussianRational& wj = w[static_cast<size_t>(base + j)];
                if (wj.is_zero()) continue;
                ExactComplex e = block_power_entry(b.lambda, k, j - i);
                if (is_zero(e)) continue;
                s = sub(s, mul(e, ec(wj)));
            }
            w[static_cast<size_t>(base + i)] = detail::require_gaussian(mul(s, lam_k_inv));
        }
        base += b.size;
    }
    return w;
}

// entries e_d = C(k,d) * lambda^(k-d) for d = 0..size-1 as tracked floats
inline std::vector<CF> cf_block_entry_row(const ExactComplex& lambda, long long k, long long size) {
    std::vector<CF> row(static_cast<size_t>(size));
    if (is_zero(lambda)) {
        if (k < 0) throw NilpotentEigenvalue();
        if (k < size) row[static_cast<size_t>(k)] = CF(Real(1), Real(0));
        return row;
    }
    CF lam = cf_from_exact(lambda);
    CF lam_down = cf_pow(lam, -1);
    CF p = cf_pow(lam, k);
    for (long long d = 0; d < size; ++d) {
        if (k < 0 || d <= k) {
            long long cs;
            CF c = binomial_signed_ll(k, d, cs) ? cf_from_ll(cs) : cf_from_int(binomial_signed(k, d));
            if (!(c.re == 0)) row[static_cast<size_t>(d)] = cf_mul(c, p);
        }
        if (d + 1 < size) p = cf_mul(p, lam_down);
    }
    return row;
}

// A^k v with tracked error bounds; k may be negative when all eigenvalues are nonzero
inline std::vector<CF> apply_power_cf(const JordanFormSpec& spec, long long k, const std::vector<CF>& v) {
    if (static_cast<long long>(v.size()) != spec.dimension()) throw DimensionMismatch();
    std::vector<CF> out(v.size());
    long long base = 0;
    for (const auto& b : spec.blocks) {
        std::vector<CF> row = cf_block_entry_row(b.lambda, k, b.size);
        for (long long i = 0; i < b.size; ++i) {
            CF s;
            for (long long j = i; j < b.size; ++j)
                s = cf_add(s, cf_mul(row[static_cast<size_t>(j - i)], v[static_cast<size_t>(base + j)]));
            out[static_cast<size_t>(base + i)] = s;
        }
        base += b.size;
    }
    return out;
}

inline JordanFormSpec scale_eigenvalues(const JordanFormSpec& spec, const ExactComplex& mu) {
    JordanFormSpec out = spec;
    for (auto& b : out.blocks) b.lambda = mul(b.lambda, mu);
    return out;
}

inline json form_to_json(const JordanFormSpec& spec) {
    json blocks = json::array();
    for (const auto& b : spec.blocks)
        blocks.push_back(json{{"lambda", complex_to_json(b.lambda)}, {"size", b.size}});
    json out{{"blocks", std::move(blocks)}};
    if (spec.similarity) out["similarity"] = matrix_to_json(spec.similarity->P);
    return out;
}

inline JordanFormSpec form_from_json(const json& j) {
    if (!j.is_object() || !j.contains("blocks")) throw InvalidInput("Jordan form needs a \"blocks\" array");
    const json& blocks = j["blocks"];
    if (!blocks.is_array() || blocks.empty()) throw InvalidInput("\"blocks\" must be a nonempty array");
    JordanFormSpec spec;
    for (const auto& bj : blocks) {
        if (!bj.is_object() || !bj.contains("lambda") || !bj.contains("size"))
            throw InvalidInput("each block needs \"lambda\" and \"size\"");
        if (!bj["size"].is_number_integer() || bj["size"].get<long long>() < 1)
            throw InvalidInput("block size must be a positive integer");
        spec.blocks.push_back({complex_from_json(bj["lambda"]), bj["size"].get<long long>()});
    }
    if (j.contains("similarity") && !j["similarity"].is_null())
        spec.similarity = SimilaritySpec::from_matrix(matrix_from_json(j["similarity"]));
    spec.validate();
    return spec;
}

} // namespace jlim
