#pragma once

#include <optional>
#include <variant>

#include "json.hpp"

#include "jlim/polar.hpp"

namespace jlim {

using json = nlohmann::ordered_json;

using ExactComplex = std::variant<GaussianRational, PolarExact>;

enum class ModulusClass { LessThanOne, EqualOne, GreaterThanOne };

inline ExactComplex ec(const GaussianRational& z) { return ExactComplex(z); }
inline ExactComplex ec(long long v) { return ExactComplex(GaussianRational(v)); }
inline ExactComplex ec_rat(const Rational& re, const Rational& im = Rational(0)) {
    return ExactComplex(GaussianRational(re, im));
}
inline ExactComplex ec_polar(const Rational& mod, long long p, long long q) {
    return ExactComplex(PolarExact(mod, p, q));
}

inline bool is_zero(const ExactComplex& z) {
    return std::visit([](const auto& v) { return v.is_zero(); }, z);
}

// |z|^2 as an exact rational
inline Rational modulus_squared(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return norm2(*g);
    const auto& pl = std::get<PolarExact>(z);
    return pl.modulus * pl.modulus;
}

inline ModulusClass modulus_class(const ExactComplex& z) {
    Rational m2 = modulus_squared(z);
    if (m2 < 1) return ModulusClass::LessThanOne;
    if (m2 == 1) return ModulusClass::EqualOne;
    return ModulusClass::GreaterThanOne;
}

inline ExactComplex pow(const ExactComplex& z, long long k) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return ExactComplex(pow(*g, k));
    return ExactComplex(pow(std::get<PolarExact>(z), k));
}

inline ExactComplex conj(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return ExactComplex(conj(*g));
    return ExactComplex(conj(std::get<PolarExact>(z)));
}

inline ExactComplex inverse(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return ExactComplex(inverse(*g));
    return ExactComplex(inverse(std::get<PolarExact>(z)));
}

// true complex-number equality across representations
inline bool complex_equal(const ExactComplex& a, const ExactComplex& b) {
    if (a.index() == b.index()) {
        if (a.index() == 0) return std::get<GaussianRational>(a) == std::get<GaussianRational>(b);
        return std::get<PolarExact>(a) == std::get<PolarExact>(b);
    }
    const auto& pl = (a.index() == 1) ? std::get<PolarExact>(a) : std::get<PolarExact>(b);
    const auto& ga = (a.index() == 0) ? std::get<GaussianRational>(a) : std::get<GaussianRational>(b);
    auto conv = polar_to_gaussian(pl);
    if (!conv) return false; // polar direction not Cartesian-representable
    return *conv == ga;
}

// exact product; throws NotRepresentable for mixed forms that leave both types
inline ExactComplex mul(const ExactComplex& a, const ExactComplex& b) {
    if (a.index() == 0 && b.index() == 0)
        return ExactComplex(std::get<GaussianRational>(a) * std::get<GaussianRational>(b));
    if (a.index() == 1 && b.index() == 1)
        return ExactComplex(mul(std::get<PolarExact>(a), std::get<PolarExact>(b)));
    const auto& pl = (a.index() == 1) ? std::get<PolarExact>(a) : std::get<PolarExact>(b);
    const auto& ga = (a.index() == 0) ? std::get<GaussianRational>(a) : std::get<GaussianRational>(b);
    if (auto g = polar_to_gaussian(pl)) return ExactComplex(*g * ga);
    if (auto p = gaussian_to_polar(ga)) return ExactComplex(mul(*p, pl));
    throw NotRepresentable("product of mixed polar and Cartesian values is not exactly representable");
}

inline std::optional<GaussianRational> to_gaussian(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return *g;
    return polar_to_gaussian(std::get<PolarExact>(z));
}

inline ExactComplex neg(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return ExactComplex(-*g);
    const auto& p = std::get<PolarExact>(z);
    if (p.modulus == 0) return z;
    return ExactComplex(mul(p, PolarExact(Rational(1), 1, 2)));
}

// exact sum; throws NotRepresentable for mixed or unaligned polar forms
inline ExactComplex add(const ExactComplex& a, const ExactComplex& b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (a.index() == 0 && b.index() == 0)
        return ExactComplex(std::get<GaussianRational>(a) + std::get<GaussianRational>(b));
    std::optional<GaussianRational> ga, gb;
    if (const auto* g = std::get_if<GaussianRational>(&a)) ga = *g;
    else ga = polar_to_gaussian(std::get<PolarExact>(a));
    if (const auto* g = std::get_if<GaussianRational>(&b)) gb = *g;
    else gb = polar_to_gaussian(std::get<PolarExact>(b));
    if (ga && gb) return ExactComplex(*ga + *gb);
    if (a.index() == 1 && b.index() == 1) {
        const auto& pa = std::get<PolarExact>(a);
        const auto& pb = std::get<PolarExact>(b);
        Rational diff = Rational(pa.p, pa.q) - Rational(pb.p, pb.q);
        if (diff == 0) return ExactComplex(PolarExact(pa.modulus + pb.modulus, pa.p, pa.q));
        if (diff == Rational(1, 2) || diff == Rational(-1, 2)) {
            Rational m = pa.modulus - pb.modulus;
            if (m >= 0) return ExactComplex(PolarExact(m, pa.p, pa.q));
            return ExactComplex(PolarExact(-m, pb.p, pb.q));
        }
    }
    throw NotRepresentable("sum of these exact values is not exactly representable");
}

inline ExactComplex sub(const ExactComplex& a, const ExactComplex& b) { return add(a, neg(b)); }

// order of lambda as a root of unity, or nullopt; requires unit modulus.
// The only unit-modulus Gaussian rationals of finite order are 1, -1, i, -i.
inline std::optional<long long> root_of_unity_order(const ExactComplex& z) {
    if (modulus_class(z) != ModulusClass::EqualOne) throw NotUnitModulus();
    if (const auto* pl = std::get_if<PolarExact>(&z)) return pl->q;
    const auto& g = std::get<GaussianRational>(z);
    if (g.im == 0) return (g.re == 1) ? 1 : 2;
    if (g.re == 0) return 4;
    return std::nullopt;
}

inline std::string format_complex(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z)) return format_gaussian(*g);
    return format_polar(std::get<PolarExact>(z));
}

// --- serialization ---

inline json rational_to_json(const Rational& r) { return json(format_rational(r)); }

inline Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    throw InvalidInput("expected a rational string, got: " + j.dump());
}

inline json complex_to_json(const ExactComplex& z) {
    if (const auto* g = std::get_if<GaussianRational>(&z))
        return json{{"re", format_rational(g->re)}, {"im", format_rational(g->im)}};
    const auto& pl = std::get<PolarExact>(z);
    return json{{"modulus", format_rational(pl.modulus)}, {"p", pl.p}, {"q", pl.q}};
}

inline ExactComplex complex_from_json(const json& j) {
    if (j.is_string() || j.is_number_integer())
        return ExactComplex(GaussianRational(rational_from_json(j), Rational(0)));
    if (!j.is_object()) throw InvalidInput("expected a complex value, got: " + j.dump());
    if (j.contains("re") || j.contains("im")) {
        Rational re = j.contains("re") ? rational_from_json(j.at("re")) : Rational(0);
        Rational im = j.contains("im") ? rational_from_json(j.at("im")) : Rational(0);
        return ExactComplex(GaussianRational(re, im));
    }
    if (j.contains("modulus")) {
        if (!j.contains("p") || !j.contains("q") || !j.at("p").is_number_integer() || !j.at("q").is_number_integer())
            throw InvalidInput("polar value needs integer fields p and q");
        return ExactComplex(PolarExact(rational_from_json(j.at("modulus")),
                                       j.at("p").get<long long>(), j.at("q").get<long long>()));
    }
    throw InvalidInput("unrecognized complex value: " + j.dump());
}

} // namespace jlim
