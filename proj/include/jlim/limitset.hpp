#pragma once

#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jlim/jordan.hpp"

namespace jlim {

enum class SetKind { L, J, Jmix };
enum class Exactness { Exact, OuterApprox };
enum class MemberResult { Yes, No, Unknown };

// closure of {lambda^n : n >= 1} on the unit circle
struct OrbitClosureD {
    enum class Kind { FiniteCyclic, FullCircle };
    Kind kind{Kind::FiniteCyclic};
    long long order{1}; // minimal d with lambda^d = 1; 0 for FullCircle
    ExactComplex generator;
};

inline OrbitClosureD closure_D(const ExactComplex& lambda) {
    auto d = root_of_unity_order(lambda);
    if (d) return {OrbitClosureD::Kind::FiniteCyclic, *d, lambda};
    return {OrbitClosureD::Kind::FullCircle, 0, lambda};
}

enum class GroupKind { FiniteCyclicTuples, SharedCircleWithFinite, FullTorusOuterApprox };

struct GroupSlot {
    ExactComplex lambda;
    std::optional<long long> rou_order;
    long long circle_class{-1}; // class of non-root-of-unity values related by equality or conjugacy
    int exponent{1};            // +1 carries mu, -1 carries conj(mu) within its class
};

struct JointRotationGroup {
    std::string param_id{"g0"};
    GroupKind kind{GroupKind::FiniteCyclicTuples};
    std::vector<GroupSlot> slots;
    long long order{1};                // lcm of the root-of-unity orders
    std::vector<size_t> rou_positions; // slot indices of finite-order slots
    std::vector<std::vector<ExactComplex>> tuples; // values at rou_positions for n = 1..order
    Exactness exactness{Exactness::Exact};

    long long circle_class_count() const {
        long long m = 0;
        for (const auto& s : slots) m = std::max(m, s.circle_class + 1);
        return m;
    }
};

// joint closure of {(lambda_1^n, ..., lambda_m^n) : n >= 1} in the m-torus.
// Exact when the values are all roots of unity, or when the non-root-of-unity
// values collapse to a single class under equality/conjugacy; otherwise an
// explicitly flagged outer approximation.
inline JointRotationGroup joint_closure(const std::vector<std::pair<long long, ExactComplex>>& unit_eigs) {
    JointRotationGroup g;
    std::vector<ExactComplex> class_reps;
    Int order(1);
    for (const auto& [block_id, lam] : unit_eigs) {
        (void)block_id;
        auto d = root_of_unity_order(lam);
        GroupSlot s;
        s.lambda = lam;
        if (d) {
            s.rou_order = *d;
            order = lcm(order, Int(*d));
        } else {
            long long cls = -1;
            int expo = 1;
            for (size_t c = 0; c < class_reps.size(); ++c) {
                if (complex_equal(lam, class_reps[c])) { cls = static_cast<long long>(c); expo = 1; break; }
                if (complex_equal(mul(lam, class_reps[c]), ec(1))) { cls = static_cast<long long>(c); expo = -1; break; }
            }
            if (cls < 0) {
                cls = static_cast<long long>(class_reps.size());
                class_reps.push_back(lam);
            }
            s.circle_class = cls;
            s.exponent = expo;
        }
        g.slots.push_back(std::move(s));
    }
    if (class_reps.empty()) {
        g.kind = GroupKind::FiniteCyclicTuples;
    } else if (class_reps.size() == 1) {
        g.kind = GroupKind::SharedCircleWithFinite;
    } else {
        g.kind = GroupKind::FullTorusOuterApprox;
        g.exactness = Exactness::OuterApprox;
    }
    if (order > 100000) throw InvalidInput("joint cyclic order exceeds the supported bound of 100000");
    g.order = order.convert_to<long long>();
    for (size_t i = 0; i < g.slots.size(); ++i)
        if (g.slots[i].rou_order) g.rou_positions.push_back(i);
    std::vector<ExactComplex> cur(g.rou_positions.size(), ec(1));
    g.tuples.reserve(static_cast<size_t>(g.order));
    for (long long n = 1; n <= g.order; ++n) {
        for (size_t t = 0; t < g.rou_positions.size(); ++t)
            cur[t] = mul(cur[t], g.slots[g.rou_positions[t]].lambda);
        g.tuples.push_back(cur);
    }
    return g;
}

enum class FactorType { Full, Zero, Rotation };

struct CoordinateFactor {
    FactorType type{FactorType::Zero};
    GaussianRational coeff; // rotation only; never zero there
};

inline CoordinateFactor full_factor() { return {FactorType::Full, GaussianRational()}; }
inline CoordinateFactor zero_factor() { return {FactorType::Zero, GaussianRational()}; }
inline CoordinateFactor rotation_factor(GaussianRational c) {
    if (c.is_zero()) return zero_factor();
    return {FactorType::Rotation, std::move(c)};
}

struct SymbolicLimitSet {
    bool is_empty{false};
    std::vector<CoordinateFactor> factors;
    std::vector<JointRotationGroup> groups; // at most one: all rotation slots share the index sequence
    Exactness exactness{Exactness::Exact};
    std::shared_ptr<const SimilaritySpec> basis; // set description lives in Jordan coordinates of this basis

    long long dimension() const { return static_cast<long long>(factors.size()); }
};

inline SymbolicLimitSet empty_set() {
    SymbolicLimitSet s;
    s.is_empty = true;
    return s;
}

inline SymbolicLimitSet all_zero_set(long long l) {
    SymbolicLimitSet s;
    s.factors.assign(static_cast<size_t>(l), zero_factor());
    return s;
}

namespace detail {

inline void check_block_args(long long l, const ExactVector& x) {
    if (l < 1) throw InvalidInput("block size must be at least 1");
    if (static_cast<long long>(x.size()) != l) throw DimensionMismatch();
}

// wraps a single block's factor list, attaching a one-slot group when a rotation survives
inline SymbolicLimitSet finish_block_set(std::vector<CoordinateFactor> factors, const ExactComplex& lambda) {
    SymbolicLimitSet s;
    s.factors = std::move(factors);
    bool rot = false;
    for (const auto& f : s.factors) rot = rot || f.type == FactorType::Rotation;
    if (rot) {
        s.groups.push_back(joint_closure({{0, lambda}}));
        s.exactness = s.groups[0].exactness;
    }
    return s;
}

} // namespace detail

inline SymbolicLimitSet classify_L_block(const ExactComplex& lambda, long long l, const ExactVector& x) {
    detail::check_block_args(l, x);
    switch (modulus_class(lambda)) {
    case ModulusClass::LessThanOne:
        return all_zero_set(l);
    case ModulusClass::GreaterThanOne:
        return vec_is_zero(x) ? all_zero_set(l) : empty_set();
    case ModulusClass::EqualOne:
    default:
        for (long long j = 1; j < l; ++j)
            if (!x[static_cast<size_t>(j)].is_zero()) return empty_set();
        std::vector<CoordinateFactor> f;
        f.push_back(rotation_factor(x[0]));
        for (long long j = 1; j < l; ++j) f.push_back(zero_factor());
        return detail::finish_block_set(std::move(f), lambda);
    }
}

inline SymbolicLimitSet classify_J_block(const ExactComplex& lambda, long long l, const ExactVector& x) {
    detail::check_block_args(l, x);
    switch (modulus_class(lambda)) {
    case ModulusClass::LessThanOne:
        return all_zero_set(l);
    case ModulusClass::GreaterThanOne: {
        if (!vec_is_zero(x)) return empty_set();
        SymbolicLimitSet s;
        s.factors.assign(static_cast<size_t>(l), full_factor());
        return s;
    }
    case ModulusClass::EqualOne:
    default: {
        long long r = (l + 1) / 2;
        for (long long j = r; j < l; ++j)
            if (!x[static_cast<size_t>(j)].is_zero()) return empty_set();
        std::vector<CoordinateFactor> f;
        if (l % 2 == 0) {
            for (long long j = 0; j < r; ++j) f.push_back(full_factor());
            for (long long j = 0; j < r; ++j) f.push_back(zero_factor());
            SymbolicLimitSet s;
            s.factors = std::move(f);
            return s;
        }
        for (long long j = 0; j + 1 < r; ++j) f.push_back(full_factor());
        GaussianRational c = (r % 2 == 0) ? -x[static_cast<size_t>(r - 1)] : x[static_cast<size_t>(r - 1)];
        f.push_back(rotation_factor(std::move(c)));
        for (long long j = 0; j + 1 < r; ++j) f.push_back(zero_factor());
        return detail::finish_block_set(std::move(f), lambda);
    }
    }
}

inline SymbolicLimitSet assemble(const std::vector<SymbolicLimitSet>& per_block,
                                 const std::optional<JointRotationGroup>& group) {
    for (const auto& b : per_block)
        if (b.is_empty) return empty_set();
    SymbolicLimitSet out;
    size_t rot = 0;
    for (const auto& b : per_block)
        for (const auto& f : b.factors) {
            out.factors.push_back(f);
            if (f.type == FactorType::Rotation) ++rot;
        }
    if (rot > 0) {
        if (!group || group->slots.size() != rot)
            throw InvalidInput("joint rotation group does not match the rotation coordinates");
        out.groups.push_back(*group);
        out.exactness = group->exactness;
    }
    return out;
}

inline SymbolicLimitSet classify(const JordanFormSpec& spec, const ExactVector& x, SetKind which) {
    spec.validate();
    if (static_cast<long long>(x.size()) != spec.dimension()) throw DimensionMismatch();
    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    if (which == SetKind::Jmix && !vec_is_zero(xj)) throw UnsupportedJmixNonzero();

    std::vector<SymbolicLimitSet> per;
    std::vector<std::pair<long long, ExactComplex>> rot_eigs;
    bool any_empty = false;
    long long base = 0, bid = 0;
    for (const auto& b : spec.blocks) {
        ExactVector xb(xj.begin() + base, xj.begin() + base + b.size);
        SymbolicLimitSet s = (which == SetKind::L) ? classify_L_block(b.lambda, b.size, xb)
                                                   : classify_J_block(b.lambda, b.size, xb);
        any_empty = any_empty || s.is_empty;
        for (const auto& f : s.factors)
            if (f.type == FactorType::Rotation) rot_eigs.push_back({bid, b.lambda});
        per.push_back(std::move(s));
        base += b.size;
        ++bid;
    }
    std::optional<JointRotationGroup> g;
    if (!rot_eigs.empty() && !any_empty) g = joint_closure(rot_eigs);
    SymbolicLimitSet out = assemble(per, g);
    if (spec.similarity && !out.is_empty)
        out.basis = std::make_shared<const SimilaritySpec>(*spec.similarity);
    return out;
}

// J at the origin along the full sequence k_n = n; the set coincides with J(0)
inline SymbolicLimitSet classify_Jmix_zero(const JordanFormSpec& spec) {
    ExactVector zero(static_cast<size_t>(spec.dimension()));
    return classify(spec, zero, SetKind::Jmix);
}

inline MemberResult member_symbolic(const SymbolicLimitSet& set, const ExactVector& y_in) {
    if (set.is_empty) return MemberResult::No;
    ExactVector y = set.basis ? conjugate_vector(*set.basis, y_in, ConjDirection::Backward) : y_in;
    if (y.size() != set.factors.size()) throw DimensionMismatch();

    std::vector<GaussianRational> ratios;
    for (size_t i = 0; i < set.factors.size(); ++i) {
        const auto& f = set.factors[i];
        if (f.type == FactorType::Zero) {
            if (!y[i].is_zero()) return MemberResult::No;
        } else if (f.type == FactorType::Rotation) {
            ratios.push_back(y[i] * inverse(f.coeff));
        }
    }
    if (ratios.empty()) return MemberResult::Yes;

    const JointRotationGroup& g = set.groups.at(0);
    for (const auto& r : ratios)
        if (norm2(r) != 1) return MemberResult::No;

    auto rou_part_matches = [&]() {
        if (g.rou_positions.empty()) return true;
        for (const auto& tup : g.tuples) {
            bool all = true;
            for (size_t t = 0; t < g.rou_positions.size(); ++t)
                if (!complex_equal(ec(ratios[g.rou_positions[t]]), tup[t])) { all = false; break; }
            if (all) return true;
        }
        return false;
    };

    if (g.kind == GroupKind::FiniteCyclicTuples) return rou_part_matches() ? MemberResult::Yes : MemberResult::No;

    std::vector<std::optional<GaussianRational>> mu(static_cast<size_t>(g.circle_class_count()));
    for (size_t j = 0; j < g.slots.size(); ++j) {
        const auto& s = g.slots[j];
        if (s.circle_class < 0) continue;
        GaussianRational cand = (s.exponent == 1) ? ratios[j] : conj(ratios[j]);
        auto& slot_mu = mu[static_cast<size_t>(s.circle_class)];
        if (!slot_mu) slot_mu = cand;
        else if (*slot_mu != cand) return MemberResult::No;
    }
    if (!rou_part_matches()) return MemberResult::No;
    return g.kind == GroupKind::SharedCircleWithFinite ? MemberResult::Yes : MemberResult::Unknown;
}

// exact members (or outer-approximation members when the set is OuterApprox)
inline std::vector<ExactVector> sample_points(const SymbolicLimitSet& set, size_t count,
                                              unsigned long long seed) {
    std::vector<ExactVector> out;
    if (set.is_empty) return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> small(-6, 6);
    auto rnd_rational = [&]() { return Rational(small(rng), 1 + std::llabs(small(rng))); };
    auto unit_point = [&]() {
        Rational t = rnd_rational();
        Rational den = 1 + t * t;
        return GaussianRational((1 - t * t) / den, 2 * t / den);
    };

    const JointRotationGroup* g = set.groups.empty() ? nullptr : &set.groups[0];
    std::vector<size_t> usable_tuples;
    if (g) {
        for (size_t n = 0; n < g->tuples.size(); ++n) {
            bool ok = true;
            for (const auto& v : g->tuples[n]) ok = ok && to_gaussian(v).has_value();
            if (ok) usable_tuples.push_back(n);
        }
        if (!g->rou_positions.empty() && usable_tuples.empty())
            throw NotRepresentable("no tuple of the rotation group is Cartesian-representable");
    }

    for (size_t s = 0; s < count; ++s) {
        std::vector<GaussianRational> slotval;
        if (g) {
            slotval.resize(g->slots.size());
            size_t n = 0;
            if (!g->rou_positions.empty()) n = usable_tuples[rng() % usable_tuples.size()];
            std::vector<GaussianRational> mu(static_cast<size_t>(g->circle_class_count()));
            for (auto& m : mu) m = unit_point();
            for (size_t j = 0; j < g->slots.size(); ++j) {
                const auto& slot = g->slots[j];
                if (slot.rou_order) {
                    size_t t = 0;
                    while (g->rou_positions[t] != j) ++t;
                    slotval[j] = *to_gaussian(g->tuples[n][t]);
                } else {
                    const auto& m = mu[static_cast<size_t>(slot.circle_class)];
                    slotval[j] = (slot.exponent == 1) ? m : conj(m);
                }
            }
        }
        ExactVector v;
        v.reserve(set.factors.size());
        size_t rslot = 0;
        for (const auto& f : set.factors) {
            if (f.type == FactorType::Full)
                v.push_back(GaussianRational(rnd_rational(), rnd_rational()));
            else if (f.type == FactorType::Zero)
                v.push_back(GaussianRational());
            else
                v.push_back(slotval[rslot++] * f.coeff);
        }
        if (set.basis) v = conjugate_vector(*set.basis, v, ConjDirection::Forward);
        out.push_back(std::move(v));
    }
    return out;
}

// --- comparison (structural) ---

inline bool operator==(const GroupSlot& a, const GroupSlot& b) {
    return complex_equal(a.lambda, b.lambda) && a.rou_order == b.rou_order &&
           a.circle_class == b.circle_class && a.exponent == b.exponent;
}

inline bool operator==(const JointRotationGroup& a, const JointRotationGroup& b) {
    return a.param_id == b.param_id && a.kind == b.kind && a.slots == b.slots && a.order == b.order;
}

inline bool operator==(const CoordinateFactor& a, const CoordinateFactor& b) {
    return a.type == b.type && a.coeff == b.coeff;
}

inline bool operator==(const SymbolicLimitSet& a, const SymbolicLimitSet& b) {
    if (a.is_empty != b.is_empty) return false;
    if (a.is_empty) return true;
    if (!(a.factors == b.factors && a.groups == b.groups && a.exactness == b.exactness)) return false;
    if (!a.basis != !b.basis) return false;
    if (a.basis && !(a.basis->P == b.basis->P)) return false;
    return true;
}

// --- serialization ---

inline json group_to_json(const JointRotationGroup& g) {
    json eig = json::array();
    for (const auto& s : g.slots) eig.push_back(complex_to_json(s.lambda));
    const char* kind = g.kind == GroupKind::FiniteCyclicTuples      ? "finite_cyclic"
                       : g.kind == GroupKind::SharedCircleWithFinite ? "shared_circle"
                                                                     : "full_torus";
    return json{{"id", g.param_id}, {"kind", kind}, {"eigenvalues", std::move(eig)}};
}

inline JointRotationGroup group_from_json(const json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("kind") || !j.contains("eigenvalues"))
        throw InvalidInput("group needs \"id\", \"kind\", and \"eigenvalues\"");
    std::vector<std::pair<long long, ExactComplex>> eigs;
    for (const auto& e : j["eigenvalues"])
        eigs.push_back({static_cast<long long>(eigs.size()), complex_from_json(e)});
    JointRotationGroup g = joint_closure(eigs);
    g.param_id = j["id"].get<std::string>();
    const char* kind = g.kind == GroupKind::FiniteCyclicTuples      ? "finite_cyclic"
                       : g.kind == GroupKind::SharedCircleWithFinite ? "shared_circle"
                                                                     : "full_torus";
    if (j["kind"].get<std::string>() != kind)
        throw InvalidInput("group kind does not match its eigenvalues");
    return g;
}

inline json set_to_json(const SymbolicLimitSet& s) {
    if (s.is_empty) return json{{"kind", "empty"}};
    json factors = json::array();
    for (const auto& f : s.factors) {
        if (f.type == FactorType::Full) factors.push_back(json{{"type", "full"}});
        else if (f.type == FactorType::Zero) factors.push_back(json{{"type", "zero"}});
        else
            factors.push_back(json{{"type", "rotation"},
                                   {"param", s.groups.at(0).param_id},
                                   {"coeff", complex_to_json(ExactComplex(f.coeff))}});
    }
    json groups = json::array();
    for (const auto& g : s.groups) groups.push_back(group_to_json(g));
    json out{{"kind", "product"},
             {"factors", std::move(factors)},
             {"groups", std::move(groups)},
             {"exact", s.exactness == Exactness::Exact}};
    if (s.basis) out["basis"] = matrix_to_json(s.basis->P);
    return out;
}

inline SymbolicLimitSet set_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw InvalidInput("set needs a \"kind\"");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "empty") return empty_set();
    if (kind != "product") throw InvalidInput("set kind must be \"empty\" or \"product\"");
    SymbolicLimitSet s;
    if (j.contains("groups"))
        for (const auto& gj : j["groups"]) s.groups.push_back(group_from_json(gj));
    if (s.groups.size() > 1) throw InvalidInput("at most one rotation group is supported");
    size_t rot = 0;
    if (!j.contains("factors") || !j["factors"].is_array()) throw InvalidInput("product set needs \"factors\"");
    for (const auto& fj : j["factors"]) {
        std::string t = fj.at("type").get<std::string>();
        if (t == "full") s.factors.push_back(full_factor());
        else if (t == "zero") s.factors.push_back(zero_factor());
        else if (t == "rotation") {
            if (s.groups.empty() || fj.at("param").get<std::string>() != s.groups[0].param_id)
                throw InvalidInput("rotation factor references an unknown group");
            auto c = to_gaussian(complex_from_json(fj.at("coeff")));
            if (!c || c->is_zero()) throw InvalidInput("rotation coefficient must be a nonzero Cartesian value");
            s.factors.push_back(rotation_factor(*c));
            ++rot;
        } else {
            throw InvalidInput("factor type must be full, zero, or rotation");
        }
    }
    if (!s.groups.empty() && s.groups[0].slots.size() != rot)
        throw InvalidInput("rotation group does not match the rotation coordinates");
    if (rot == 0 && !s.groups.empty()) throw InvalidInput("a group is present but no rotation factor uses it");
    s.exactness = (!s.groups.empty() && s.groups[0].exactness == Exactness::OuterApprox)
                      ? Exactness::OuterApprox
                      : Exactness::Exact;
    if (j.contains("exact") && j["exact"].is_boolean() &&
        j["exact"].get<bool>() != (s.exactness == Exactness::Exact))
        throw InvalidInput("\"exact\" flag contradicts the group structure");
    if (j.contains("basis") && !j["basis"].is_null()) {
        SimilaritySpec sim = SimilaritySpec::from_matrix(matrix_from_json(j["basis"]));
        if (sim.P.n != static_cast<long long>(s.factors.size()))
            throw DimensionMismatch("basis dimension does not match the factor count");
        s.basis = std::make_shared<const SimilaritySpec>(std::move(sim));
    }
    return s;
}

inline std::string format_set(const SymbolicLimitSet& s) {
    if (s.is_empty) return "empty";
    std::string out;
    for (size_t i = 0; i < s.factors.size(); ++i) {
        if (i) out += " x ";
        const auto& f = s.factors[i];
        if (f.type == FactorType::Full) out += "C";
        else if (f.type == FactorType::Zero) out += "{0}";
        else out += "D*(" + format_gaussian(f.coeff) + ")";
    }
    if (!s.groups.empty()) {
        const auto& g = s.groups[0];
        if (g.kind == GroupKind::FiniteCyclicTuples)
            out += "  [D: cyclic, order " + std::to_string(g.order) + "]";
        else if (g.kind == GroupKind::SharedCircleWithFinite)
            out += "  [D: shared circle" + std::string(g.order > 1 ? ", finite part order " + std::to_string(g.order) : "") + "]";
        else
            out += "  [D: torus, outer approximation]";
    }
    if (s.basis) out += "  (in the similar basis)";
    return out;
}

} // namespace jlim
