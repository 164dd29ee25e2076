#pragma once

#include <jlim/limitset.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <utility>

namespace jlim {

enum class ScheduleKind { FullSequence, ArithmeticProgression, SearchedSubsequence };

inline constexpr long long k_exact_power_limit = 2000;

namespace detail {

// lazily searched indices k with |lambda^k - mu| < 1/n, scanned along an
// arithmetic progression so finite-order constraints stay satisfied
struct SearchState {
    GaussianRational lambda;
    GaussianRational mu;
    long long stride{1};
    long long offset{1};
    long long budget{1000000};
    std::vector<long long> ks;
    long long k_cur{0};
    double alpha{0};
    double theta{0};
    double phi{0};
    long long since_renorm{1LL << 40};

    static double angle_at(const GaussianRational& g, long long k) {
        PrecisionGuard pg(192);
        CF z = cf_pow(cf_from_gaussian(g), k);
        return boost::multiprecision::atan2(z.im, z.re).template convert_to<double>();
    }

    void init_angles() {
        theta = angle_at(lambda, stride);
        phi = angle_at(mu, 1);
    }

    void ensure(size_t n) {
        static constexpr double two_pi = 6.283185307179586476925286766559;
        static constexpr double pi = two_pi / 2;
        while (ks.size() < n) {
            long long term_no = static_cast<long long>(ks.size()) + 1;
            double coarse = 1.05 / static_cast<double>(term_no);
            long long scanned = 0;
            for (;;) {
                if (++scanned > budget) throw SearchExhausted();
                k_cur = (k_cur == 0) ? offset : k_cur + stride;
                alpha += theta;
                if (alpha > pi) alpha -= two_pi;
                else if (alpha < -pi) alpha += two_pi;
                if (++since_renorm >= 65536) {
                    alpha = angle_at(lambda, k_cur);
                    since_renorm = 0;
                }
                double gap = alpha - phi;
                if (gap > pi) gap -= two_pi;
                else if (gap < -pi) gap += two_pi;
                if (std::fabs(gap) >= coarse) continue;
                PrecisionGuard pg(192);
                Real err;
                Real dist = dist_cf(cf_pow(cf_from_gaussian(lambda), k_cur), cf_from_gaussian(mu), &err);
                if (dist + err < Real(1) / Real(term_no)) {
                    ks.push_back(k_cur);
                    break;
                }
            }
        }
    }
};

} // namespace detail

struct WitnessSchedule {
    ScheduleKind kind{ScheduleKind::FullSequence};
    long long stride{1};
    long long offset{1};
    std::shared_ptr<detail::SearchState> search;
};

struct WitnessTerm {
    long long n{0};
    long long k{0};
    bool exact{false};
    ExactVector xe;      // exact terms
    std::vector<CF> xf;  // certified-float terms
    bool exact_hit{false};
};

struct Witness {
    WitnessSchedule schedule;
    long long n_min{1};
    long long requested{0};
    std::function<WitnessTerm(long long)> term;
    // same term with certified floats throughout; verification prefers this
    // since it skips the exact solves. Must agree with term: replacing term
    // means clearing or replacing this too.
    std::function<WitnessTerm(long long)> term_cf;

    long long index_of(long long n) const {
        if (n < n_min) throw InvalidInput("term number is below the schedule start");
        switch (schedule.kind) {
            case ScheduleKind::FullSequence: return n;
            case ScheduleKind::ArithmeticProgression: return schedule.offset + (n - 1) * schedule.stride;
            case ScheduleKind::SearchedSubsequence:
                schedule.search->ensure(static_cast<size_t>(n));
                return schedule.search->ks[static_cast<size_t>(n - 1)];
        }
        throw InvalidInput("unknown schedule kind");
    }
};

namespace detail {

inline std::vector<GaussianRational> solve_exact(std::vector<std::vector<GaussianRational>> m,
                                                 std::vector<GaussianRational> rhs) {
    size_t p = rhs.size();
    for (size_t c = 0; c < p; ++c) {
        size_t piv = c;
        while (piv < p && m[piv][c].is_zero()) ++piv;
        if (piv == p) throw SingularSystem();
        std::swap(m[piv], m[c]);
        std::swap(rhs[piv], rhs[c]);
        GaussianRational inv = inverse(m[c][c]);
        for (size_t j = c; j < p; ++j) m[c][j] = m[c][j] * inv;
        rhs[c] = rhs[c] * inv;
        for (size_t r = 0; r < p; ++r) {
            if (r == c || m[r][c].is_zero()) continue;
            GaussianRational f = m[r][c];
            for (size_t j = c; j < p; ++j) m[r][j] = m[r][j] - f * m[c][j];
            rhs[r] = rhs[r] - f * rhs[c];
        }
    }
    return rhs;
}

inline std::vector<CF> solve_cf(std::vector<std::vector<CF>> m, std::vector<CF> rhs) {
    size_t p = rhs.size();
    for (size_t c = 0; c < p; ++c) {
        size_t piv = c;
        Real best = abs_lower(m[c][c]);
        for (size_t r = c + 1; r < p; ++r) {
            Real v = abs_lower(m[r][c]);
            if (v > best) { best = v; piv = r; }
        }
        if (!(best > 0)) throw PrecisionExhausted("pivot is indistinguishable from zero");
        std::swap(m[piv], m[c]);
        std::swap(rhs[piv], rhs[c]);
        for (size_t r = c + 1; r < p; ++r) {
            CF f = cf_div(m[r][c], m[c][c]);
            for (size_t j = c; j < p; ++j) m[r][j] = cf_sub(m[r][j], cf_mul(f, m[c][j]));
            rhs[r] = cf_sub(rhs[r], cf_mul(f, rhs[c]));
        }
    }
    std::vector<CF> sol(p);
    for (size_t ci = p; ci-- > 0;) {
        CF acc = rhs[ci];
        for (size_t j = ci + 1; j < p; ++j) acc = cf_sub(acc, cf_mul(m[ci][j], sol[j]));
        sol[ci] = cf_div(acc, m[ci][ci]);
    }
    return sol;
}

} // namespace detail

struct BlockTerm {
    bool exact{false};
    ExactVector xe;
    std::vector<CF> xf;
};

// x_n for one unit block at index k: pin the first l-p coordinates to x,
// solve the trailing p from the first p output equations. The standard
// construction uses p = floor(l/2); other p values exist for the
// forced-dimension experiment.
inline BlockTerm unit_pinned_term(const ExactComplex& lambda, long long l, const ExactVector& x,
                                  const ExactVector& y, long long k, long long p,
                                  bool force_cf = false) {
    if (modulus_class(lambda) != ModulusClass::EqualOne)
        throw InvalidInput("pinned solve requires a unit-modulus eigenvalue");
    if (l < 1 || p < 0 || p > l) throw InvalidInput("pin count must lie in [0, block size]");
    if (k < 1) throw InvalidInput("schedule index must be positive");
    if (static_cast<long long>(x.size()) != l || static_cast<long long>(y.size()) != l)
        throw DimensionMismatch();

    long long head = l - p;
    BlockTerm out;
    out.exact = !force_cf && (p == 0 || (to_gaussian(lambda) && root_of_unity_order(lambda)));
    if (out.exact) {
        ExactVector xn(x.begin(), x.begin() + head);
        if (p > 0) {
            auto ent = [&](long long d) -> GaussianRational {
                if (d < 0) return GaussianRational();
                auto g = to_gaussian(block_power_entry(lambda, k, d));
                if (!g) throw NotRepresentable("unit power entry is not a Gaussian rational");
                return *g;
            };
            std::vector<std::vector<GaussianRational>> m(static_cast<size_t>(p));
            std::vector<GaussianRational> rhs(static_cast<size_t>(p));
            for (long long i = 1; i <= p; ++i) {
                GaussianRational acc = y[static_cast<size_t>(i - 1)];
                for (long long j = i; j <= head; ++j)
                    acc = acc - ent(j - i) * x[static_cast<size_t>(j - 1)];
                rhs[static_cast<size_t>(i - 1)] = acc;
                auto& row = m[static_cast<size_t>(i - 1)];
                row.resize(static_cast<size_t>(p));
                for (long long t = 1; t <= p; ++t) row[static_cast<size_t>(t - 1)] = ent(head + t - i);
            }
            auto sol = detail::solve_exact(std::move(m), std::move(rhs));
            xn.insert(xn.end(), sol.begin(), sol.end());
        }
        out.xe = std::move(xn);
    } else {
        auto row_pow = cf_block_entry_row(lambda, k, l);
        auto ent = [&](long long d) -> CF {
            return d < 0 ? CF() : row_pow[static_cast<size_t>(d)];
        };
        std::vector<CF> xn;
        for (long long j = 0; j < head; ++j) xn.push_back(cf_from_gaussian(x[static_cast<size_t>(j)]));
        std::vector<std::vector<CF>> m(static_cast<size_t>(p));
        std::vector<CF> rhs(static_cast<size_t>(p));
        for (long long i = 1; i <= p; ++i) {
            CF acc = cf_from_gaussian(y[static_cast<size_t>(i - 1)]);
            for (long long j = i; j <= head; ++j)
                acc = cf_sub(acc, cf_mul(ent(j - i), cf_from_gaussian(x[static_cast<size_t>(j - 1)])));
            rhs[static_cast<size_t>(i - 1)] = acc;
            auto& row = m[static_cast<size_t>(i - 1)];
            row.resize(static_cast<size_t>(p));
            for (long long t = 1; t <= p; ++t) row[static_cast<size_t>(t - 1)] = ent(head + t - i);
        }
        auto sol = detail::solve_cf(std::move(m), std::move(rhs));
        xn.insert(xn.end(), sol.begin(), sol.end());
        out.xf = std::move(xn);
    }
    return out;
}

namespace detail {

struct WitnessPlan {
    JordanFormSpec spec; // Jordan coordinates, similarity stripped
    ExactVector x;
    ExactVector y;
    WitnessSchedule schedule;
    long long n_min{1};
};

inline WitnessTerm build_term(const WitnessPlan& plan, long long n, bool force_cf = false) {
    if (n < plan.n_min) throw InvalidInput("term number is below the schedule start");
    long long k = 0;
    switch (plan.schedule.kind) {
        case ScheduleKind::FullSequence: k = n; break;
        case ScheduleKind::ArithmeticProgression:
            k = plan.schedule.offset + (n - 1) * plan.schedule.stride;
            break;
        case ScheduleKind::SearchedSubsequence:
            plan.schedule.search->ensure(static_cast<size_t>(n));
            k = plan.schedule.search->ks[static_cast<size_t>(n - 1)];
            break;
    }

    WitnessTerm t;
    t.n = n;
    t.k = k;
    std::vector<BlockTerm> segs;
    bool all_exact = true;
    bool hit = true;
    long long base = 0;
    for (const auto& b : plan.spec.blocks) {
        long long l = b.size;
        ExactVector xb(plan.x.begin() + base, plan.x.begin() + base + l);
        ExactVector yb(plan.y.begin() + base, plan.y.begin() + base + l);
        BlockTerm s;
        switch (modulus_class(b.lambda)) {
            case ModulusClass::LessThanOne: {
                s.exact = true;
                s.xe = xb;
                hit = hit && (vec_is_zero(xb) || (is_zero(b.lambda) && k >= l));
                break;
            }
            case ModulusClass::GreaterThanOne: {
                JordanFormSpec bs;
                bs.blocks = {b};
                // exact powers of a non-unit eigenvalue grow as k digits;
                // searched schedules can push k into the millions, so hand
                // those terms to the certified-float path
                if (!force_cf && k <= k_exact_power_limit) {
                    try {
                        s.xe = apply_inverse_power(bs, k, yb);
                        s.exact = true;
                        break;
                    } catch (const NotRepresentable&) {
                    }
                }
                s.xf = apply_power_cf(bs, -k, cf_vector(yb));
                break;
            }
            case ModulusClass::EqualOne: {
                s = unit_pinned_term(b.lambda, l, xb, yb, k, l / 2, force_cf);
                bool h = false;
                if (s.exact && root_of_unity_order(b.lambda)) {
                    JordanFormSpec bs;
                    bs.blocks = {b};
                    try {
                        h = apply_power(bs, k, s.xe) == yb;
                    } catch (const NotRepresentable&) {
                        h = false;
                    }
                }
                hit = hit && h;
                break;
            }
        }
        all_exact = all_exact && s.exact;
        segs.push_back(std::move(s));
        base += l;
    }

    t.exact = all_exact;
    t.exact_hit = hit;
    if (all_exact) {
        for (auto& s : segs) t.xe.insert(t.xe.end(), s.xe.begin(), s.xe.end());
    } else {
        for (auto& s : segs) {
            if (s.exact) {
                auto v = cf_vector(s.xe);
                t.xf.insert(t.xf.end(), v.begin(), v.end());
            } else {
                t.xf.insert(t.xf.end(), s.xf.begin(), s.xf.end());
            }
        }
    }
    return t;
}

} // namespace detail

inline Witness assemble_witness(const JordanFormSpec& spec, const ExactVector& x, const ExactVector& y,
                                long long N) {
    spec.validate();
    if (N < 1) throw InvalidInput("requested term count must be positive");
    long long dim = spec.dimension();
    if (static_cast<long long>(x.size()) != dim || static_cast<long long>(y.size()) != dim)
        throw DimensionMismatch();

    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    ExactVector yj = spec.similarity ? conjugate_vector(*spec.similarity, y, ConjDirection::Backward) : y;
    JordanFormSpec sj;
    sj.blocks = spec.blocks;

    SymbolicLimitSet set = classify(sj, xj, SetKind::J);
    MemberResult mr = member_symbolic(set, yj);
    if (mr == MemberResult::No) throw NotInSet();
    if (mr == MemberResult::Unknown)
        throw NotInSet("membership is undecided in the outer approximation");

    std::vector<GaussianRational> ratios;
    for (size_t i = 0; i < set.factors.size(); ++i)
        if (set.factors[i].type == FactorType::Rotation)
            ratios.push_back(yj[i] * inverse(set.factors[i].coeff));

    long long lmax = 1;
    for (const auto& b : sj.blocks) lmax = std::max(lmax, b.size);

    long long d = 1;
    long long n0 = 0;
    std::shared_ptr<detail::SearchState> search;
    if (!ratios.empty()) {
        const JointRotationGroup& g = set.groups.at(0);
        if (!g.rou_positions.empty()) {
            d = g.order;
            long long hit = -1;
            for (size_t ti = 0; ti < g.tuples.size() && hit < 0; ++ti) {
                bool all = true;
                for (size_t t = 0; t < g.rou_positions.size(); ++t)
                    if (!complex_equal(ec(ratios[g.rou_positions[t]]), g.tuples[ti][t])) {
                        all = false;
                        break;
                    }
                if (all) hit = static_cast<long long>(ti) + 1;
            }
            if (hit < 0) throw ScheduleConflict();
            n0 = hit % d;
        }
        if (g.circle_class_count() > 1)
            throw ScheduleConflict("multiple independent circle factors cannot share a schedule");
        for (size_t j = 0; j < g.slots.size() && g.circle_class_count() == 1; ++j) {
            if (g.slots[j].circle_class < 0) continue;
            auto lg = to_gaussian(g.slots[j].lambda);
            if (!lg) throw ScheduleConflict("circle slot eigenvalue is not a Gaussian rational");
            search = std::make_shared<detail::SearchState>();
            search->lambda = *lg;
            search->mu = ratios[j];
            break;
        }
    }

    WitnessSchedule sched;
    long long n_min = 1;
    if (search || !ratios.empty()) {
        long long base = lmax;
        sched.stride = d;
        sched.offset = base + (((n0 - base) % d + d) % d);
        if (search) {
            sched.kind = ScheduleKind::SearchedSubsequence;
            search->stride = d;
            search->offset = sched.offset;
            search->init_angles();
            sched.search = search;
        } else {
            sched.kind = ScheduleKind::ArithmeticProgression;
        }
    } else {
        sched.kind = ScheduleKind::FullSequence;
        sched.offset = lmax;
        n_min = lmax;
    }

    auto plan = std::make_shared<detail::WitnessPlan>();
    plan->spec = std::move(sj);
    plan->x = std::move(xj);
    plan->y = std::move(yj);
    plan->schedule = sched;
    plan->n_min = n_min;

    Witness w;
    w.schedule = sched;
    w.n_min = n_min;
    w.requested = N;
    w.term = [plan](long long n) { return detail::build_term(*plan, n); };
    w.term_cf = [plan](long long n) { return detail::build_term(*plan, n, true); };
    return w;
}

inline Witness witness_unit_block(const ExactComplex& lambda, long long l, const ExactVector& x,
                                  const ExactVector& y, long long N) {
    if (modulus_class(lambda) != ModulusClass::EqualOne)
        throw InvalidInput("unit witness requires a unit-modulus eigenvalue");
    JordanFormSpec s;
    s.blocks = {{lambda, l}};
    return assemble_witness(s, x, y, N);
}

inline Witness witness_expanding_block(const ExactComplex& lambda, long long l, const ExactVector& y,
                                       long long N) {
    if (modulus_class(lambda) != ModulusClass::GreaterThanOne)
        throw InvalidInput("expanding witness requires modulus above one");
    JordanFormSpec s;
    s.blocks = {{lambda, l}};
    return assemble_witness(s, ExactVector(static_cast<size_t>(l)), y, N);
}

inline Witness witness_contracting_block(const ExactComplex& lambda, long long l, const ExactVector& x,
                                         const ExactVector& y, long long N) {
    if (modulus_class(lambda) != ModulusClass::LessThanOne)
        throw InvalidInput("contracting witness requires modulus below one");
    if (!vec_is_zero(y)) throw NonzeroTarget();
    JordanFormSpec s;
    s.blocks = {{lambda, l}};
    return assemble_witness(s, x, y, N);
}

// exact squared sup-norm residuals of one exact term; spec must be in
// Jordan coordinates (no similarity)
inline std::pair<Rational, Rational> exact_residuals_squared(const JordanFormSpec& spec,
                                                             const ExactVector& x, const ExactVector& y,
                                                             const WitnessTerm& t) {
    if (!t.exact) throw InvalidInput("term is not exact");
    Rational rx = sup_dist_squared(t.xe, x);
    Rational ry = sup_dist_squared(apply_power(spec, t.k, t.xe), y);
    return {rx, ry};
}

struct WitnessReport {
    bool pass{false};
    long long n_from{0};
    long long n_to{0};
    Real max_dist_x{0};
    Real max_dist_y{0};
    Real err_bound{0};
    unsigned precision_bits{0};
};

inline WitnessReport verify_witness(const JordanFormSpec& spec, const ExactVector& x, const ExactVector& y,
                                    const Witness& w, long long N, double tol) {
    spec.validate();
    if (N < w.n_min) throw InvalidInput("term count ends before the schedule start");
    long long dim = spec.dimension();
    if (static_cast<long long>(x.size()) != dim || static_cast<long long>(y.size()) != dim)
        throw DimensionMismatch();

    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    ExactVector yj = spec.similarity ? conjugate_vector(*spec.similarity, y, ConjDirection::Backward) : y;
    JordanFormSpec sj;
    sj.blocks = spec.blocks;

    long long lo = std::max(w.n_min, N - N / 4 + 1);
    Real tolr(tol);
    for (unsigned bits = std::max(current_precision_bits(), 192u);; bits *= 2) {
        if (bits > 1536)
            throw PrecisionExhausted("verification error bound stays above tolerance/10");
        PrecisionGuard pg(bits);
        std::vector<CF> xcf = cf_vector(xj), ycf = cf_vector(yj);
        Real mx(0), my(0), me(0);
        for (long long n = lo; n <= N; ++n) {
            WitnessTerm t = w.term_cf ? w.term_cf(n) : w.term(n);
            std::vector<CF> v = t.exact ? cf_vector(t.xe) : t.xf;
            Real e1, e2;
            Real dx = sup_dist_cf(v, xcf, &e1);
            Real dy = sup_dist_cf(apply_power_cf(sj, t.k, v), ycf, &e2);
            if (dx > mx) mx = dx;
            if (dy > my) my = dy;
            if (e1 > me) me = e1;
            if (e2 > me) me = e2;
        }
        if (me * 10 < tolr) {
            WitnessReport r;
            r.pass = (mx + me < tolr) && (my + me < tolr);
            r.n_from = lo;
            r.n_to = N;
            r.max_dist_x = mx;
            r.max_dist_y = my;
            r.err_bound = me;
            r.precision_bits = bits;
            return r;
        }
    }
}

inline json schedule_to_json(const Witness& w) {
    switch (w.schedule.kind) {
        case ScheduleKind::FullSequence:
            return json{{"kind", "full_sequence"}, {"start", w.n_min}};
        case ScheduleKind::ArithmeticProgression:
            return json{{"kind", "arithmetic_progression"},
                        {"stride", w.schedule.stride},
                        {"offset", w.schedule.offset}};
        case ScheduleKind::SearchedSubsequence: {
            json idx = json::array();
            for (long long k : w.schedule.search->ks) idx.push_back(k);
            return json{{"kind", "searched_subsequence"},
                        {"stride", w.schedule.stride},
                        {"offset", w.schedule.offset},
                        {"indices", std::move(idx)}};
        }
    }
    throw InvalidInput("unknown schedule kind");
}

inline json witness_to_json(const Witness& w) {
    return json{{"schedule", schedule_to_json(w)}, {"n_min", w.n_min}, {"count", w.requested}};
}

inline void write_witness_csv(const JordanFormSpec& spec, const ExactVector& x, const ExactVector& y,
                              const Witness& w, long long N, std::ostream& os) {
    spec.validate();
    if (N < w.n_min) throw InvalidInput("term count ends before the schedule start");
    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    ExactVector yj = spec.similarity ? conjugate_vector(*spec.similarity, y, ConjDirection::Backward) : y;
    JordanFormSpec sj;
    sj.blocks = spec.blocks;

    PrecisionGuard pg(std::max(current_precision_bits(), 192u));
    w.index_of(N); // realize searched indices before the header is printed
    os << "# " << schedule_to_json(w).dump() << "\n";
    os << "n,k,dist_x,dist_y\n";
    std::vector<CF> xcf = cf_vector(xj), ycf = cf_vector(yj);
    for (long long n = w.n_min; n <= N; ++n) {
        WitnessTerm t = w.term(n);
        std::vector<CF> v = t.exact ? cf_vector(t.xe) : t.xf;
        Real dx = sup_dist_cf(v, xcf);
        Real dy = sup_dist_cf(apply_power_cf(sj, t.k, v), ycf);
        os << t.n << ',' << t.k << ',' << real_to_string(dx, 18) << ',' << real_to_string(dy, 18)
           << "\n";
    }
}

} // namespace jlim
