#pragma once

#include <jlim/witness.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jlim {

enum class OracleVerdict { EvidenceYes, EvidenceNo, Inconclusive };

struct OracleConfig {
    long long steps{10000};
    double tol{1e-3};
    unsigned precision_bits{64};
    double divergence{1e6};
    double cluster_resolution{0.05};

    void validate() const {
        if (steps < 1) throw InvalidInput("step count must be positive");
        if (precision_bits < 53) throw InvalidInput("precision must be at least 53 bits");
        if (!(tol > 0)) throw InvalidInput("tolerance must be positive");
        if (!(divergence > 0)) throw InvalidInput("divergence threshold must be positive");
        if (!(cluster_resolution > 0)) throw InvalidInput("cluster resolution must be positive");
    }
};

// a coordinate no pullback can move pins the distance curve above an exact
// floor; such a floor outranks any numerical dip
struct StructuralFloor {
    std::string reason;
    long long block{0};
    Rational floor_squared{0};  // floor = |coordinate| / 2
    long long from_k{0};        // first scanned index certified above the floor
};

namespace detail {

// incremental evaluator of J_b^(sign*k) * data for one block, k = 1, 2, ...
// the scalar power chain restarts from an exact base every 512 steps so float
// error stays linear in the reset interval; binomial factors are exact
struct BlockScanner {
    JordanBlockSpec blk;
    long long sign{1};
    bool nil{false};
    ExactVector data;
    // poly[i][t]: sum_j C(m,j) lambda^[-j] data[i+j] rewritten as a polynomial
    // in m via Stirling numbers of the first kind, so each step is one Horner pass
    std::vector<std::vector<CF>> poly;
    CF lam_cf, lam_pow, lam_step;
    long long k{0};

    void init(const JordanBlockSpec& b, ExactVector d, long long s) {
        blk = b;
        sign = s;
        data = std::move(d);
        k = 0;
        nil = is_zero(b.lambda);
        if (nil) {
            if (sign < 0) throw NilpotentEigenvalue();
            return;
        }
        lam_cf = cf_from_exact(b.lambda);
        lam_step = cf_pow(lam_cf, sign);
        size_t l = static_cast<size_t>(b.size);
        std::vector<std::vector<Int>> st(l);  // falling factorial m_(j) = sum_t st[j][t] m^t
        st[0] = {Int(1)};
        for (size_t j = 1; j < l; ++j) {
            st[j].assign(j + 1, Int(0));
            for (size_t t = 0; t <= j; ++t) {
                if (t > 0) st[j][t] += st[j - 1][t - 1];
                if (t < j) st[j][t] -= Int(j - 1) * st[j - 1][t];
            }
        }
        Int fact(1);
        std::vector<CF> pre(l);
        poly.assign(l, {});
        for (size_t i = 0; i < l; ++i) poly[i].assign(l - i, CF{});
        for (size_t j = 0; j < l; ++j) {
            if (j > 0) fact *= Int(j);
            CF lj = cf_pow(lam_cf, -static_cast<long long>(j));
            for (size_t i = 0; i + j < l; ++i) pre[i] = cf_mul(lj, cf_from_gaussian(data[i + j]));
            for (size_t t = 0; t <= j; ++t) {
                if (st[j][t] == 0) continue;
                CF coef = cf_from_rational(Rational(st[j][t], fact));
                for (size_t i = 0; i + j < l; ++i)
                    poly[i][t] = cf_add(poly[i][t], cf_mul(coef, pre[i]));
            }
        }
    }

    // appends the block's coordinates for the next index
    void step(std::vector<CF>& out) {
        ++k;
        long long l = blk.size;
        if (nil) {
            for (long long i = 0; i < l; ++i)
                out.push_back(i + k < l ? cf_from_gaussian(data[static_cast<size_t>(i + k)]) : CF{});
            return;
        }
        if (k == 1 || k % 512 == 0) lam_pow = cf_pow(lam_cf, sign * k);
        else lam_pow = cf_mul(lam_pow, lam_step);
        Real mr(sign * k);
        for (long long i = 0; i < l; ++i) {
            const auto& q = poly[static_cast<size_t>(i)];
            CF acc = q.back();
            for (size_t t = q.size() - 1; t-- > 0;) acc = cf_add(cf_scale(acc, mr), q[t]);
            out.push_back(cf_mul(lam_pow, acc));
        }
    }
};

inline std::vector<StructuralFloor> structural_floors(const JordanFormSpec& sj, const ExactVector& x,
                                                      const ExactVector& y) {
    std::vector<StructuralFloor> out;
    long long base = 0;
    for (size_t bi = 0; bi < sj.blocks.size(); ++bi) {
        const auto& b = sj.blocks[bi];
        long long l = b.size;
        switch (modulus_class(b.lambda)) {
            case ModulusClass::GreaterThanOne: {
                ExactVector xb(x.begin() + base, x.begin() + base + l);
                if (!vec_is_zero(xb))
                    out.push_back({"expanding block " + std::to_string(bi) + ": start vector is nonzero",
                                   static_cast<long long>(bi), Rational(sup_norm_squared(xb) / 4), 0});
                break;
            }
            case ModulusClass::LessThanOne: {
                ExactVector yb(y.begin() + base, y.begin() + base + l);
                if (!vec_is_zero(yb))
                    out.push_back({"contracting block " + std::to_string(bi) + ": target vector is nonzero",
                                   static_cast<long long>(bi), Rational(sup_norm_squared(yb) / 4), 0});
                break;
            }
            case ModulusClass::EqualOne: {
                long long head = (l + 1) / 2;
                long long jy = 0, jx = 0;  // deepest nonzero trailing coordinate, 0 = none
                for (long long j = head + 1; j <= l; ++j) {
                    if (!y[static_cast<size_t>(base + j - 1)].is_zero()) jy = j;
                    if (!x[static_cast<size_t>(base + j - 1)].is_zero()) jx = j;
                }
                if (jy > jx)
                    out.push_back({"unit block " + std::to_string(bi) + ": target coordinate " +
                                       std::to_string(jy) + " is nonzero past the reachable range",
                                   static_cast<long long>(bi),
                                   Rational(norm2(y[static_cast<size_t>(base + jy - 1)]) / 4), 0});
                else if (jx > jy)
                    out.push_back({"unit block " + std::to_string(bi) + ": start coordinate " +
                                       std::to_string(jx) + " is nonzero past the pinned range",
                                   static_cast<long long>(bi),
                                   Rational(norm2(x[static_cast<size_t>(base + jx - 1)]) / 4), 0});
                // equal deepest indices give no constant floor; the scan then
                // stays inconclusive
                break;
            }
        }
        base += l;
    }
    return out;
}

struct ScanStats {
    Real min_dist{0};
    long long min_k{0};
    Real tail_dist{0};
    Real tail_err{0};
    long long tail_k{0};
    Real tail_lower{0};
    long long floor_from_k{0};
};

// one full pass over k = 1..K; pullback on unit and expanding blocks, forward
// on contracting ones
inline ScanStats pullback_pass(const JordanFormSpec& sj, const ExactVector& x, const ExactVector& y,
                               long long K, const Real* floor_val, std::ostream* csv) {
    std::vector<BlockScanner> scan(sj.blocks.size());
    std::vector<std::vector<CF>> refs(sj.blocks.size());
    long long base = 0;
    for (size_t i = 0; i < sj.blocks.size(); ++i) {
        const auto& b = sj.blocks[i];
        bool fwd = modulus_class(b.lambda) == ModulusClass::LessThanOne;
        ExactVector db, rb;
        for (long long t = 0; t < b.size; ++t) {
            db.push_back(fwd ? x[static_cast<size_t>(base + t)] : y[static_cast<size_t>(base + t)]);
            rb.push_back(fwd ? y[static_cast<size_t>(base + t)] : x[static_cast<size_t>(base + t)]);
        }
        scan[i].init(b, db, fwd ? 1 : -1);
        refs[i] = cf_vector(rb);
        base += b.size;
    }

    ScanStats st;
    Real best_upper(0);
    bool have_tail = false;
    std::vector<CF> cur;
    for (long long k = 1; k <= K; ++k) {
        Real d(0), e(0);
        for (size_t i = 0; i < scan.size(); ++i) {
            cur.clear();
            scan[i].step(cur);
            Real be;
            Real bd = sup_dist_cf(cur, refs[i], &be);
            if (bd > d) d = bd;
            if (be > e) e = be;
        }
        if (csv) *csv << k << ',' << real_to_string(d, 18) << ',' << real_to_string(e, 6) << "\n";
        if (st.min_k == 0 || d < st.min_dist) {
            st.min_dist = d;
            st.min_k = k;
        }
        if (k > K / 2) {
            if (!have_tail || d + e < best_upper) {
                best_upper = d + e;
                st.tail_dist = d;
                st.tail_err = e;
                st.tail_k = k;
            }
            Real lo = d - e;
            if (lo < 0) lo = Real(0);
            if (!have_tail || lo < st.tail_lower) st.tail_lower = lo;
            have_tail = true;
        }
        if (floor_val && st.floor_from_k == 0 && d - e >= *floor_val) st.floor_from_k = k;
    }
    return st;
}

}  // namespace detail

struct OracleReport {
    OracleVerdict verdict{OracleVerdict::Inconclusive};
    long long steps{0};
    double tol{0};
    unsigned precision_bits{0};
    Real min_dist{0};
    long long min_k{0};
    Real tail_dist{0};
    Real tail_err{0};
    long long tail_k{0};
    Real tail_lower{0};
    std::optional<StructuralFloor> floor;
};

inline const char* verdict_name(OracleVerdict v) {
    switch (v) {
        case OracleVerdict::EvidenceYes: return "evidence_yes";
        case OracleVerdict::EvidenceNo: return "evidence_no";
        case OracleVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

inline json oracle_report_to_json(const OracleReport& r) {
    json j{{"verdict", verdict_name(r.verdict)},
           {"steps", r.steps},
           {"tol", r.tol},
           {"precision_bits", r.precision_bits},
           {"min_dist", real_to_string(r.min_dist, 18)},
           {"min_k", r.min_k},
           {"tail_dist", real_to_string(r.tail_dist, 18)},
           {"tail_err", real_to_string(r.tail_err, 6)},
           {"tail_k", r.tail_k},
           {"tail_lower", real_to_string(r.tail_lower, 18)}};
    if (r.floor)
        j["floor"] = json{{"reason", r.floor->reason},
                          {"block", r.floor->block},
                          {"value", real_to_string(boost::multiprecision::sqrt(Real(r.floor->floor_squared)), 18)},
                          {"from_k", r.floor->from_k}};
    return j;
}

// distance curve d_k between the pullback of y and x; EvidenceYes needs a
// certified dip below tol in the tail window (K/2, K], EvidenceNo only comes
// from a structural floor, everything else is Inconclusive
inline OracleReport pullback_scan(const JordanFormSpec& spec, const ExactVector& x, const ExactVector& y,
                                  const OracleConfig& cfg, std::ostream* csv = nullptr) {
    cfg.validate();
    spec.validate();
    long long dim = spec.dimension();
    if (static_cast<long long>(x.size()) != dim || static_cast<long long>(y.size()) != dim)
        throw DimensionMismatch();
    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    ExactVector yj = spec.similarity ? conjugate_vector(*spec.similarity, y, ConjDirection::Backward) : y;
    JordanFormSpec sj;
    sj.blocks = spec.blocks;

    auto floors = detail::structural_floors(sj, xj, yj);
    std::optional<StructuralFloor> best;
    for (const auto& f : floors)
        if (!best || f.floor_squared > best->floor_squared) best = f;

    unsigned bits = cfg.precision_bits;
    detail::ScanStats st;
    bool yes = false;
    for (;;) {
        PrecisionGuard pg(bits);
        Real fl(0);
        const Real* flp = nullptr;
        if (best) {
            fl = boost::multiprecision::sqrt(Real(best->floor_squared));
            flp = &fl;
        }
        st = detail::pullback_pass(sj, xj, yj, cfg.steps, flp, nullptr);
        if (best) break;
        Real tolr(cfg.tol);
        yes = st.tail_dist + st.tail_err < tolr && st.tail_err * 10 < tolr;
        bool settled = yes || st.tail_lower >= tolr;
        if (settled || bits >= 1024) break;
        bits = std::min(bits * 2, 1024u);
    }
    if (best) best->from_k = st.floor_from_k;

    OracleReport r;
    r.verdict = best ? OracleVerdict::EvidenceNo
                     : (yes ? OracleVerdict::EvidenceYes : OracleVerdict::Inconclusive);
    r.steps = cfg.steps;
    r.tol = cfg.tol;
    r.precision_bits = bits;
    r.min_dist = st.min_dist;
    r.min_k = st.min_k;
    r.tail_dist = st.tail_dist;
    r.tail_err = st.tail_err;
    r.tail_k = st.tail_k;
    r.tail_lower = st.tail_lower;
    r.floor = best;

    if (csv) {
        PrecisionGuard pg(bits);
        *csv << "# " << oracle_report_to_json(r).dump() << "\n";
        *csv << "k,dist,err\n";
        Real fl(0);
        const Real* flp = nullptr;
        if (best) {
            fl = boost::multiprecision::sqrt(Real(best->floor_squared));
            flp = &fl;
        }
        detail::pullback_pass(sj, xj, yj, cfg.steps, flp, csv);
    }
    return r;
}

// the exact point behind the scan's distance at index k: pullback of y on
// unit and expanding blocks, x itself on contracting ones; lets an
// evidence-yes dip be rechecked in exact arithmetic
inline ExactVector oracle_witness_point(const JordanFormSpec& spec, const ExactVector& x,
                                        const ExactVector& y, long long k) {
    spec.validate();
    if (k < 1) throw InvalidInput("scan index must be positive");
    long long dim = spec.dimension();
    if (static_cast<long long>(x.size()) != dim || static_cast<long long>(y.size()) != dim)
        throw DimensionMismatch();
    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    ExactVector yj = spec.similarity ? conjugate_vector(*spec.similarity, y, ConjDirection::Backward) : y;
    ExactVector out;
    out.reserve(static_cast<size_t>(dim));
    long long base = 0;
    for (const auto& b : spec.blocks) {
        if (modulus_class(b.lambda) == ModulusClass::LessThanOne) {
            for (long long t = 0; t < b.size; ++t) out.push_back(xj[static_cast<size_t>(base + t)]);
        } else {
            JordanFormSpec one;
            one.blocks = {b};
            ExactVector yb(yj.begin() + base, yj.begin() + base + b.size);
            ExactVector w = apply_inverse_power(one, k, yb);
            out.insert(out.end(), w.begin(), w.end());
        }
        base += b.size;
    }
    if (spec.similarity) out = conjugate_vector(*spec.similarity, out, ConjDirection::Forward);
    return out;
}

enum class OrbitKind { ConvergesToZero, DivergesToInfinity, Bounded };

inline const char* orbit_kind_name(OrbitKind k) {
    switch (k) {
        case OrbitKind::ConvergesToZero: return "converges_to_zero";
        case OrbitKind::DivergesToInfinity: return "diverges_to_infinity";
        case OrbitKind::Bounded: return "bounded";
    }
    return "bounded";
}

struct ForwardReport {
    OrbitKind kind{OrbitKind::Bounded};
    long long steps{0};
    unsigned precision_bits{0};
    double cluster_resolution{0};
    Real max_norm{0};
    Real final_norm{0};
    long long cluster_count{0};
    bool cluster_capped{false};
};

inline json forward_report_to_json(const ForwardReport& r) {
    return json{{"kind", orbit_kind_name(r.kind)},
                {"steps", r.steps},
                {"precision_bits", r.precision_bits},
                {"cluster_resolution", r.cluster_resolution},
                {"max_norm", real_to_string(r.max_norm, 18)},
                {"final_norm", real_to_string(r.final_norm, 18)},
                {"cluster_count", r.cluster_count},
                {"cluster_capped", r.cluster_capped}};
}

// norms of the forward orbit; the verdict looks at the tail window only, and
// tail points below the divergence threshold are clustered at the configured
// resolution
inline ForwardReport forward_orbit(const JordanFormSpec& spec, const ExactVector& x,
                                   const OracleConfig& cfg, std::ostream* csv = nullptr) {
    cfg.validate();
    spec.validate();
    if (static_cast<long long>(x.size()) != spec.dimension()) throw DimensionMismatch();
    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    JordanFormSpec sj;
    sj.blocks = spec.blocks;

    PrecisionGuard pg(cfg.precision_bits);
    Real tolr(cfg.tol), divr(cfg.divergence);
    std::vector<detail::BlockScanner> scan(sj.blocks.size());
    long long base = 0;
    for (size_t i = 0; i < sj.blocks.size(); ++i) {
        ExactVector db(xj.begin() + base, xj.begin() + base + sj.blocks[i].size);
        scan[i].init(sj.blocks[i], std::move(db), 1);
        base += sj.blocks[i].size;
    }

    if (csv) *csv << "k,norm,err\n";
    ForwardReport r;
    r.steps = cfg.steps;
    r.precision_bits = cfg.precision_bits;
    r.cluster_resolution = cfg.cluster_resolution;
    bool all_small = true, all_big = true;
    std::vector<std::vector<std::complex<double>>> pts;
    std::vector<CF> cur;
    long long K = cfg.steps;
    for (long long k = 1; k <= K; ++k) {
        cur.clear();
        for (auto& s : scan) s.step(cur);
        Real nrm(0), err(0);
        for (const auto& c : cur) {
            Real e;
            Real a = dist_cf(c, CF{}, &e);
            if (a > nrm) nrm = a;
            if (e > err) err = e;
        }
        if (csv) *csv << k << ',' << real_to_string(nrm, 18) << ',' << real_to_string(err, 6) << "\n";
        if (k == 1 || nrm > r.max_norm) r.max_norm = nrm;
        if (k == K) r.final_norm = nrm;
        if (k > K / 2) {
            if (!(nrm + err < tolr)) all_small = false;
            if (!(nrm - err > divr)) all_big = false;
            if (nrm < divr) {
                std::vector<std::complex<double>> pt;
                pt.reserve(cur.size());
                for (const auto& c : cur)
                    pt.emplace_back(c.re.convert_to<double>(), c.im.convert_to<double>());
                pts.push_back(std::move(pt));
            }
        }
    }
    r.kind = all_small ? OrbitKind::ConvergesToZero
                       : (all_big ? OrbitKind::DivergesToInfinity : OrbitKind::Bounded);

    std::vector<std::vector<std::complex<double>>> reps;
    for (const auto& p : pts) {
        bool found = false;
        for (const auto& q : reps) {
            double d = 0;
            for (size_t i = 0; i < p.size(); ++i) d = std::max(d, std::abs(p[i] - q[i]));
            if (d < cfg.cluster_resolution) {
                found = true;
                break;
            }
        }
        if (found) continue;
        if (reps.size() >= 1024) {
            r.cluster_capped = true;
            break;
        }
        reps.push_back(p);
    }
    r.cluster_count = static_cast<long long>(reps.size());
    return r;
}

struct DsetReport {
    bool finite{false};
    long long order{0};
    long long samples{0};
    double max_gap{0};     // radians
    double discrepancy{0};
    bool full_circle{false};
};

inline json dset_report_to_json(const DsetReport& r) {
    return json{{"finite", r.finite}, {"order", r.order},         {"samples", r.samples},
                {"max_gap", r.max_gap}, {"discrepancy", r.discrepancy}, {"full_circle", r.full_circle}};
}

// coverage of the closure of the power sequence on the unit circle: exact
// order for roots of unity, largest empty arc and star discrepancy otherwise
inline DsetReport dset_coverage(const ExactComplex& lambda, const OracleConfig& cfg) {
    cfg.validate();
    constexpr double two_pi = 6.283185307179586476925286766559;
    auto d = root_of_unity_order(lambda);  // throws NotUnitModulus off the circle
    DsetReport r;
    r.samples = cfg.steps;
    if (d) {
        r.finite = true;
        r.order = *d;
        r.max_gap = two_pi / static_cast<double>(*d);
        r.discrepancy = 1.0 / static_cast<double>(*d);
        return r;
    }
    const auto& g = std::get<GaussianRational>(lambda);
    double theta = detail::SearchState::angle_at(g, 1);
    std::vector<double> a(static_cast<size_t>(cfg.steps));
    for (long long k = 1; k <= cfg.steps; ++k) {
        double v = std::fmod(static_cast<double>(k) * theta, two_pi);
        if (v < 0) v += two_pi;
        a[static_cast<size_t>(k - 1)] = v / two_pi;
    }
    std::sort(a.begin(), a.end());
    size_t n = a.size();
    double gap = a.front() + 1.0 - a.back();
    for (size_t i = 1; i < n; ++i) gap = std::max(gap, a[i] - a[i - 1]);
    r.max_gap = gap * two_pi;
    double disc = 0;
    for (size_t i = 0; i < n; ++i) {
        disc = std::max(disc, (static_cast<double>(i) + 1.0) / static_cast<double>(n) - a[i]);
        disc = std::max(disc, a[i] - static_cast<double>(i) / static_cast<double>(n));
    }
    r.discrepancy = disc;
    r.full_circle = r.max_gap < two_pi / 100;
    return r;
}

struct BallReport {
    long long steps{0};
    double delta{0};
    double epsilon{0};
    unsigned precision_bits{0};
    long long qualifying_count{0};
    long long first_k{0};
    long long longest_run{0};
    long long n0{0};  // start of the qualifying suffix, 0 = none
    std::vector<long long> sample_ks;
};

inline json ball_report_to_json(const BallReport& r) {
    json ks = json::array();
    for (long long k : r.sample_ks) ks.push_back(k);
    return json{{"steps", r.steps},
                {"delta", r.delta},
                {"epsilon", r.epsilon},
                {"precision_bits", r.precision_bits},
                {"qualifying_count", r.qualifying_count},
                {"first_k", r.first_k},
                {"longest_run", r.longest_run},
                {"n0", r.n0},
                {"sample_ks", ks}};
}

// for each k, tests whether some x_k within delta of x lands within epsilon of
// y under A^k; candidates are the exact pullback of y and the pinned solve, k
// qualifies when either candidate certifies both radii
inline BallReport ball_transitivity_check(const JordanFormSpec& spec, const ExactVector& x,
                                          const ExactVector& y, double delta, double epsilon,
                                          const OracleConfig& cfg) {
    cfg.validate();
    spec.validate();
    if (!(delta > 0) || !(epsilon > 0)) throw InvalidInput("ball radii must be positive");
    long long dim = spec.dimension();
    if (static_cast<long long>(x.size()) != dim || static_cast<long long>(y.size()) != dim)
        throw DimensionMismatch();
    ExactVector xj = spec.similarity ? conjugate_vector(*spec.similarity, x, ConjDirection::Backward) : x;
    ExactVector yj = spec.similarity ? conjugate_vector(*spec.similarity, y, ConjDirection::Backward) : y;
    JordanFormSpec sj;
    sj.blocks = spec.blocks;

    PrecisionGuard pg(cfg.precision_bits);
    Real dr(delta), er(epsilon);
    for (const auto& b : sj.blocks)
        if (is_zero(b.lambda)) throw NilpotentEigenvalue();

    struct BState {
        ModulusClass mc;
        long long base{0};
        ExactVector xb, yb;
        detail::BlockScanner pull;
    };
    std::vector<BState> bs(sj.blocks.size());
    long long base = 0;
    for (size_t i = 0; i < sj.blocks.size(); ++i) {
        const auto& b = sj.blocks[i];
        bs[i].mc = modulus_class(b.lambda);
        bs[i].base = base;
        bs[i].xb.assign(xj.begin() + base, xj.begin() + base + b.size);
        bs[i].yb.assign(yj.begin() + base, yj.begin() + base + b.size);
        bs[i].pull.init(b, bs[i].yb, -1);
        base += b.size;
    }

    std::vector<CF> xref = cf_vector(xj);
    std::vector<CF> yref = cf_vector(yj);

    BallReport r;
    r.steps = cfg.steps;
    r.delta = delta;
    r.epsilon = epsilon;
    r.precision_bits = cfg.precision_bits;
    long long run = 0, last_unqual = 0;
    std::vector<std::vector<CF>> pull_out(sj.blocks.size());
    for (long long k = 1; k <= cfg.steps; ++k) {
        Real d(0), e(0);
        for (size_t i = 0; i < bs.size(); ++i) {
            pull_out[i].clear();
            bs[i].pull.step(pull_out[i]);
            Real be;
            std::vector<CF> rx(xref.begin() + bs[i].base, xref.begin() + bs[i].base + sj.blocks[i].size);
            Real bd = sup_dist_cf(pull_out[i], rx, &be);
            if (bd > d) d = bd;
            if (be > e) e = be;
        }
        bool qa = d + e < dr;

        bool qb = false;
        if (!qa) {
            std::vector<CF> bx;
            bx.reserve(static_cast<size_t>(dim));
            bool ok = true;
            for (size_t i = 0; i < bs.size() && ok; ++i) {
                const auto& b = sj.blocks[i];
                switch (bs[i].mc) {
                    case ModulusClass::GreaterThanOne:
                        bx.insert(bx.end(), pull_out[i].begin(), pull_out[i].end());
                        break;
                    case ModulusClass::LessThanOne:
                        for (const auto& g : bs[i].xb) bx.push_back(cf_from_gaussian(g));
                        break;
                    case ModulusClass::EqualOne: {
                        try {
                            BlockTerm t = unit_pinned_term(b.lambda, b.size, bs[i].xb, bs[i].yb, k, b.size / 2);
                            if (t.exact)
                                for (const auto& g : t.xe) bx.push_back(cf_from_gaussian(g));
                            else
                                bx.insert(bx.end(), t.xf.begin(), t.xf.end());
                        } catch (const SingularSystem&) {
                            ok = false;
                        } catch (const PrecisionExhausted&) {
                            ok = false;
                        }
                        break;
                    }
                }
            }
            if (ok) {
                Real e1, e2;
                Real d1 = sup_dist_cf(bx, xref, &e1);
                Real d2 = sup_dist_cf(apply_power_cf(sj, k, bx), yref, &e2);
                qb = d1 + e1 < dr && d2 + e2 < er;
            }
        }

        bool q = qa || qb;
        if (q) {
            ++r.qualifying_count;
            if (r.first_k == 0) r.first_k = k;
            if (r.sample_ks.size() < 32) r.sample_ks.push_back(k);
            ++run;
            if (run > r.longest_run) r.longest_run = run;
        } else {
            run = 0;
            last_unqual = k;
        }
    }
    r.n0 = (last_unqual == cfg.steps) ? 0 : last_unqual + 1;
    return r;
}

}  // namespace jlim
