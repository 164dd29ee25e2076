#pragma once

#include <jlim/oracle.hpp>

#include <functional>
#include <string>
#include <vector>

namespace jlim {

struct SelfTestCheck {
    std::string name;
    bool pass{false};
    std::string detail;  // empty on pass, first failure otherwise
};

struct SelfTestReport {
    std::vector<SelfTestCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline json selftest_to_json(const SelfTestReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json cj{{"name", c.name}, {"pass", c.pass}};
        if (!c.detail.empty()) cj["detail"] = c.detail;
        checks.push_back(std::move(cj));
    }
    return json{{"pass", r.all_pass()}, {"checks", std::move(checks)}};
}

namespace detail {

struct CheckRunner {
    SelfTestCheck check;

    explicit CheckRunner(std::string name) { check.name = std::move(name); }

    void require(bool ok, const std::string& what) {
        if (!ok && check.detail.empty()) check.detail = what;
    }

    SelfTestCheck finish() {
        check.pass = check.detail.empty();
        return std::move(check);
    }
};

inline SelfTestCheck guarded_check(const std::string& name,
                                   const std::function<void(CheckRunner&)>& body) {
    CheckRunner r(name);
    try {
        body(r);
    } catch (const std::exception& e) {
        r.require(false, std::string("exception: ") + e.what());
    }
    return r.finish();
}

inline JordanFormSpec single(const ExactComplex& lambda, long long l) {
    JordanFormSpec s;
    s.blocks = {{lambda, l}};
    return s;
}

inline std::vector<ExactComplex> selftest_palette() {
    return {ec_rat(Rational(1, 2)), ec(2), ec(1), ec(-1), ec_rat(Rational(0), Rational(1)),
            ec_rat(Rational(3, 5), Rational(4, 5))};
}

inline std::vector<ExactComplex> selftest_scalars() {
    return {ec_rat(Rational(0), Rational(1)), ec(-1), ec_rat(Rational(3, 5), Rational(4, 5))};
}

inline std::string spec_label(const JordanFormSpec& s) {
    std::string out;
    for (const auto& b : s.blocks) {
        if (!out.empty()) out += " + ";
        out += "(" + format_complex(b.lambda) + ", " + std::to_string(b.size) + ")";
    }
    return out;
}

}  // namespace detail

inline SelfTestCheck check_exact_roundtrips() {
    return detail::guarded_check("exact arithmetic round trips", [](detail::CheckRunner& r) {
        for (const auto& lam : detail::selftest_palette()) {
            r.require(complex_equal(mul(pow(lam, 9), pow(lam, -9)), ec(1)),
                      "power inverse identity fails for " + format_complex(lam));
            r.require(complex_equal(mul(lam, inverse(lam)), ec(1)),
                      "inverse identity fails for " + format_complex(lam));
            r.require(complex_equal(complex_from_json(complex_to_json(lam)), lam),
                      "complex serialization round trip fails for " + format_complex(lam));
            Rational n2 = modulus_squared(lam);
            ModulusClass mc = modulus_class(lam);
            bool consistent = (mc == ModulusClass::EqualOne && n2 == Rational(1)) ||
                              (mc == ModulusClass::LessThanOne && n2 < Rational(1)) ||
                              (mc == ModulusClass::GreaterThanOne && n2 > Rational(1));
            r.require(consistent, "modulus class disagrees with |.|^2 for " + format_complex(lam));
        }
        r.require(complex_equal(ec_polar(Rational(1), 1, 4), ec_rat(Rational(0), Rational(1))),
                  "quarter turn does not equal i");
        r.require(complex_equal(ec_polar(Rational(1), 2, 4), ec(-1)), "half turn does not equal -1");
        for (const auto& q : {Rational(0), Rational(-7, 3), Rational(22, 7)})
            r.require(rational_from_json(rational_to_json(q)) == q,
                      "rational serialization round trip fails for " + format_rational(q));
    });
}

inline SelfTestCheck check_serialization_roundtrips() {
    return detail::guarded_check("form and set serialization round trips", [](detail::CheckRunner& r) {
        JordanFormSpec s;
        s.blocks = {{ec(2), 1}, {ec_rat(Rational(0), Rational(1)), 2}, {ec_rat(Rational(1, 2)), 1}};
        GaussianMatrix p(4);
        for (long long i = 0; i < 4; ++i) p.at(i, i) = GaussianRational(1);
        p.at(0, 1) = GaussianRational(Rational(1), Rational(1));
        p.at(2, 3) = GaussianRational(-2);
        s.similarity = SimilaritySpec::from_matrix(p);

        json fj = form_to_json(s);
        r.require(form_to_json(form_from_json(fj)) == fj, "form round trip is not stable");

        ExactVector v{GaussianRational(Rational(1, 3), Rational(-2)), GaussianRational(0),
                      GaussianRational(Rational(0), Rational(5)), GaussianRational(7)};
        json vj = vector_to_json(v);
        r.require(vector_to_json(vector_from_json(vj)) == vj, "vector round trip is not stable");

        for (const auto& lam : detail::selftest_palette()) {
            for (long long l : {1LL, 2LL}) {
                JordanFormSpec bs = detail::single(lam, l);
                ExactVector e1(static_cast<size_t>(l));
                e1[0] = GaussianRational(1);
                for (const ExactVector& x : {ExactVector(static_cast<size_t>(l)), e1}) {
                    SymbolicLimitSet set = classify(bs, x, SetKind::J);
                    r.require(set_from_json(set_to_json(set)) == set,
                              "set round trip fails for " + detail::spec_label(bs));
                }
            }
        }
        r.require(set_from_json(set_to_json(empty_set())).is_empty, "empty set round trip fails");
    });
}

inline SelfTestCheck check_scalar_invariance() {
    return detail::guarded_check("unimodular rescaling keeps the sets at zero", [](detail::CheckRunner& r) {
        std::vector<JordanFormSpec> specs{detail::single(ec(1), 3),
                                          detail::single(ec_rat(Rational(0), Rational(1)), 2),
                                          detail::single(ec(-1), 1),
                                          detail::single(ec_rat(Rational(3, 5), Rational(4, 5)), 2),
                                          detail::single(ec(2), 2),
                                          detail::single(ec_rat(Rational(1, 2)), 1)};
        {
            JordanFormSpec m1;
            m1.blocks = {{ec(2), 1}, {ec_rat(Rational(0), Rational(1)), 2}, {ec_rat(Rational(1, 2)), 1}};
            specs.push_back(m1);
            JordanFormSpec m2;
            m2.blocks = {{ec(1), 1}, {ec_rat(Rational(3, 5), Rational(4, 5)), 1}};
            specs.push_back(m2);
        }
        unsigned long long seed = 2026;
        for (const auto& s : specs) {
            ExactVector zero(static_cast<size_t>(s.dimension()));
            SymbolicLimitSet base = classify(s, zero, SetKind::J);
            for (const auto& mu : detail::selftest_scalars()) {
                SymbolicLimitSet scaled = classify(scale_eigenvalues(s, mu), zero, SetKind::J);
                std::string where =
                    " for " + detail::spec_label(s) + " scaled by " + format_complex(mu);
                r.require(base == scaled, "sets differ" + where);
                for (const auto& pt : sample_points(base, 10, seed++))
                    r.require(member_symbolic(scaled, pt) == MemberResult::Yes,
                              "sampled point leaves the scaled set" + where);
                for (const auto& pt : sample_points(scaled, 10, seed++))
                    r.require(member_symbolic(base, pt) == MemberResult::Yes,
                              "sampled point leaves the base set" + where);
            }
        }
    });
}

inline SelfTestCheck check_mixed_agreement_at_zero() {
    return detail::guarded_check("extended and mixed sets coincide at zero", [](detail::CheckRunner& r) {
        std::vector<JordanFormSpec> specs;
        for (const auto& lam : detail::selftest_palette())
            for (long long l : {1LL, 2LL, 3LL}) specs.push_back(detail::single(lam, l));
        {
            JordanFormSpec m;
            m.blocks = {{ec_rat(Rational(0), Rational(1)), 2}, {ec(2), 1}, {ec_rat(Rational(1, 2)), 2}};
            specs.push_back(m);
        }
        for (const auto& s : specs) {
            ExactVector zero(static_cast<size_t>(s.dimension()));
            SymbolicLimitSet j = classify(s, zero, SetKind::J);
            std::string where = " for " + detail::spec_label(s);
            r.require(j == classify_Jmix_zero(s), "dedicated mixed classifier disagrees" + where);
            r.require(j == classify(s, zero, SetKind::Jmix), "mixed set kind disagrees" + where);
        }
    });
}

inline SelfTestCheck check_forced_dimension() {
    return detail::guarded_check("forced dimension on the size five unit block", [](detail::CheckRunner& r) {
        ExactVector x(5);
        ExactVector y3{GaussianRational(1), GaussianRational(1), GaussianRational(1),
                       GaussianRational(0), GaussianRational(0)};
        ExactVector y2{GaussianRational(1), GaussianRational(1), GaussianRational(0),
                       GaussianRational(0), GaussianRational(0)};
        for (long long k : {100LL, 1000LL}) {
            BlockTerm over = unit_pinned_term(ec(1), 5, x, y3, k, 3);
            r.require(over.exact, "pinned solve lost exactness at pin three");
            r.require(sup_norm_squared(over.xe) >= Rational(1, 100),
                      "pinning three coordinates failed to stall at k=" + std::to_string(k));
            BlockTerm std_term = unit_pinned_term(ec(1), 5, x, y2, k, 2);
            r.require(std_term.exact, "pinned solve lost exactness at pin two");
            r.require(sup_norm_squared(std_term.xe) < Rational(1, 100) / k,
                      "standard pin failed to converge at k=" + std::to_string(k));
        }
    });
}

inline SelfTestCheck check_palette_agreement() {
    return detail::guarded_check("classifier and oracle agree on the palette", [](detail::CheckRunner& r) {
        OracleConfig cfg;
        cfg.steps = 400;
        cfg.tol = 1e-3;
        unsigned long long seed = 5150;
        for (const auto& lam : detail::selftest_palette()) {
            for (long long l : {1LL, 2LL}) {
                JordanFormSpec s = detail::single(lam, l);
                std::vector<ExactVector> starts;
                starts.emplace_back(static_cast<size_t>(l));
                ExactVector e1(static_cast<size_t>(l));
                e1[0] = GaussianRational(1);
                starts.push_back(e1);
                if (l > 1) {
                    ExactVector el(static_cast<size_t>(l));
                    el[static_cast<size_t>(l - 1)] = GaussianRational(1);
                    starts.push_back(el);
                }
                for (const auto& x : starts) {
                    SymbolicLimitSet set = classify(s, x, SetKind::J);
                    std::string where = " for " + detail::spec_label(s);
                    ExactVector far(static_cast<size_t>(l));
                    far[0] = GaussianRational(Rational(3), Rational(2));
                    if (set.is_empty) {
                        OracleReport rep = pullback_scan(s, x, far, cfg);
                        r.require(rep.verdict == OracleVerdict::EvidenceNo,
                                  "empty set did not produce floor evidence" + where);
                        r.require(rep.floor.has_value(), "empty set evidence lacks a floor" + where);
                        continue;
                    }
                    for (const auto& y : sample_points(set, 2, seed++)) {
                        r.require(member_symbolic(set, y) == MemberResult::Yes,
                                  "sampled point is not a member" + where);
                        OracleReport rep = pullback_scan(s, x, y, cfg);
                        r.require(rep.verdict != OracleVerdict::EvidenceNo,
                                  "oracle contradicts a symbolic member" + where);
                    }
                    for (size_t j = 1; j < far.size(); ++j) far[j] = far[0];
                    if (member_symbolic(set, far) == MemberResult::No) {
                        OracleReport rep = pullback_scan(s, x, far, cfg);
                        r.require(rep.verdict != OracleVerdict::EvidenceYes,
                                  "oracle contradicts a symbolic non-member" + where);
                    }
                }
            }
        }

        struct Positive {
            JordanFormSpec s;
            ExactVector x, y;
        };
        ExactComplex i = ec_rat(Rational(0), Rational(1));
        std::vector<Positive> dips{
            {detail::single(i, 1), {GaussianRational(1)}, {GaussianRational(Rational(0), Rational(1))}},
            {detail::single(ec(-1), 1), {GaussianRational(1)}, {GaussianRational(-1)}},
            {detail::single(ec(2), 2), ExactVector(2), {GaussianRational(3), GaussianRational(Rational(1, 2))}},
            {detail::single(ec_rat(Rational(1, 2)), 1), {GaussianRational(5)}, ExactVector(1)}};
        for (const auto& c : dips) {
            OracleReport rep = pullback_scan(c.s, c.x, c.y, cfg);
            r.require(rep.verdict == OracleVerdict::EvidenceYes,
                      "expected a certified dip for " + detail::spec_label(c.s));
        }
    });
}

inline SelfTestCheck check_witness_verification() {
    return detail::guarded_check("witness terms verify at tolerance", [](detail::CheckRunner& r) {
        {
            JordanFormSpec s = detail::single(ec(2), 2);
            ExactVector x(2), y{GaussianRational(1), GaussianRational(Rational(1, 2))};
            Witness w = assemble_witness(s, x, y, 300);
            r.require(w.schedule.kind == ScheduleKind::FullSequence, "expanding schedule is not full");
            r.require(verify_witness(s, x, y, w, 300, 1e-6).pass, "expanding witness fails at 1e-6");
        }
        {
            JordanFormSpec s = detail::single(ec(1), 3);
            ExactVector x(3), y{GaussianRational(1), GaussianRational(0), GaussianRational(0)};
            Witness w = assemble_witness(s, x, y, 800);
            r.require(verify_witness(s, x, y, w, 800, 1e-2).pass, "unit witness fails at 1e-2");
        }
        {
            JordanFormSpec s = detail::single(ec_rat(Rational(1, 2)), 1);
            ExactVector x{GaussianRational(1)}, y(1);
            Witness w = assemble_witness(s, x, y, 100);
            r.require(verify_witness(s, x, y, w, 100, 1e-6).pass, "contracting witness fails at 1e-6");
        }
        {
            JordanFormSpec s = detail::single(ec_rat(Rational(0), Rational(1)), 1);
            bool threw = false;
            try {
                assemble_witness(s, {GaussianRational(1)}, {GaussianRational(2)}, 10);
            } catch (const NotInSet&) {
                threw = true;
            }
            r.require(threw, "witness construction accepted a non-member");
        }
    });
}

inline SelfTestReport run_selftest() {
    SelfTestReport report;
    report.checks.push_back(check_exact_roundtrips());
    report.checks.push_back(check_serialization_roundtrips());
    report.checks.push_back(check_scalar_invariance());
    report.checks.push_back(check_mixed_agreement_at_zero());
    report.checks.push_back(check_forced_dimension());
    report.checks.push_back(check_palette_agreement());
    report.checks.push_back(check_witness_verification());
    return report;
}

}  // namespace jlim
