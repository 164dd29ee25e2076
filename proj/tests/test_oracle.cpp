#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "jlim/oracle.hpp"

using namespace jlim;

namespace {

GaussianRational g(long long re, long long im = 0) { return GaussianRational(Rational(re), Rational(im)); }
GaussianRational gq(Rational re, Rational im = Rational(0)) { return GaussianRational(std::move(re), std::move(im)); }

ExactComplex lam_35() { return ec_rat(Rational(3, 5), Rational(4, 5)); }
ExactComplex lam_i() { return ec_rat(Rational(0), Rational(1)); }

JordanFormSpec blocks(std::initializer_list<std::pair<ExactComplex, long long>> bs) {
    JordanFormSpec s;
    for (const auto& [lam, l] : bs) s.blocks.push_back({lam, l});
    return s;
}

OracleConfig cfg(long long steps, double tol = 1e-3) {
    OracleConfig c;
    c.steps = steps;
    c.tol = tol;
    return c;
}

} // namespace

TEST_CASE("pullback scan certifies an exact periodic dip") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    OracleReport r = pullback_scan(s, {g(1)}, {g(-1)}, cfg(100, 1e-6));
    CHECK(r.verdict == OracleVerdict::EvidenceYes);
    CHECK(r.min_dist == 0);
    CHECK(r.min_k == 2);
    CHECK(r.tail_dist == 0);
    CHECK(r.tail_k > 50);
    CHECK(!r.floor);
}

TEST_CASE("pullback scan on the rotation eigenvalue reproduces the reference minimum") {
    JordanFormSpec s = blocks({{lam_35(), 1}});

    SECTION("target 1") {
        OracleReport r = pullback_scan(s, {g(1)}, {g(1)}, cfg(10000, 1e-2));
        CHECK(r.verdict == OracleVerdict::EvidenceYes);
        CHECK(r.min_k == 2690);
        CHECK(r.min_dist > Real("4.2e-4"));
        CHECK(r.min_dist < Real("4.4e-4"));
    }

    SECTION("target -1") {
        OracleReport r = pullback_scan(s, {g(1)}, {g(-1)}, cfg(10000, 1e-2));
        CHECK(r.verdict == OracleVerdict::EvidenceYes);
        CHECK(r.min_k == 1345);
        CHECK(r.min_dist > Real("2.1e-4"));
        CHECK(r.min_dist < Real("2.2e-4"));
        CHECK(r.tail_k > 5000);
        CHECK(r.tail_dist + r.tail_err < Real("1e-2"));
    }
}

TEST_CASE("structural floors force evidence-no") {
    SECTION("expanding block with nonzero start") {
        JordanFormSpec s = blocks({{ec(2), 1}});
        OracleReport r = pullback_scan(s, {g(1)}, {g(5)}, cfg(200));
        REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
        REQUIRE(r.floor);
        CHECK(r.floor->floor_squared == Rational(1, 4));
        CHECK(r.floor->reason.find("expanding") != std::string::npos);
        CHECK(r.floor->from_k >= 1);
    }

    SECTION("contracting block with nonzero target") {
        JordanFormSpec s = blocks({{ec_rat(Rational(1, 2)), 1}});
        OracleReport r = pullback_scan(s, {g(3)}, {g(1)}, cfg(200));
        REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
        REQUIRE(r.floor);
        CHECK(r.floor->floor_squared == Rational(1, 4));
        CHECK(r.floor->reason.find("contracting") != std::string::npos);
    }

    SECTION("unit block with a trailing target coordinate") {
        JordanFormSpec s = blocks({{lam_i(), 2}});
        OracleReport r = pullback_scan(s, {g(0), g(0)}, {g(0), g(1)}, cfg(200));
        REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
        REQUIRE(r.floor);
        CHECK(r.floor->reason.find("target coordinate 2") != std::string::npos);
        CHECK(r.floor->from_k == 1);
    }

    SECTION("unit block with a trailing start coordinate") {
        JordanFormSpec s = blocks({{ec(1), 2}});
        OracleReport r = pullback_scan(s, {g(0), g(3)}, {g(0), g(0)}, cfg(200));
        REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
        REQUIRE(r.floor);
        CHECK(r.floor->floor_squared == Rational(9, 4));
        CHECK(r.floor->reason.find("start coordinate 2") != std::string::npos);
        CHECK(r.floor->from_k == 1);
    }
}

TEST_CASE("a structural floor outranks an exact orbit hit") {
    JordanFormSpec s = blocks({{ec(2), 1}});
    OracleReport r = pullback_scan(s, {g(1)}, {g(8)}, cfg(60, 1e-2));
    CHECK(r.min_dist == 0);
    CHECK(r.min_k == 3);
    REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
    REQUIRE(r.floor);
    CHECK(r.floor->reason.find("expanding") != std::string::npos);
}

TEST_CASE("pullback scan stays inconclusive off the orbit closure") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    OracleReport r = pullback_scan(s, {g(1)}, {gq(Rational(3, 5), Rational(4, 5))}, cfg(400, 0.5));
    CHECK(r.verdict == OracleVerdict::Inconclusive);
    CHECK(!r.floor);
    CHECK(r.tail_lower > Real("0.6"));
}

TEST_CASE("precision escalates until the dip is certified") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    OracleConfig c = cfg(100, 1e-30);
    OracleReport r = pullback_scan(s, {g(1)}, {g(-1)}, c);
    CHECK(r.verdict == OracleVerdict::EvidenceYes);
    CHECK(r.precision_bits == 128);
}

TEST_CASE("precision escalation stops at the cap") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    OracleConfig c = cfg(100, 1e-307);
    OracleReport r = pullback_scan(s, {g(1)}, {g(-1)}, c);
    CHECK(r.verdict == OracleVerdict::Inconclusive);
    CHECK(r.precision_bits == 1024);
}

TEST_CASE("expanding pullbacks fall toward a zero start") {
    JordanFormSpec s = blocks({{ec(2), 2}});
    ExactVector x{g(0), g(0)};
    ExactVector y{gq(Rational(1, 3)), g(1, 1)};
    OracleReport r = pullback_scan(s, x, y, cfg(400, 1e-6));
    CHECK(r.verdict == OracleVerdict::EvidenceYes);
    CHECK(r.tail_dist < Real("1e-8"));
}

TEST_CASE("contracting blocks run forward and dip at a zero target") {
    JordanFormSpec s = blocks({{ec_rat(Rational(1, 2)), 2}});
    ExactVector x{g(2), g(-3, 1)};
    ExactVector y{g(0), g(0)};
    OracleReport r = pullback_scan(s, x, y, cfg(300, 1e-6));
    CHECK(r.verdict == OracleVerdict::EvidenceYes);
}

TEST_CASE("mixed spec aggregates the worst block distance") {
    JordanFormSpec s = blocks({{ec(2), 1}, {ec_rat(Rational(1, 2)), 1}});
    SECTION("both sides satisfied") {
        OracleReport r = pullback_scan(s, {g(0), g(5)}, {g(7), g(0)}, cfg(300, 1e-4));
        CHECK(r.verdict == OracleVerdict::EvidenceYes);
    }
    SECTION("one bad block blocks the verdict") {
        OracleReport r = pullback_scan(s, {g(0), g(5)}, {g(7), g(1)}, cfg(300, 1e-4));
        REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
        REQUIRE(r.floor);
        CHECK(r.floor->block == 1);
    }
}

TEST_CASE("unit pullback at matched moduli stays honest") {
    // membership holds symbolically, yet the pullback of y keeps norm |y1|,
    // so the scan must not claim evidence either way
    JordanFormSpec s = blocks({{lam_i(), 2}});
    ExactVector x{g(0), g(0)};
    ExactVector y{g(5), g(0)};
    OracleReport r = pullback_scan(s, x, y, cfg(300, 1e-3));
    CHECK(r.verdict == OracleVerdict::Inconclusive);
    CHECK(r.tail_lower > Real("4.9"));
}

TEST_CASE("nilpotent blocks scan forward without an inverse") {
    JordanFormSpec s = blocks({{ec(0), 2}});
    SECTION("zero target dips exactly") {
        OracleReport r = pullback_scan(s, {g(4), g(7)}, {g(0), g(0)}, cfg(50, 1e-9));
        CHECK(r.verdict == OracleVerdict::EvidenceYes);
        CHECK(r.min_dist == 0);
        CHECK(r.min_k == 2);
    }
    SECTION("nonzero target hits the structural floor") {
        OracleReport r = pullback_scan(s, {g(4), g(7)}, {g(1), g(0)}, cfg(50));
        REQUIRE(r.verdict == OracleVerdict::EvidenceNo);
        CHECK(r.floor->floor_squared == Rational(1, 4));
    }
}

TEST_CASE("similarity conjugation happens once, in exact arithmetic") {
    GaussianMatrix p(2);
    p.at(0, 0) = g(1);
    p.at(0, 1) = g(1);
    p.at(1, 0) = g(0);
    p.at(1, 1) = g(1);
    JordanFormSpec s = blocks({{ec_rat(Rational(1, 2)), 2}});
    s.similarity = SimilaritySpec::from_matrix(p);
    ExactVector x{g(3), g(-2)};
    ExactVector y{g(0), g(0)};
    OracleReport r = pullback_scan(s, x, y, cfg(300, 1e-6));
    CHECK(r.verdict == OracleVerdict::EvidenceYes);
}

TEST_CASE("oracle config is validated") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    OracleConfig c;
    c.precision_bits = 52;
    CHECK_THROWS_AS(pullback_scan(s, {g(1)}, {g(1)}, c), InvalidInput);
    c = OracleConfig{};
    c.steps = 0;
    CHECK_THROWS_AS(pullback_scan(s, {g(1)}, {g(1)}, c), InvalidInput);
    c = OracleConfig{};
    c.tol = 0;
    CHECK_THROWS_AS(pullback_scan(s, {g(1)}, {g(1)}, c), InvalidInput);
    CHECK_THROWS_AS(pullback_scan(s, {g(1), g(2)}, {g(1)}, OracleConfig{}), DimensionMismatch);
}

TEST_CASE("pullback csv is deterministic and carries the report header") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    std::ostringstream a, b;
    pullback_scan(s, {g(1)}, {g(-1)}, cfg(40, 1e-6), &a);
    pullback_scan(s, {g(1)}, {g(-1)}, cfg(40, 1e-6), &b);
    CHECK(a.str() == b.str());
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# {\"verdict\":\"evidence_yes\"", 0) == 0);
    std::getline(in, line);
    CHECK(line == "k,dist,err");
    long long rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 40);
}

TEST_CASE("forward orbit classifies the three regimes") {
    SECTION("rotation is bounded with four clusters") {
        ForwardReport r = forward_orbit(blocks({{lam_i(), 1}}), {g(1)}, cfg(1000));
        CHECK(r.kind == OrbitKind::Bounded);
        CHECK(r.cluster_count == 4);
        CHECK(!r.cluster_capped);
        CHECK(r.max_norm < Real("1.000001"));
    }
    SECTION("contraction converges to zero") {
        ForwardReport r = forward_orbit(blocks({{ec_rat(Rational(1, 2)), 1}}), {g(1)}, cfg(100));
        CHECK(r.kind == OrbitKind::ConvergesToZero);
        CHECK(r.cluster_count == 1);
    }
    SECTION("expansion diverges") {
        ForwardReport r = forward_orbit(blocks({{ec(2), 1}}), {g(1)}, cfg(100));
        CHECK(r.kind == OrbitKind::DivergesToInfinity);
        CHECK(r.cluster_count == 0);
    }
    SECTION("nilpotent orbit reaches zero exactly") {
        ForwardReport r = forward_orbit(blocks({{ec(0), 3}}), {g(1), g(2), g(3)}, cfg(20));
        CHECK(r.kind == OrbitKind::ConvergesToZero);
        CHECK(r.final_norm == 0);
        CHECK(r.cluster_count == 1);
    }
    SECTION("dense rotation fills the circle with many clusters") {
        ForwardReport r = forward_orbit(blocks({{lam_35(), 1}}), {g(1)}, cfg(2000));
        CHECK(r.kind == OrbitKind::Bounded);
        CHECK(r.cluster_count > 50);
    }
    SECTION("expanding coordinate at zero leaves the orbit bounded") {
        ForwardReport r = forward_orbit(blocks({{ec(2), 1}, {lam_i(), 1}}), {g(0), g(1)}, cfg(400));
        CHECK(r.kind == OrbitKind::Bounded);
        CHECK(r.cluster_count == 4);
    }
}

TEST_CASE("forward csv lists one row per step") {
    std::ostringstream os;
    forward_orbit(blocks({{lam_i(), 1}}), {g(1)}, cfg(25), &os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "k,norm,err");
    long long rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 25);
}

TEST_CASE("power closure coverage: finite orders are exact") {
    DsetReport r = dset_coverage(lam_i(), cfg(1000));
    CHECK(r.finite);
    CHECK(r.order == 4);
    CHECK(!r.full_circle);

    DsetReport r2 = dset_coverage(ec_polar(Rational(1), 1, 360), cfg(1000));
    CHECK(r2.finite);
    CHECK(r2.order == 360);
    CHECK(r2.max_gap == Catch::Approx(6.283185307179586 / 360));

    DsetReport r3 = dset_coverage(ec(-1), cfg(10));
    CHECK(r3.order == 2);
}

TEST_CASE("power closure coverage: dense rotation fills the circle") {
    SECTION("reference gap at 100000 samples") {
        DsetReport r = dset_coverage(lam_35(), cfg(100000));
        CHECK(!r.finite);
        CHECK(r.max_gap > 1.0e-4);
        CHECK(r.max_gap < 1.4e-4);
        CHECK(r.full_circle);
        CHECK(r.discrepancy > 0);
        CHECK(r.discrepancy < 0.01);
    }
    SECTION("reference gap at 10000 samples") {
        DsetReport r = dset_coverage(lam_35(), cfg(10000));
        CHECK(r.max_gap > 1.3e-3);
        CHECK(r.max_gap < 1.5e-3);
        CHECK(r.full_circle);
    }
}

TEST_CASE("coverage scan rejects eigenvalues off the unit circle") {
    CHECK_THROWS_AS(dset_coverage(ec(2), cfg(100)), NotUnitModulus);
    CHECK_THROWS_AS(dset_coverage(ec(0), cfg(100)), NotUnitModulus);
}

TEST_CASE("ball transitivity on the period-four rotation") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    BallReport r = ball_transitivity_check(s, {g(1)}, {g(-1)}, 0.1, 0.1, cfg(200));
    CHECK(r.qualifying_count == 50);
    CHECK(r.first_k == 2);
    CHECK(r.longest_run == 1);
    CHECK(r.n0 == 0);
    REQUIRE(r.sample_ks.size() == 32);
    for (size_t i = 0; i < r.sample_ks.size(); ++i)
        CHECK(r.sample_ks[i] == 2 + 4 * static_cast<long long>(i));
}

TEST_CASE("ball transitivity reaches a qualifying suffix on an expanding block") {
    JordanFormSpec s = blocks({{ec(2), 1}});
    BallReport r = ball_transitivity_check(s, {g(0)}, {g(1)}, 0.1, 0.1, cfg(100));
    CHECK(r.n0 == 4);
    CHECK(r.qualifying_count == 97);
    CHECK(r.longest_run == 97);
    CHECK(r.first_k == 4);
}

TEST_CASE("ball transitivity needs the solve candidate on a unit block") {
    // the pullback of y keeps norm 5 forever, so only the pinned solve can
    // qualify; its distance is 5/k, and the double radius 0.1 sits just above
    // the exact boundary 1/10, so the suffix starts at k = 50
    JordanFormSpec s = blocks({{lam_i(), 2}});
    ExactVector x{g(0), g(0)};
    ExactVector y{g(5), g(0)};
    BallReport r = ball_transitivity_check(s, x, y, 0.1, 0.1, cfg(100));
    CHECK(r.n0 == 50);
    CHECK(r.qualifying_count == 51);
    CHECK(r.longest_run == 51);
}

TEST_CASE("ball transitivity requires an invertible spec") {
    JordanFormSpec s = blocks({{ec(0), 2}, {lam_i(), 1}});
    ExactVector x{g(0), g(0), g(1)};
    ExactVector y{g(0), g(0), g(-1)};
    CHECK_THROWS_AS(ball_transitivity_check(s, x, y, 0.1, 0.1, cfg(100)), NilpotentEigenvalue);
}

TEST_CASE("the scan's dip is backed by an exact point") {
    JordanFormSpec s = blocks({{lam_i(), 1}, {ec_rat(Rational(1, 2)), 1}});
    ExactVector x{g(1), g(7)};
    ExactVector y{g(-1), g(0)};
    OracleReport r = pullback_scan(s, x, y, cfg(200, 1e-2));
    REQUIRE(r.verdict == OracleVerdict::EvidenceYes);
    ExactVector pt = oracle_witness_point(s, x, y, r.tail_k);
    CHECK(pt[0] == g(-1) * to_gaussian(pow(lam_i(), -r.tail_k)).value());
    CHECK(pt[1] == g(7));
    ExactVector fwd = apply_power(s, r.tail_k, pt);
    CHECK(fwd[0] == y[0]);
}

TEST_CASE("ball radii are validated") {
    JordanFormSpec s = blocks({{lam_i(), 1}});
    CHECK_THROWS_AS(ball_transitivity_check(s, {g(1)}, {g(1)}, 0.0, 0.1, cfg(10)), InvalidInput);
    CHECK_THROWS_AS(ball_transitivity_check(s, {g(1)}, {g(1)}, 0.1, -1.0, cfg(10)), InvalidInput);
}

TEST_CASE("oracle reports serialize with deterministic fields") {
    JordanFormSpec s = blocks({{ec(2), 1}});
    OracleReport r = pullback_scan(s, {g(1)}, {g(5)}, cfg(50));
    json j = oracle_report_to_json(r);
    CHECK(j["verdict"] == "evidence_no");
    CHECK(j["floor"]["block"] == 0);
    CHECK(j["floor"]["value"].get<std::string>().substr(0, 3) == "5.0");

    ForwardReport f = forward_orbit(blocks({{lam_i(), 1}}), {g(1)}, cfg(40));
    json jf = forward_report_to_json(f);
    CHECK(jf["kind"] == "bounded");
    CHECK(jf["cluster_count"] == 4);

    DsetReport d = dset_coverage(lam_i(), cfg(10));
    CHECK(dset_report_to_json(d)["order"] == 4);

    BallReport b = ball_transitivity_check(s, {g(0)}, {g(1)}, 0.5, 0.5, cfg(20));
    json jb = ball_report_to_json(b);
    CHECK(jb["n0"] == 2);
}

TEST_CASE("oracle never contradicts the symbolic classifier") {
    std::mt19937_64 rng(20240817);
    std::vector<ExactComplex> palette{ec(1), ec(-1), lam_i(), ec(2), ec_rat(Rational(1, 2)), lam_35()};
    auto rnd_rat = [&](long long lo, long long hi) {
        std::uniform_int_distribution<long long> num(lo, hi);
        std::uniform_int_distribution<long long> den(1, 3);
        return Rational(num(rng), den(rng));
    };
    long long checked_yes = 0, checked_no = 0;
    for (int trial = 0; trial < 40; ++trial) {
        JordanFormSpec s;
        std::uniform_int_distribution<int> nb(1, 2), bl(1, 3), pi(0, 5);
        int nblocks = nb(rng);
        for (int i = 0; i < nblocks; ++i) s.blocks.push_back({palette[static_cast<size_t>(pi(rng))], bl(rng)});
        long long dim = s.dimension();

        ExactVector x;
        for (long long i = 0; i < dim; ++i) x.push_back(gq(rnd_rat(-2, 2), rnd_rat(-2, 2)));
        SymbolicLimitSet cls = classify(s, x, SetKind::J);
        auto pts = sample_points(cls, 3, 1000 + static_cast<unsigned long long>(trial));
        for (const auto& y : pts) {
            MemberResult m = member_symbolic(cls, y);
            OracleReport r = pullback_scan(s, x, y, cfg(400, 1e-3));
            if (m == MemberResult::Yes) {
                CHECK(r.verdict != OracleVerdict::EvidenceNo);
                ++checked_yes;
            }
        }
        ExactVector bad;
        for (long long i = 0; i < dim; ++i) bad.push_back(g(3, 2));
        if (member_symbolic(cls, bad) == MemberResult::No) {
            OracleReport r = pullback_scan(s, x, bad, cfg(400, 1e-3));
            CHECK(r.verdict != OracleVerdict::EvidenceYes);
            ++checked_no;
        }
    }
    CHECK(checked_yes > 20);
    CHECK(checked_no > 10);
}
