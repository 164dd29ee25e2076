#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jlim/binomial.hpp"
#include "jlim/exact_complex.hpp"
#include "jlim/floatc.hpp"

using namespace jlim;

TEST_CASE("rational parse and format") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-3/4") == Rational(-3, 4));
    CHECK(parse_rational("7") == Rational(7));
    CHECK(parse_rational("-0") == Rational(0));
    CHECK(format_rational(Rational(3, 4)) == "3/4");
    CHECK(format_rational(Rational(-3, 4)) == "-3/4");
    CHECK(format_rational(Rational(7)) == "7");
    CHECK_THROWS_AS(parse_rational(""), InvalidInput);
    CHECK_THROWS_AS(parse_rational("1/0"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("a/b"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("1.5"), InvalidInput);
    CHECK_THROWS_AS(parse_rational("1/"), InvalidInput);
}

TEST_CASE("rational normalization invariant") {
    CHECK(make_rational(Int(2), Int(4)) == Rational(1, 2));
    CHECK(make_rational(Int(3), Int(-6)) == Rational(-1, 2));
    CHECK(rat_den(make_rational(Int(3), Int(-6))) > 0);

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> d(-40, 40);
    Rational acc(1, 3);
    for (int i = 0; i < 300; ++i) {
        long long n = d(rng), den = d(rng);
        if (den == 0) den = 5;
        Rational r(n, den);
        acc = (i % 2 == 0) ? Rational(acc + r) : Rational(acc * r);
        CHECK(rat_den(acc) > 0);
        CHECK(gcd(abs(rat_num(acc)), rat_den(acc)) == 1);
    }
}

TEST_CASE("gaussian arithmetic") {
    GaussianRational lam(Rational(3, 5), Rational(4, 5));
    GaussianRational sq = lam * lam;
    CHECK(sq == GaussianRational(Rational(-7, 25), Rational(24, 25)));
    CHECK(norm2(lam) == Rational(1));
    CHECK(lam * inverse(lam) == GaussianRational(1));
    CHECK(conj(lam) * lam == GaussianRational(Rational(1), Rational(0)));
    CHECK(pow(GaussianRational(Rational(0), Rational(1)), 2) == GaussianRational(-1));
    CHECK_THROWS_AS(pow(GaussianRational(0), -1), ZeroToNegativePower);
    CHECK_THROWS_AS(inverse(GaussianRational(0)), Error);
}

TEST_CASE("polar arithmetic") {
    PolarExact sixth(Rational(1), 1, 6);
    CHECK(pow(sixth, 3) == PolarExact(Rational(1), 1, 2));
    CHECK(pow(sixth, 6) == PolarExact(Rational(1), 0, 1));
    CHECK(PolarExact(Rational(1), 2, 6) == PolarExact(Rational(1), 1, 3));
    CHECK(PolarExact(Rational(1), -1, 4) == PolarExact(Rational(1), 3, 4));
    CHECK(mul(sixth, sixth) == PolarExact(Rational(1), 1, 3));
    CHECK(mul(PolarExact(Rational(2), 1, 3), PolarExact(Rational(3), 1, 4)) ==
          PolarExact(Rational(6), 7, 12));
    CHECK(inverse(PolarExact(Rational(2), 1, 3)) == PolarExact(Rational(1, 2), 2, 3));
    CHECK_THROWS_AS(PolarExact(Rational(1), 1, 0), InvalidInput);
    CHECK_THROWS_AS(PolarExact(Rational(-1), 1, 2), InvalidInput);
}

TEST_CASE("polar to gaussian and back") {
    CHECK(*polar_to_gaussian(PolarExact(Rational(3, 2), 0, 1)) == GaussianRational(Rational(3, 2), Rational(0)));
    CHECK(*polar_to_gaussian(PolarExact(Rational(2), 1, 2)) == GaussianRational(-2));
    CHECK(*polar_to_gaussian(PolarExact(Rational(1), 1, 4)) == GaussianRational(Rational(0), Rational(1)));
    CHECK(*polar_to_gaussian(PolarExact(Rational(1), 3, 4)) == GaussianRational(Rational(0), Rational(-1)));
    CHECK(!polar_to_gaussian(PolarExact(Rational(1), 1, 3)).has_value());
    CHECK(*gaussian_to_polar(GaussianRational(Rational(0), Rational(-5))) == PolarExact(Rational(5), 3, 4));
    CHECK(!gaussian_to_polar(GaussianRational(Rational(1), Rational(1))).has_value());
}

TEST_CASE("modulus trichotomy") {
    CHECK(modulus_class(ec_rat(Rational(3, 5), Rational(4, 5))) == ModulusClass::EqualOne);
    CHECK(modulus_class(ec_rat(Rational(1, 2))) == ModulusClass::LessThanOne);
    CHECK(modulus_class(ec(2)) == ModulusClass::GreaterThanOne);
    CHECK(modulus_class(ec_polar(Rational(1), 1, 6)) == ModulusClass::EqualOne);
    CHECK(modulus_class(ec_polar(Rational(1, 2), 1, 3)) == ModulusClass::LessThanOne);
    CHECK(modulus_class(ec(0)) == ModulusClass::LessThanOne);

    // class preserved under positive powers
    std::vector<ExactComplex> pal = {ec_rat(Rational(1, 2)), ec(2), ec(1), ec(-1),
                                     ec_rat(Rational(0), Rational(1)),
                                     ec_rat(Rational(3, 5), Rational(4, 5)),
                                     ec_polar(Rational(7, 5), 1, 3)};
    for (const auto& lam : pal)
        for (long long k = 1; k <= 9; ++k)
            CHECK(modulus_class(pow(lam, k)) == modulus_class(lam));
}

TEST_CASE("power addition law") {
    std::vector<ExactComplex> pal = {ec_rat(Rational(1, 2)), ec(2), ec(-1),
                                     ec_rat(Rational(0), Rational(1)),
                                     ec_rat(Rational(3, 5), Rational(4, 5)),
                                     ec_polar(Rational(3, 7), 2, 5)};
    for (const auto& lam : pal)
        for (long long a = -8; a <= 8; ++a)
            for (long long b = -8; b <= 8; ++b)
                CHECK(complex_equal(mul(pow(lam, a), pow(lam, b)), pow(lam, a + b)));
    CHECK_THROWS_AS(pow(ec(0), -2), ZeroToNegativePower);
}

TEST_CASE("root of unity order") {
    CHECK(root_of_unity_order(ec_rat(Rational(0), Rational(1))) == 4);
    CHECK(root_of_unity_order(ec_rat(Rational(0), Rational(-1))) == 4);
    CHECK(root_of_unity_order(ec(-1)) == 2);
    CHECK(root_of_unity_order(ec(1)) == 1);
    CHECK(root_of_unity_order(ec_polar(Rational(1), 2, 6)) == 3);
    CHECK(root_of_unity_order(ec_polar(Rational(1), 0, 1)) == 1);
    CHECK(!root_of_unity_order(ec_rat(Rational(3, 5), Rational(4, 5))).has_value());
    CHECK(!root_of_unity_order(ec_rat(Rational(5, 13), Rational(12, 13))).has_value());
    CHECK_THROWS_AS(root_of_unity_order(ec(2)), NotUnitModulus);

    // minimality: lambda^d = 1 and no earlier power hits 1
    std::vector<ExactComplex> rous = {ec(1), ec(-1), ec_rat(Rational(0), Rational(1)),
                                      ec_polar(Rational(1), 1, 3), ec_polar(Rational(1), 5, 12),
                                      ec_polar(Rational(1), 3, 7)};
    for (const auto& lam : rous) {
        long long d = *root_of_unity_order(lam);
        CHECK(complex_equal(pow(lam, d), ec(1)));
        for (long long j = 1; j < d; ++j) CHECK(!complex_equal(pow(lam, j), ec(1)));
    }
}

TEST_CASE("unit circle orbit never returns near 1 for (3+4i)/5") {
    // frozen scan: min |lambda^k - 1| over 1 <= k <= 10^4 is 4.3053e-4 at k = 2690
    double theta = std::atan2(4.0, 3.0);
    double tau = 2 * std::acos(-1.0);
    double angle = 0, best = 1e9;
    long long argmin = 0;
    for (long long k = 1; k <= 10000; ++k) {
        angle += theta;
        if (angle > tau) angle -= tau;
        double d = 2 * std::abs(std::sin(angle / 2));
        if (d < best) { best = d; argmin = k; }
    }
    CHECK(argmin == 2690);
    CHECK(best > 4.30e-4);
    CHECK(best < 4.31e-4);
    CHECK(best > 1e-4);
}

TEST_CASE("binomial") {
    CHECK(binomial(10, 2) == 45);
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(17, 0) == 1);
    CHECK(binomial(4, 7) == 0);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial_signed(-1, 3) == -1);
    CHECK(binomial_signed(-2, 2) == 3);
    CHECK(binomial_signed(-3, 2) == 6);
    CHECK(binomial_signed(5, 2) == 10);
    // Pascal identity on a grid
    for (long long k = 1; k <= 25; ++k)
        for (long long j = 1; j <= 10; ++j)
            CHECK(binomial(k, j) == binomial(k - 1, j - 1) + binomial(k - 1, j));
}

TEST_CASE("to_float bounds") {
    CF third = to_float(ec_rat(Rational(1, 3)), 64);
    Real expected = Real(1) / 3;
    CHECK(boost::multiprecision::abs(third.re - expected) <= third.err);
    CHECK(third.err <= boost::multiprecision::ldexp(Real(1), -60));

    CF zero = to_float(ec(0), 64);
    CHECK(zero.re == 0);
    CHECK(zero.im == 0);
    CHECK(zero.err == 0);

    // polar(1, 1/8) against high precision sqrt(2)/2
    CF eighth = to_float(ec_polar(Rational(1), 1, 8), 128);
    {
        PrecisionGuard hi(320);
        Real half_sqrt2 = boost::multiprecision::sqrt(Real(2)) / 2;
        CHECK(boost::multiprecision::abs(Real(eighth.re) - half_sqrt2) <= eighth.err);
        CHECK(boost::multiprecision::abs(Real(eighth.im) - half_sqrt2) <= eighth.err);
        CHECK(eighth.err <= boost::multiprecision::ldexp(Real(1), -120));
    }
}

TEST_CASE("float error tracking is conservative") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> d(-50, 50);
    for (int trial = 0; trial < 120; ++trial) {
        Rational ar(d(rng), 7), ai(d(rng), 9), br(d(rng), 5), bi(d(rng), 11);
        GaussianRational a(ar, ai), b(br, bi);
        GaussianRational sum = a + b, prod = a * b;
        PrecisionGuard guard(64);
        CF fa = cf_from_gaussian(a), fb = cf_from_gaussian(b);
        CF fsum = cf_add(fa, fb), fprod = cf_mul(fa, fb);
        PrecisionGuard hi(256);
        CF esum = cf_from_gaussian(sum), eprod = cf_from_gaussian(prod);
        CHECK(dist_cf(fsum, esum) <= fsum.err + esum.err);
        CHECK(dist_cf(fprod, eprod) <= fprod.err + eprod.err);
    }
}

TEST_CASE("cf_pow matches exact powers") {
    GaussianRational lam(Rational(3, 5), Rational(4, 5));
    PrecisionGuard guard(128);
    CF f = cf_from_gaussian(lam);
    CF p = cf_pow(f, 1000);
    GaussianRational exact = pow(lam, 1000);
    CF e = cf_from_gaussian(exact);
    CHECK(dist_cf(p, e) <= p.err + e.err);
    CHECK(p.err < boost::multiprecision::ldexp(Real(1), -90));

    CF pn = cf_pow(f, -57);
    CF en = cf_from_gaussian(pow(lam, -57));
    CHECK(dist_cf(pn, en) <= pn.err + en.err);
}

TEST_CASE("mixed products that stay representable") {
    CHECK(complex_equal(mul(ec_polar(Rational(2), 1, 2), ec_rat(Rational(1), Rational(1))),
                        ec_rat(Rational(-2), Rational(-2))));
    CHECK(complex_equal(mul(ec_rat(Rational(0), Rational(3)), ec_polar(Rational(1), 1, 3)),
                        ec_polar(Rational(3), 7, 12)));
    CHECK_THROWS_AS(mul(ec_rat(Rational(3, 5), Rational(4, 5)), ec_polar(Rational(1), 1, 3)),
                    NotRepresentable);
}

TEST_CASE("complex serialization round trip") {
    std::vector<ExactComplex> vals = {ec_rat(Rational(3, 5), Rational(-4, 5)), ec(0), ec(-7),
                                      ec_polar(Rational(1), 1, 6), ec_polar(Rational(7, 2), 3, 4)};
    for (const auto& v : vals) {
        json j = complex_to_json(v);
        CHECK(complex_equal(complex_from_json(j), v));
    }
    CHECK(complex_equal(complex_from_json(json::parse("\"3/4\"")), ec_rat(Rational(3, 4))));
    CHECK(complex_equal(complex_from_json(json::parse("{\"re\":\"1/2\",\"im\":\"-1/3\"}")),
                        ec_rat(Rational(1, 2), Rational(-1, 3))));
    CHECK(complex_equal(complex_from_json(json::parse("{\"modulus\":\"1\",\"p\":2,\"q\":6}")),
                        ec_polar(Rational(1), 1, 3)));
    CHECK_THROWS_AS(complex_from_json(json::parse("{\"modulus\":\"1\",\"p\":\"x\",\"q\":6}")), InvalidInput);
    CHECK_THROWS_AS(complex_from_json(json::parse("1.5")), InvalidInput);
    CHECK_THROWS_AS(complex_from_json(json::parse("{\"foo\":1}")), InvalidInput);
}
