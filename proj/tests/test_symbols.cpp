#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rieszlab/errors.hpp"
#include "rieszlab/scheme.hpp"
#include "rieszlab/symbols.hpp"

#include <cmath>
#include <vector>

using namespace rieszlab;

TEST_CASE("catalog lookup and basic values") {
    CHECK(symbol_catalog().size() == 5);
    const MultiplierSymbol* g = find_symbol("gaussian");
    REQUIRE(g != nullptr);
    CHECK(g->eval(0.0, 0.0).real() == doctest::Approx(1.0));
    CHECK(g->eval(1.0, 1.0).real() == doctest::Approx(std::exp(-2.0)));

    const MultiplierSymbol* r1 = find_symbol("riesz1");
    REQUIRE(r1 != nullptr);
    CHECK(r1->eval(3.0, 4.0).real() == doctest::Approx(0.6));
    CHECK(r1->singular_at(0.0, 0.0));

    const MultiplierSymbol* rp = find_symbol("riesz_prod");
    REQUIRE(rp != nullptr);
    CHECK(rp->eval(1.0, 1.0).real() == doctest::Approx(0.5));

    const MultiplierSymbol* dc = find_symbol("dyadic_cos");
    REQUIRE(dc != nullptr);
    CHECK(dc->eval(0.25, 123.0).real() == doctest::Approx(1.0));   // even scale
    CHECK(dc->eval(0.125, -5.0).real() == doctest::Approx(-1.0));  // odd scale
    CHECK(dc->singular_at(0.0, 1.0));

    const MultiplierSymbol* ds = find_symbol("dyadic_step");
    REQUIRE(ds != nullptr);
    CHECK(ds->eval(0.25, 0.0).real() == doctest::Approx(1.0));
    CHECK(ds->eval(-0.25, 0.0).real() == doctest::Approx(0.0));

    CHECK(find_symbol("no_such_symbol") == nullptr);
}

TEST_CASE("expression symbols: grammar, evaluation, errors") {
    MultiplierSymbol m = parse_symbol_expression("x1/(x1*x1 + x2*x2)*x2");
    CHECK(m.eval(1.0, 1.0).real() == doctest::Approx(0.5));

    CHECK(parse_symbol_expression("|x1 - 2|").eval(0.5, 0.0).real() == doctest::Approx(1.5));
    CHECK(parse_symbol_expression("cos(pi)").eval(1.0, 1.0).real() == doctest::Approx(-1.0));
    CHECK(parse_symbol_expression("exp(log(3))").eval(1.0, 1.0).real() == doctest::Approx(3.0));
    CHECK(parse_symbol_expression("log2(8)").eval(1.0, 1.0).real() == doctest::Approx(3.0));
    CHECK(parse_symbol_expression("sqrt(x1*x1+x2*x2)").eval(3.0, 4.0).real() ==
          doctest::Approx(5.0));
    CHECK(parse_symbol_expression("sign(x2)").eval(1.0, -0.5).real() == doctest::Approx(-1.0));
    CHECK(parse_symbol_expression("-2e-1+1").eval(0.0, 0.0).real() == doctest::Approx(0.8));

    CHECK_THROWS_AS(parse_symbol_expression("x3"), ConfigError);
    CHECK_THROWS_AS(parse_symbol_expression("cos(x1"), ConfigError);
    CHECK_THROWS_AS(parse_symbol_expression("1 +"), ConfigError);
    CHECK_THROWS_AS(parse_symbol_expression("foo(x1)"), ConfigError);
    CHECK_THROWS_AS(parse_symbol_expression("1 2"), ConfigError);

    // resolve_symbol accepts both catalog ids and expr: definitions
    CHECK(resolve_symbol("gaussian").id == "gaussian");
    CHECK(resolve_symbol("expr:1+1").eval(0.0, 0.0).real() == doctest::Approx(2.0));
    CHECK_THROWS_AS(resolve_symbol("unknown-id"), ConfigError);
}

TEST_CASE("classifier: continuous symbol gives the star condition with constant limits") {
    RadialClassification c = classify_radial(*find_symbol("gaussian"));
    CHECK(c.verdict == RadialCase::StarCondition);
    CHECK(c.omega_constant);
    REQUIRE_FALSE(c.directions.empty());
    for (const auto& d : c.directions) {
        if (!d.usable) continue;
        CHECK(d.limit_pos == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d.limit_neg == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("classifier: homogeneous symbol flagged as nonconstant radial profile") {
    RadialClassification c = classify_radial(*find_symbol("riesz1"));
    CHECK(c.verdict == RadialCase::StarCondition);
    CHECK_FALSE(c.omega_constant);
    // Omega(v) = v1 along the first direction (1,0)
    REQUIRE(c.directions.size() >= 1);
    CHECK(c.directions[0].limit_pos == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.directions[0].limit_neg == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("classifier: symmetric dyadic oscillation is case IIa with a=1, b=-1 along (1,0)") {
    RadialClassification c = classify_radial(*find_symbol("dyadic_cos"));
    CHECK(c.verdict == RadialCase::IIa);
    CHECK(c.direction[0] == doctest::Approx(1.0));
    CHECK(c.direction[1] == doctest::Approx(0.0));
    CHECK(c.parity == 0);
    CHECK(c.a == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.b == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("classifier: asymmetric dyadic step is case IIb with a=1, b=0") {
    RadialClassification c = classify_radial(*find_symbol("dyadic_step"));
    CHECK(c.verdict == RadialCase::IIb);
    CHECK(c.a == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c.b == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("classifier: homogeneous radial profile is scale invariant (depth j vs j+4)") {
    RadialClassification c1 = classify_radial(*find_symbol("riesz_prod"), 16, 40);
    RadialClassification c2 = classify_radial(*find_symbol("riesz_prod"), 16, 44);
    REQUIRE(c1.verdict == RadialCase::StarCondition);
    REQUIRE(c2.verdict == RadialCase::StarCondition);
    REQUIRE(c1.directions.size() == c2.directions.size());
    for (size_t i = 0; i < c1.directions.size(); ++i) {
        if (!c1.directions[i].usable || !c2.directions[i].usable) continue;
        CHECK(c1.directions[i].limit_pos ==
              doctest::Approx(c2.directions[i].limit_pos).epsilon(1e-3));
        CHECK(c1.directions[i].limit_neg ==
              doctest::Approx(c2.directions[i].limit_neg).epsilon(1e-3));
    }
}

TEST_CASE("classifier: bounded oscillation with no dyadic-period pattern is inconclusive") {
    // log2|xi1| scaled by an irrational multiple of pi: never settles on any
    // dyadic parity pattern.
    MultiplierSymbol odd = parse_symbol_expression("cos(2*log2(abs(x1)))");
    odd.is_singular = [](double x1, double) { return x1 == 0.0; };
    RadialClassification c = classify_radial(odd);
    CHECK(c.verdict == RadialCase::Inconclusive);
}

TEST_CASE("probe: lambda = 0 row recovers |m| exactly and rows decrease monotonically") {
    const std::vector<double> lambdas{0.0, 1e-3, 1e-2, 1e-1, 1.0};
    for (const auto& sym : symbol_catalog()) {
        // pick a point where each symbol is well defined
        const std::array<double, 2> xi0{0.75, 0.5};
        auto rows = sup_norm_probe(sym, xi0, TestProfile{}, lambdas);
        REQUIRE(rows.size() == lambdas.size());
        const double m0 = std::abs(sym.eval(xi0[0], xi0[1]));
        CHECK(rows[0].ratio == m0);  // exact by construction
        for (size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].ratio <= rows[i - 1].ratio + 1e-15);
            CHECK(rows[i].ratio <= m0 + 1e-15);
        }
    }
}

TEST_CASE("probe: constant symbols approach their sup norm from below") {
    MultiplierSymbol one = parse_symbol_expression("1");
    auto rows = sup_norm_probe(one, {2.0, 3.0}, TestProfile{}, {1.0, 0.1, 0.01, 1e-4});
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ratio > rows[i - 1].ratio);
    CHECK(rows.back().ratio == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rows.back().ratio < 1.0);

    MultiplierSymbol minus = parse_symbol_expression("0-1");
    auto rows2 = sup_norm_probe(minus, {1.0, 0.0}, TestProfile{}, {0.1, 1e-3, 0.0});
    CHECK(rows2.back().ratio == doctest::Approx(1.0));  // |m| = 1 despite m = -1
}

TEST_CASE("lattice sampling: direct values and window") {
    std::vector<Frequency> window;
    for (long long a = -2; a <= 2; ++a)
        for (long long b = -2; b <= 2; ++b) window.push_back(freq(a, b));
    auto samples = deleeuw_sample(*find_symbol("gaussian"), 1.0, window);
    CHECK(samples.size() == 25);
    for (const auto& [n, v] : samples) {
        const double n2 = to_double(BigInt(n.k1 * n.k1 + n.k2 * n.k2));
        CHECK(v.real() == doctest::Approx(std::exp(-n2)).epsilon(1e-12));
        CHECK(v.imag() == 0.0);
    }

    MultiplierSymbol one = parse_symbol_expression("1");
    auto ones = deleeuw_sample(one, 0.37, window);
    for (const auto& [n, v] : ones) CHECK(v.real() == doctest::Approx(1.0));
}

TEST_CASE("lattice sampling: declared singular locus raises") {
    std::vector<Frequency> window{freq(0, 1)};
    CHECK_THROWS_AS(deleeuw_sample(*find_symbol("dyadic_cos"), 0.5, window),
                    SampleOnSingularity);
    std::vector<Frequency> origin{freq(0, 0)};
    CHECK_THROWS_AS(deleeuw_sample(*find_symbol("riesz1"), 1.0, origin), SampleOnSingularity);
}

TEST_CASE("lattice sampling commutes with rescaling the symbol") {
    // m(xi/2) for the Gaussian equals exp(-|xi|^2/4); sampling it at scale 1
    // must agree with sampling the Gaussian itself at scale 1/2.
    MultiplierSymbol half = parse_symbol_expression("exp(0-(x1*x1+x2*x2)/4)");
    std::vector<Frequency> window;
    for (long long a = -3; a <= 3; ++a) window.push_back(freq(a, 2 * a + 1));
    auto lhs = deleeuw_sample(half, 1.0, window);
    auto rhs = deleeuw_sample(*find_symbol("gaussian"), 0.5, window);
    for (const auto& [n, v] : lhs)
        CHECK(v.real() == doctest::Approx(rhs.at(n).real()).epsilon(1e-12));
}

TEST_CASE("scheme centers sample within epsilon of the level target") {
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    LacunaryScheme sch = construct_scheme(*sym, OscCase::IIa, 3);
    for (int k = 1; k <= sch.s; ++k) {
        const double want = (k % 2 == 0) ? 1.0 : -1.0;
        const auto got = symbol_at(*sym, sch.centers[k - 1]);
        CHECK(std::abs(got.real() - want) < sch.epsilon);
    }
}
