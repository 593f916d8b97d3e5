#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rieszlab/errors.hpp"
#include "rieszlab/numeric.hpp"
#include "rieszlab/plane.hpp"
#include "rieszlab/quadrature.hpp"
#include "rieszlab/scheme.hpp"
#include "rieszlab/symbols.hpp"
#include "rieszlab/torus_metrics.hpp"
#include "rieszlab/trig_poly.hpp"
#include "rieszlab/witness.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

using namespace rieszlab;

namespace {

// Collinear slope-1/2 ladder (2,1), (8,4), (32,16), ... with hand radii.
IntegerScheme hand_scheme(int s, std::vector<BigRat> radii,
                          OscCase osc_case = OscCase::IIa) {
    IntegerScheme sch;
    sch.scale = 1;
    sch.osc_case = osc_case;
    sch.s = s;
    sch.epsilon = 0.1;
    sch.symbol_id = "hand";
    long long a = 2;
    for (int k = 0; k < s; ++k) {
        sch.centers.push_back(freq(a, a / 2));
        a <<= 2;
    }
    sch.radii = std::move(radii);
    return sch;
}

QuadratureSpec mc_spec(long long samples) {
    QuadratureSpec spec;
    spec.mc_samples = samples;
    return spec;
}

IntegerScheme built_scheme(int s, double epsilon = 0.1) {
    ConstructOptions co;
    co.epsilon = epsilon;
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    REQUIRE(sym != nullptr);
    return rescale_to_integers(construct_scheme(*sym, OscCase::IIa, s, co));
}

WitnessParams fast_params() {
    WitnessParams wp;
    wp.c_hat = 0.346;
    wp.quad = mc_spec(60000);
    return wp;
}

}  // namespace

// --- growth constant ---------------------------------------------------------------

TEST_CASE("growth constant calibration matches the collinear ladder profile") {
    const double c = calibrate_growth_constant(mc_spec(150000));
    // min_s ||Z_s||/s over s = 1..6 is attained at s = 6 (~2.076 / 6).
    CHECK(c == doctest::Approx(0.346).epsilon(0.05));
}

// --- lattice sampling --------------------------------------------------------------

TEST_CASE("constant symbol reproduces the product-tail coefficients exactly") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(3)});
    PlaneFunction h = h_theta(sch, 1);
    MultiplierSymbol one = parse_symbol_expression("1");
    SparseTrigPoly p = p_polynomial(one, sch, h);
    SparseTrigPoly tail = riesz_product_tail(sch.centers);
    REQUIRE(p.terms().size() == tail.terms().size());
    for (const auto& [q, c] : tail.terms()) CHECK(p.coeff(q) == c);
}

TEST_CASE("zero symbol yields the empty polynomial") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(3)});
    PlaneFunction h = h_theta(sch, 1);
    MultiplierSymbol zero = parse_symbol_expression("0");
    SparseTrigPoly p = p_polynomial(zero, sch, h);
    CHECK(p.terms().empty());
}

TEST_CASE("lattice sampling rejects unsuitable bump sums") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(3)});
    MultiplierSymbol one = parse_symbol_expression("1");

    // Ratio-weighted sums estimate a different functional.
    PlaneFunction ratio = ratio_bump_sum(sch, 1);
    CHECK_THROWS_AS(p_polynomial(one, sch, ratio), ConfigError);

    // A sum built from a different ladder does not enumerate this sum set.
    IntegerScheme other = hand_scheme(3, {BigRat(1, 2), BigRat(3), BigRat(12)});
    PlaneFunction h3 = h_theta(other, 1);
    CHECK_THROWS_AS(p_polynomial(one, sch, h3), ConfigError);
}

TEST_CASE("sampling a log-dyadic symbol on the singular axis is refused") {
    IntegerScheme sch;
    sch.scale = 1;
    sch.osc_case = OscCase::IIa;
    sch.s = 1;
    sch.symbol_id = "hand";
    sch.centers = {freq(0, 2)};
    sch.radii = {BigRat(1, 2)};
    PlaneFunction h = h_theta(sch, 1);
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    REQUIRE(sym != nullptr);
    CHECK_THROWS_AS(p_polynomial(*sym, sch, h), SampleOnSingularity);
}

TEST_CASE("constructed ladder: sampled coefficients sit on the signed targets") {
    IntegerScheme sch = built_scheme(3);
    PlaneFunction h = h_theta(sch, 1);
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    SparseTrigPoly p = p_polynomial(*sym, sch, h);
    SparseTrigPoly z = z_target(sch, OscCase::IIa);
    REQUIRE(p.terms().size() == 26);
    REQUIRE(z.terms().size() == 26);

    // The dyadic centers sample the symbol at exactly +-1, so the match is far
    // tighter than the epsilon the certificate needs.
    double worst = 0.0;
    for (const auto& [q, c] : z.terms()) worst = std::max(worst, std::abs(p.coeff(q) - c));
    CHECK(worst <= 1e-9);

    // Depth-1 anchor: the first level's target is -1.
    const Frequency& c1 = sch.centers[0];
    CHECK(p.coeff(c1).real() == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(p.coeff(freq(0, 0) - c1).real() == doctest::Approx(-0.5).epsilon(1e-10));
}

// --- combinatorial target ----------------------------------------------------------

TEST_CASE("one-level target is minus one half at both frequencies") {
    IntegerScheme sch = hand_scheme(1, {BigRat(1, 2)});
    SparseTrigPoly z = z_target(sch, OscCase::IIa);
    REQUIRE(z.terms().size() == 2);
    CHECK(z.coeff(freq(2, 1)) == std::complex<double>(-0.5, 0.0));
    CHECK(z.coeff(freq(-2, -1)) == std::complex<double>(-0.5, 0.0));
}

TEST_CASE("alternating-case target equals the alternating-sign expansion") {
    IntegerScheme sch = hand_scheme(3, {BigRat(1, 2), BigRat(3), BigRat(12)});
    SparseTrigPoly z = z_target(sch, OscCase::IIa);
    SparseTrigPoly zp = z_polynomial(sch.centers, alternating_signs(3));
    REQUIRE(z.terms().size() == zp.terms().size());
    for (const auto& [q, c] : zp.terms()) CHECK(z.coeff(q) == c);
}

TEST_CASE("exponential-case target is half the top-positive expansion") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(3)}, OscCase::IIb);
    SparseTrigPoly z = z_target(sch, OscCase::IIb);
    SparseTrigPoly ep = exp_polynomial(sch.centers);
    REQUIRE(ep.terms().size() == 4);  // (3^2 - 1) / 2 top-positive points
    REQUIRE(z.terms().size() == 4);
    for (const auto& [q, c] : ep.terms()) CHECK(z.coeff(q) == 0.5 * c);
    // Nothing on the negative side of the top ball.
    CHECK(z.coeff(freq(-8, -4)) == std::complex<double>(0.0, 0.0));
    CHECK(z.coeff(freq(-2, -1)) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("oversized radii put a frequency in two balls") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(30)});
    CHECK_THROWS_AS(z_target(sch, OscCase::IIa), BallAssignmentAmbiguous);
}

TEST_CASE("undersized radii leave a frequency unassigned") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(1, 2)});
    CHECK_THROWS_AS(z_target(sch, OscCase::IIa), BallAssignmentAmbiguous);
}

// --- gap certificate ---------------------------------------------------------------

TEST_CASE("gap certificate returns epsilon * 3^s and trips on sign flips") {
    IntegerScheme sch = hand_scheme(2, {BigRat(1, 2), BigRat(3)});
    SparseTrigPoly z = z_target(sch, OscCase::IIa);

    CHECK(gap_bound(sch, z, z) == 0.1 * 9.0);

    // A perturbation below the certified budget passes ...
    SparseTrigPoly close = z;
    close.set(freq(2, 1), std::complex<double>(-0.5 + 0.3, 0.0));
    CHECK(gap_bound(sch, close, z) == 0.1 * 9.0);

    // ... and flipping the two depth-1 signs (total gap 2) does not.
    MultiplierSymbol one = parse_symbol_expression("1");
    PlaneFunction h = h_theta(sch, 1);
    SparseTrigPoly p = p_polynomial(one, sch, h);
    CHECK_THROWS_AS(gap_bound(sch, p, z), GapExceeded);
}

// --- full pipeline -----------------------------------------------------------------

TEST_CASE("single-ladder report: certified sandwich and bookkeeping") {
    IntegerScheme sch = built_scheme(2, 0.025);
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    WitnessReport rep = witness_report_for_scheme(*sym, sch, fast_params());

    CHECK(rep.s == 2);
    CHECK(rep.osc_case == OscCase::IIa);
    CHECK(rep.theta.theta >= 1);
    CHECK(rep.theta.theta <= 6);
    CHECK_FALSE(rep.theta.search_trace.empty());

    // ||Z_2|| on a ratio-16 alternating ladder, frozen reference 0.928.
    CHECK(rep.z_norm.value == doctest::Approx(0.928).epsilon(0.04));
    CHECK(rep.h_norm_upper.value > 0.8);
    CHECK(rep.h_norm_upper.value < 1.1);

    CHECK(rep.epsilon == sch.epsilon);
    CHECK(rep.pz_gap_bound == doctest::Approx(sch.epsilon * 9.0));
    CHECK(rep.p_norm_lower ==
          doctest::Approx(rep.z_norm.value - rep.z_norm.error_bound - rep.pz_gap_bound));
    CHECK(rep.ratio == doctest::Approx(rep.p_norm_lower / rep.h_norm_upper.value));
    CHECK(rep.c_hat == 0.346);
    CHECK(rep.scheme_fingerprint != 0);

    // The certified lower bound must sit under the direct estimate.
    REQUIRE(rep.p_norm_direct.has_value());
    CHECK(rep.p_norm_lower <= rep.p_norm_direct->value + rep.p_norm_direct->error_bound);
    CHECK(rep.p_norm_lower > 0.5);
}

TEST_CASE("multi-depth report is deterministic byte for byte") {
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    WitnessParams wp = fast_params();
    auto a = witness_report(*sym, OscCase::IIa, {1, 2}, wp);
    auto b = witness_report(*sym, OscCase::IIa, {1, 2}, wp);
    REQUIRE(a.size() == 2);
    CHECK(a[0].s == 1);
    CHECK(a[1].s == 2);
    CHECK(a[0].scheme_fingerprint != a[1].scheme_fingerprint);

    CHECK(witness_csv(a) == witness_csv(b));
    CHECK(witness_json(a) == witness_json(b));

    const std::string csv = witness_csv(a);
    CHECK(csv.find("# note:") != std::string::npos);
    CHECK(csv.find("s,case,theta") == 0);

    // Accuracy schedule: epsilon_s = c_hat * 3^-(s+1) * s.
    CHECK(a[0].epsilon == doctest::Approx(0.346 / 9.0));
    CHECK(a[1].epsilon == doctest::Approx(0.346 * 2.0 / 27.0));
}

TEST_CASE("construction failures keep their original type through the pipeline") {
    // The log-dyadic cosine is even, so it can never hit the one-sided targets.
    const MultiplierSymbol* sym = find_symbol("dyadic_cos");
    CHECK_THROWS_AS(witness_report(*sym, OscCase::IIb, {2}, fast_params()),
                    ConstructionFailed);
}

TEST_CASE("step symbol drives the exponential case end to end") {
    const MultiplierSymbol* sym = find_symbol("dyadic_step");
    REQUIRE(sym != nullptr);
    auto reps = witness_report(*sym, OscCase::IIb, {2}, fast_params());
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].osc_case == OscCase::IIb);
    // Half the exponential expansion's norm at depth 2, frozen reference 0.715.
    CHECK(reps[0].z_norm.value == doctest::Approx(0.715).epsilon(0.05));
    CHECK(reps[0].ratio > 0.3);
    CHECK(reps[0].p_norm_lower > 0.4);
}

TEST_CASE("flat symbol is a negative control: no growth in the sampled norm") {
    IntegerScheme sch = built_scheme(3);
    PlaneFunction h = h_theta(sch, 1);
    const MultiplierSymbol* gauss = find_symbol("gaussian");
    REQUIRE(gauss != nullptr);
    SparseTrigPoly p = p_polynomial(*gauss, sch, h);
    NormEstimate n = l1_norm(p, mc_spec(100000));
    // The Gaussian is ~1 on the whole sum set, so P is the plain product tail:
    // bounded by 2 sup|m| for every depth (frozen ||R_3|| reference 1.122).
    CHECK(n.value <= 2.0 + n.error_bound);
    CHECK(n.value == doctest::Approx(1.122).epsilon(0.05));
}
