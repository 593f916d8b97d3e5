#pragma once

#include "rieszlab/plane.hpp"
#include "rieszlab/quadrature.hpp"
#include "rieszlab/scheme.hpp"
#include "rieszlab/symbols.hpp"
#include "rieszlab/trig_poly.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rieszlab {

// Assembles the unboundedness witness for a symbol: an integer center ladder,
// the disjoint bump sum H on it, the lattice-sampled polynomial P and its
// combinatorial target Z, and the certified chain
//
//     lower bound on ||P||_L1(T^2)  =  ||Z|| - error - gap
//     upper bound on the test function's homogeneous-W11 norm
//                                   =  ||F^-1 H|| + ||F^-1 ((xi2/xi1) H)||
//
// whose quotient grows with the ladder depth s when the symbol oscillates
// along some ray.  The transference step (the torus norm of P bounds the
// plane operator norm from below) is a classical theorem taken as an
// assumption; see the footer note emitted with every report.

struct WitnessParams {
    // Growth constant used in epsilon_s = c_hat * 3^-(s+1) * s.  Zero means
    // "calibrate": measure min_s ||Z_s||/s over the reference collinear
    // ladder (s = 1..6, ratio 16, alternating signs) with the quadrature spec
    // below, once, and reuse it for every s in the run.
    double c_hat = 0.0;

    // Ladder construction (see construct_scheme).
    int big_n = 8;
    int sampler_budget = 40000;
    std::uint64_t construction_seed = 0x5eedc0deULL;

    // Norm estimation, shared by the torus and plane estimators.
    QuadratureSpec quad;

    // Bump-width search.
    double theta_rel_tol = 0.05;
    int theta_max = 20;

    // Also estimate ||P|| directly (independent of the Z-gap route) and
    // record it next to the certified lower bound.
    bool direct_p = true;
};

struct WitnessReport {
    int s = 0;
    OscCase osc_case = OscCase::IIa;
    ThetaChoice theta;

    // value = ||F^-1 H|| + ||F^-1 ((xi2/xi1) H)||, errors summed likewise.
    NormEstimate h_norm_upper;
    NormEstimate z_norm;
    std::optional<NormEstimate> p_norm_direct;

    double epsilon = 0.0;        // scheme accuracy used at this depth
    double pz_gap_bound = 0.0;   // epsilon * 3^s
    double p_norm_lower = 0.0;   // z_norm.value - z_norm.error_bound - gap
    double ratio = 0.0;          // p_norm_lower / h_norm_upper.value
    double c_hat = 0.0;          // growth constant actually used
    std::uint64_t scheme_fingerprint = 0;  // FNV-1a of the scheme JSON
};

// min over s = 1..6 of ||Z_s||/s on the reference collinear ladder
// (direction (1,0), ratio 16, alternating signs).
double calibrate_growth_constant(const QuadratureSpec& spec = {});

// P = sum over the signed sum set of m(q) H(q) e_q: the symbol sampled on
// the lattice, weighted by the bump-sum values H(q) = 2^-chi(q) carried by
// h's atoms.  h must be a plain (not ratio-weighted) bump sum; its support
// meets the lattice exactly in the signed sum set, so P is a polynomial with
// at most 3^s - 1 terms.  Throws SampleOnSingularity if a sum point lies on
// the symbol's singular locus, ConfigError for a structureless h.
SparseTrigPoly p_polynomial(const MultiplierSymbol& symbol, const IntegerScheme& scheme,
                            const PlaneFunction& h);

// The target polynomial: coefficient (-1)^k 2^-chi(q) (IIa) or 2^-chi(q) on
// the zeta_top = +1 half only (IIb), where k is the 1-based index of the
// unique top-level ball B(+-c^k, r_k) containing q.  Membership is decided
// in exact rational arithmetic; a point in zero or several balls throws
// BallAssignmentAmbiguous.  The result is checked coefficient-for-
// coefficient against the closed-form product expansion (alternating-sign
// ladder sum for IIa, half the one-sided exponential ladder sum for IIb).
SparseTrigPoly z_target(const IntegerScheme& scheme, OscCase osc_case);

// epsilon * 3^s, the certified bound on ||P - Z||_L1; also computes the
// exact coefficient-difference sum and throws GapExceeded if it exceeds the
// bound (the symbol strayed from its level targets on some ball).
double gap_bound(const IntegerScheme& scheme, const SparseTrigPoly& p, const SparseTrigPoly& z);

// Full pipeline on an already-built ladder: width search, h-side norms,
// P/Z/gap, torus norm of Z, certified lower bound and ratio.
WitnessReport witness_report_for_scheme(const MultiplierSymbol& symbol,
                                        const IntegerScheme& scheme,
                                        const WitnessParams& params = {});

// Constructs one ladder per entry of s_list (epsilon_s = c_hat 3^-(s+1) s)
// and assembles the reports.  Deterministic for fixed params.
std::vector<WitnessReport> witness_report(const MultiplierSymbol& symbol, OscCase osc_case,
                                          const std::vector<int>& s_list,
                                          const WitnessParams& params = {});

// One CSV row per report, stable column order and formatting; ends with a
// comment line stating the transference assumption.  Byte-identical across
// reruns with equal inputs.
std::string witness_csv(const std::vector<WitnessReport>& reports);

// Same content as JSON, including the width-search traces.
std::string witness_json(const std::vector<WitnessReport>& reports);

}  // namespace rieszlab
