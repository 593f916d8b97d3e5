#pragma once

#include "rieszlab/quadrature.hpp"
#include "rieszlab/scheme.hpp"
#include "rieszlab/trig_poly.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Plane-side machinery: the squared triangle kernel g and its tensor square
// G, the lattice-to-plane transfer W(phi), the bump sum H^theta built from a
// rescaled scheme, and Monte Carlo L^1(R^2) norms of inverse Fourier
// transforms, including the ratio-weighted sum (xi2/xi1) H^theta and the
// smooth-cutoff inequality table.

namespace rieszlab {

// g(t) = max(1 - |t|, 0)^2; supported on (-1, 1), g(0) = 1.
double g_kernel(double t);

// G(u) = g(u1) g(u2).
double tensor_kernel(double u1, double u2);

// Closed form of (F^-1 g)(t) = (4/a^2)(1 - sin a / a) with a = 2 pi t.
// Nonnegative with total integral g(0) = 1, so it doubles as the importance
// density for the Monte Carlo norm below.  Value 2/3 at t = 0.
double fejer_sq_density(double t);

// d/dt of fejer_sq_density.
double fejer_sq_density_derivative(double t);

// One translated bump w * G(2^theta (xi - center)) plus the constants the
// ratio-weighted estimator needs at that center.
struct BumpAtom {
    Frequency center;
    std::complex<double> weight;
    double sigma = 0.0;    // center slope  center.k2 / center.k1
    double inv_q1 = 0.0;   // 1 / center.k1
};

// l-infinity ball; evaluation of a compactly supported PlaneFunction outside
// the union of its balls returns exactly 0.
struct SupportBall {
    Frequency center;
    double radius;
};

// Function on the frequency plane.  All instances produced by this module
// are finite bump sums
//     f(xi) = [xi2/xi1]^(ratio_weighted) * sum_q w_q G(2^theta (xi - q)),
// and carry that structure in `atoms` so the norm estimator can factor the
// transform exactly instead of gridding R^2.
//
// Scheme centers routinely exceed 2^53, so a double pair cannot even name a
// point inside a bump; eval_exact takes the exact rational point instead and
// is the form the identity tests use.  eval(x, y) forwards to it (doubles
// are exact rationals).
struct PlaneFunction {
    std::function<std::complex<double>(double, double)> eval;
    std::function<std::complex<double>(const RatVec2&)> eval_exact;
    std::vector<SupportBall> support;  // empty = global support
    std::string smoothness_tag;

    int theta = 0;               // bump half-width exponent: radius 2^-theta
    bool ratio_weighted = false;
    std::vector<BumpAtom> atoms;
    // When the atoms are the signed sums of a center ladder, the ladder
    // itself; the estimator then needs only one phase per level per sample.
    std::vector<Frequency> levels;

    std::complex<double> operator()(double x1, double x2) const { return eval(x1, x2); }
    bool compactly_supported() const { return !support.empty(); }
};

// The bump G(2^theta xi) at the origin as a PlaneFunction (theta = 0 gives G
// itself, theta = 1 its dilate G(2 xi), ...).
PlaneFunction tensor_kernel_fn(int theta = 0);

// W(phi)(xi) = sum_n G(n - xi) phi(n) over the finite support of phi.
// Interpolates: W(phi)(n) = phi(n) at every integer point, because G(0) = 1
// and G vanishes on the rest of the lattice.
PlaneFunction fejer_transfer(const std::map<Frequency, std::complex<double>>& phi);

// Signed sums of the scheme's centers with weights 2^-chi (chi = number of
// levels used), i.e. the coefficients of the mean-zero center-product
// polynomial, placed at the dilated lattice points 2^theta q.  Feeding this
// to fejer_transfer reproduces h_theta(scheme, theta) under xi -> 2^theta xi.
std::map<Frequency, std::complex<double>> dilated_sum_coefficients(const IntegerScheme& scheme,
                                                                   int theta);

// Minimal pairwise l-infinity separation of the signed sum set (exact).
BigInt min_sum_separation(const IntegerScheme& scheme);

// H^theta(xi) = sum_q 2^-chi(q) G(2^theta (xi - q)) over the signed sum set.
// Requires 2^-theta < (minimal separation)/2 so the bumps stay disjoint;
// throws BumpOverlap otherwise.  H^theta(q) = 2^-chi(q) exactly at each sum
// point, and vanishes on both coordinate axes whenever no sum point has a
// zero coordinate.
PlaneFunction h_theta(const IntegerScheme& scheme, int theta);

// (xi2/xi1) H^theta as a ratio-weighted bump sum.  Throws ConfigError if a
// sum point sits on the xi1 = 0 axis (the ratio is unbounded there).
PlaneFunction ratio_bump_sum(const IntegerScheme& scheme, int theta);

// Monte Carlo estimate of the L^1(R^2) norm of the inverse Fourier transform
// of a bump sum.  The transform factors as
//     (F^-1 f)(x) = 2^-2theta F(y1) F(y2) A(2^theta y),   y = 2^-theta x,
// with F = fejer_sq_density and A the trigonometric sum of the atoms, so the
// norm is the mean of |A| (plus derivative-weighted corrections in the
// ratio-weighted case) under y ~ F x F, restricted to |y|_inf <= R.
//
// error_bound = 3 standard errors + the F-tail mass beyond R + (ratio case)
// a closed-form bound on the curvature remainder of xi2/xi1 across each
// bump.  The tail and remainder are genuine upper bounds, reported, never
// silently dropped.  Deterministic for a fixed spec (block-indexed RNG,
// order-independent reduction).  Throws ResourceExceeded when the phase
// words needed by the frequencies exceed the engine width, ConfigError for a
// structureless PlaneFunction or a nonpositive truncation radius.
NormEstimate inv_ft_l1(const PlaneFunction& fn, double truncation_radius = 2048.0,
                       const QuadratureSpec& spec = {});

// inv_ft_l1 of ratio_bump_sum(scheme, theta).
NormEstimate ratio_multiplier_l1(const IntegerScheme& scheme, int theta,
                                 const QuadratureSpec& spec = {});

struct ThetaChoice {
    int theta = 0;
    int s = 0;
    NormEstimate ratio_norm;
    std::vector<std::pair<int, NormEstimate>> search_trace;
};

// Increase theta from the smallest disjoint-bump value until the ratio norm
// changes by less than rel_tol between consecutive widths; every probe is
// recorded in the trace.  The returned estimate is bit-identical to an
// independent ratio_multiplier_l1(scheme, theta) rerun with the same spec.
// Throws NoStabilization when theta_max is exhausted (or admits no
// disjoint-bump width at all).
ThetaChoice theta_search(const IntegerScheme& scheme, const QuadratureSpec& spec = {},
                         double rel_tol = 0.05, int theta_max = 20);

// --- smooth-cutoff inequality table ----------------------------------------

// Real-valued test field, smooth on a neighbourhood of the closed unit ball.
struct CutoffField {
    std::string name;
    std::function<double(double, double)> eval;
};

CutoffField constant_field();    // f == 1
CutoffField coordinate_field();  // f(xi) = xi1
// f(xi) = (q2 + a xi2)/(q1 + a xi1) - q2/q1: the bump-local part of the
// ratio weight around a center q, pulled back to the unit ball.  a defaults
// to |q1|/2 so the pole stays outside.
CutoffField ratio_remainder_field(const RatVec2& q, std::optional<double> a_scale = std::nullopt);

// Radial bump supported in the open unit ball, value 1 at the origin.
struct CutoffDescriptor {
    std::string name;
    std::function<double(double, double)> eval;
};

// eta(xi) = exp(1 - 1/(1 - |xi|^2)) on |xi| < 1, else 0.
CutoffDescriptor standard_mollifier();

struct CutoffRow {
    double epsilon;
    double lhs;  // || F^-1 (eta_eps f) ||_L1, eta_eps = eta(. / eps)
    double rhs;  // C(eta) (|f(0)| + eps S),  S = sup_ball sum_{|alpha|<=3} |D^alpha f|
    bool holds;
};

struct CutoffTable {
    std::string eta_name;
    std::string field_name;
    double c_eta = 0.0;
    double derivative_sum = 0.0;  // the S above
    std::vector<CutoffRow> rows;
    bool all_hold() const;
};

// Calibrate C(eta) once, at eps = 2^-3 on the fields {1, xi1}, with a 1.2
// safety factor; the table evaluations then hold it fixed across eps.
double fit_cutoff_constant(const CutoffDescriptor& eta);

// One row per eps: lhs via the rescaled transform of eta(zeta) f(eps zeta)
// over the unit square (two-stage separable oscillatory quadrature), rhs via
// central finite differences of f sampled over the ball.  Violations are
// reported in the rows, never thrown.
CutoffTable cutoff_bound_check(const CutoffField& f, const CutoffDescriptor& eta,
                               const std::vector<double>& epsilon_list,
                               std::optional<double> c_eta = std::nullopt);

namespace reference {

// Same sample stream as inv_ft_l1, but phases from full-width integer
// arithmetic per atom and libm trig; serial.  Oracle and benchmark baseline.
double plane_l1_mc(const PlaneFunction& fn, double truncation_radius, std::uint64_t samples,
                   std::uint64_t seed);

}  // namespace reference

}  // namespace rieszlab
