#pragma once

#include "rieszlab/quadrature.hpp"
#include "rieszlab/trig_poly.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace rieszlab {

// sum coeff(q) e^{2 pi i <q, point>}
std::complex<double> eval_at(const SparseTrigPoly& poly, double x1, double x2);

// Integral of |poly| over the unit torus (measure normalized to 1).
//
// AutoGrid picks per-axis midpoint grids (smallest power of two >= 4*max|q_i|)
// and streams the evaluation one row at a time; when the grid would blow the
// evaluation or memory budget it falls back to Monte Carlo (or throws
// ResourceExceeded when the fallback is disabled).  Monte Carlo draws exact
// dyadic points with enough fractional bits to out-resolve every frequency.
NormEstimate l1_norm(const SparseTrigPoly& poly, const QuadratureSpec& spec = {});

enum class GrowthBuilder { SymmetricZ, AsymmetricExp, ProductTail };

struct GrowthRow {
    int s;
    NormEstimate norm;
    double per_s;
};

// One l1_norm row per s in [s_min, s_max].
std::vector<GrowthRow> growth_profile(GrowthBuilder builder,
                                      const std::function<std::vector<Frequency>(int)>& centers_for,
                                      int s_min, int s_max, const QuadratureSpec& spec = {});

// Slow, obviously-correct implementations used as oracles in tests and as the
// serial baseline in the benchmark.
namespace reference {

// Full 2-D midpoint grid, direct per-point evaluation (libm, no streaming).
double l1_grid(const SparseTrigPoly& poly, std::uint64_t n1, std::uint64_t n2);

// Same sample stream as the fast Monte Carlo path, but phases computed with
// full-precision integer arithmetic and libm trig.
double l1_mc(const SparseTrigPoly& poly, std::uint64_t samples, std::uint64_t seed);

}  // namespace reference

}  // namespace rieszlab
