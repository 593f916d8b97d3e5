#pragma once

#include "rieszlab/frequency.hpp"

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rieszlab {

enum class SymbolClass { Continuous, Homogeneous0, OscillatorySymmetric, OscillatoryAsymmetric, Custom };

// A plane multiplier symbol: an evaluable bounded function on R^2 \ {0}.
struct MultiplierSymbol {
    std::string id;
    std::function<std::complex<double>(double, double)> eval;
    // Declared discontinuity locus (beyond the origin); empty means none.
    std::function<bool(double, double)> is_singular;
    SymbolClass declared_class = SymbolClass::Custom;
    std::optional<double> sup_norm_hint;
    std::string description;

    std::complex<double> operator()(double x1, double x2) const { return eval(x1, x2); }
    bool singular_at(double x1, double x2) const {
        return is_singular && is_singular(x1, x2);
    }
};

// Built-in symbols: a smooth control, two homogeneous degree-0 obstructions,
// and one representative of each oscillation class.
const std::vector<MultiplierSymbol>& symbol_catalog();
const MultiplierSymbol* find_symbol(const std::string& id);

// Tiny arithmetic-expression symbols, e.g. "cos(pi*log2(abs(x1)))".
// Grammar documented in docs/symbol-grammar.md.
MultiplierSymbol parse_symbol_expression(const std::string& source);

// Resolve either a catalog id or an "expr:..." definition.
MultiplierSymbol resolve_symbol(const std::string& spec);

// --- radial classification ---------------------------------------------------

enum class RadialCase { StarCondition, IIa, IIb, Inconclusive };

struct DirectionReport {
    std::array<double, 2> v{1.0, 0.0};
    bool usable = true;             // false when samples hit singularities/NaN
    bool converges_pos = false;     // m(2^-j v) settles
    bool converges_neg = false;     // m(-2^-j v) settles
    double limit_pos = 0.0, limit_neg = 0.0;
};

struct RadialClassification {
    RadialCase verdict = RadialCase::Inconclusive;
    // For IIa/IIb: the witness direction, dyadic subsequence parity and limits.
    std::array<double, 2> direction{1.0, 0.0};
    int parity = 0;        // scales 2^-j with j == parity (mod 2) approach `a`
    double a = 0.0;        // limit along the witness subsequence, positive side
    double b = 0.0;        // IIa: limit on the complementary parity; IIb: limit at -xi
    // For StarCondition: per-direction radial limits (the Omega samples).
    std::vector<DirectionReport> directions;
    bool omega_constant = true;   // false flags a homogeneous-type obstruction
    std::string note;
};

RadialClassification classify_radial(const MultiplierSymbol& symbol, int direction_count = 16,
                                     int scale_depth = 44, double tol = 1e-3);

// --- sup-norm lower-bound probe ----------------------------------------------

struct ProbeRow {
    double lambda;
    double ratio;
};

// Rapidly decaying test profile, described by the two functionals the probe
// ratio needs.  Default: f(x) = e^{-pi |x|^2}, so Ff(0) = 1 and |grad f|_1 = pi.
struct TestProfile {
    std::string name = "gauss";
    double hat_f0 = 1.0;
    double grad_l1 = 3.14159265358979323846;
};

// ratio(lambda) = |2 pi m(xi0) Ff(0)| / (2 pi Ff(0) + lambda |grad f|_1);
// monotone nonincreasing in lambda, and the lambda = 0 row is exactly |m(xi0)|.
std::vector<ProbeRow> sup_norm_probe(const MultiplierSymbol& symbol, std::array<double, 2> xi0,
                                     const TestProfile& profile, const std::vector<double>& lambdas);

// --- lattice sampling ----------------------------------------------------------

// m(eps * n) over the requested window; throws SampleOnSingularity when a
// sample point lies on the symbol's declared singular locus.
std::map<Frequency, std::complex<double>> deleeuw_sample(const MultiplierSymbol& symbol,
                                                         double eps_scale,
                                                         const std::vector<Frequency>& window);

// Exact-point variant used by the scheme pipeline: evaluates at rational
// points converted to double at the last moment.
std::complex<double> symbol_at(const MultiplierSymbol& symbol, const RatVec2& point);

}  // namespace rieszlab
