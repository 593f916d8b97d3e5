#pragma once

#include "rieszlab/frequency.hpp"
#include "rieszlab/symbols.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rieszlab {

enum class OscCase { IIa, IIb };

std::string to_string(OscCase c);
OscCase osc_case_from_string(const std::string& name);

// Center/radius ladder produced by backward induction.  Level s carries the
// largest scale, level 1 the smallest; radii grow with the level index.
struct LacunaryScheme {
    OscCase osc_case = OscCase::IIa;
    int s = 0;
    int big_n = 8;           // separation exponent N
    double epsilon = 0.1;    // accuracy demanded of the symbol on each ball
    std::string symbol_id;
    std::vector<RatVec2> centers;  // c^1 ... c^s, exact rationals
    std::vector<BigRat> radii;     // r_1 ... r_s, exact positive rationals
};

// The same ladder multiplied up to the integer lattice.
struct IntegerScheme {
    BigInt scale = 1;
    OscCase osc_case = OscCase::IIa;
    int s = 0;
    int big_n = 8;
    double epsilon = 0.1;
    std::string symbol_id;
    std::vector<Frequency> centers;
    std::vector<BigRat> radii;
};

struct ConditionCheck {
    bool evaluated = false;
    bool pass = false;
    int first_violation = 0;  // 1-based ladder index, 0 when none
    std::string note;
};

// The ladder conditions admit two index orientations for D and for the
// ball-inclusion radius in I; the printed forms contradict G/B for s >= 2,
// while the reversed forms are the ones the inclusion estimate actually
// uses.  The verifier evaluates both and reports them separately; all_pass()
// covers the operative (reversed) set A-I.
struct ConditionReport {
    std::map<char, ConditionCheck> operative;
    ConditionCheck d_as_printed;
    ConditionCheck i_as_printed;

    bool all_pass() const;
    std::string summary() const;
};

struct VerifyOptions {
    int ring_angles = 16;
    int interior_samples = 24;
    std::uint64_t seed = 0x5eedba11u;
    // A/A' sampling margin: require |m - target| < epsilon*(1 - margin).
    double margin_fraction = 0.01;
};

ConditionReport verify_conditions(const LacunaryScheme& scheme,
                                  const MultiplierSymbol* symbol = nullptr,
                                  const VerifyOptions& opts = {});
ConditionReport verify_conditions(const IntegerScheme& scheme,
                                  const MultiplierSymbol* symbol = nullptr,
                                  const VerifyOptions& opts = {});

struct ConstructOptions {
    int big_n = 8;
    double epsilon = 0.1;
    int sampler_budget = 40000;  // symbol evaluations per level
    std::uint64_t seed = 0x5eedc0deu;
};

// Backward induction: picks dyadic centers along the classifier's witness
// direction, with a dyadic transversal offset keeping the balls off the axes,
// and shrinks radii until the symbol is epsilon-close to the level target on
// both balls.  Deterministic given (symbol, parameters).
LacunaryScheme construct_scheme(const MultiplierSymbol& symbol, OscCase osc_case, int s,
                                const ConstructOptions& opts = {});

// scale = lcm of the center denominators; throws ScaleOverflow past the cap.
IntegerScheme rescale_to_integers(const LacunaryScheme& scheme, int max_scale_bits = 512);
LacunaryScheme to_rational(const IntegerScheme& scheme);

// Signed subset sums of the integer centers (the frequency set the witness
// multiplier lives on).
std::vector<Frequency> lambda_points(const IntegerScheme& scheme);

// Lossless JSON round-trip; big integers and rationals as decimal strings.
std::string scheme_to_json(const IntegerScheme& scheme);
IntegerScheme scheme_from_json(const std::string& text);

}  // namespace rieszlab
