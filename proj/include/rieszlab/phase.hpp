#pragma once

#include "rieszlab/numeric.hpp"
#include "rieszlab/trig_poly.hpp"

#include <array>
#include <cstdint>
#include <vector>

// Exact phase arithmetic for frequencies far beyond 64 bits.
//
// Sample points are dyadics x = j / 2^(64 W) with j drawn as W random words,
// so the fractional part of <q, x> is an exact W-word modular product and the
// top word already carries 64 correct bits of the phase.  This keeps huge
// integer frequencies (schemes rescale to ~2^150 and beyond) from aliasing
// against the sample lattice, which double-precision points cannot avoid:
// scheme coordinates are divisible by enormous powers of two.

namespace rieszlab::phasekit {

inline constexpr int kMaxWords = 10;

// Words needed so that a frequency of `bits` bits leaves >= 64 slack bits.
inline int words_for_bits(unsigned bits) {
    int w = static_cast<int>((bits + 64) / 64) + 1;
    return w < 1 ? 1 : w;
}

// q mod 2^(64 W), little-endian words (two's-complement style for q < 0).
std::array<std::uint64_t, kMaxWords> residue_words(const BigInt& q, int W);

// Per-frequency residues of both coordinates, flattened W words each.
struct ResidueTable {
    int W = 1;
    std::size_t count = 0;
    std::vector<std::uint64_t> r1, r2;   // count * W words, little-endian
    std::vector<double> c_re, c_im;      // matching coefficients

    static ResidueTable build(const SparseTrigPoly& poly, int W);
    static ResidueTable build(const std::vector<Frequency>& freqs,
                              const std::vector<std::complex<double>>& coeffs, int W);
};

// Top word of (r1*j1 + r2*j2) mod 2^(64 W): the leading 64 bits of the phase
// fraction.  Column-wise product with a three-word carry accumulator.
inline std::uint64_t phase_top_word(const std::uint64_t* r1, const std::uint64_t* r2,
                                    const std::uint64_t* j1, const std::uint64_t* j2, int W) {
    if (W == 1) return r1[0] * j1[0] + r2[0] * j2[0];
    std::uint64_t lo = 0, hi = 0, hi2 = 0;
    std::uint64_t top = 0;
    for (int k = 0; k < W; ++k) {
        for (int a = 0; a <= k; ++a) {
            unsigned __int128 p = static_cast<unsigned __int128>(r1[a]) * j1[k - a];
            std::uint64_t plo = static_cast<std::uint64_t>(p), phi = static_cast<std::uint64_t>(p >> 64);
            lo += plo;
            std::uint64_t c1 = lo < plo;
            hi += phi + c1;
            hi2 += (hi < phi + c1) || (phi + c1 < phi);
            p = static_cast<unsigned __int128>(r2[a]) * j2[k - a];
            plo = static_cast<std::uint64_t>(p);
            phi = static_cast<std::uint64_t>(p >> 64);
            lo += plo;
            c1 = lo < plo;
            hi += phi + c1;
            hi2 += (hi < phi + c1) || (phi + c1 < phi);
        }
        top = lo;
        lo = hi;
        hi = hi2;
        hi2 = 0;
    }
    return top;
}

// sin/cos of 2*pi*u for u in [0,1), table + quadratic correction.
// Absolute error < 1e-10; the Monte Carlo estimators tolerate far more.
struct FastSinCos {
    static constexpr int kBits = 13;
    static constexpr int kSize = 1 << kBits;

    FastSinCos();
    void eval(double u, double& s, double& c) const {
        double t = u * kSize;
        int i = static_cast<int>(t);
        double d = (t - i) * kStep;
        double sb = sin_[i], cb = cos_[i];
        double q = 0.5 * d * d;
        s = sb + d * cb - q * sb;
        c = cb - d * sb - q * cb;
    }
    // u given as a 64-bit fraction (value u64 * 2^-64 of a turn).
    void eval_u64(std::uint64_t u, double& s, double& c) const {
        eval(static_cast<double>(u) * 0x1p-64, s, c);
    }

private:
    static constexpr double kStep = 6.283185307179586476925286766559 / kSize;
    std::vector<double> sin_, cos_;
};

const FastSinCos& fast_sincos();

// Batch-indexed deterministic RNG stream: every batch owns an independent
// splitmix64 sequence, so any assignment of batches to threads reproduces
// the same numbers.
struct BatchRng {
    explicit BatchRng(std::uint64_t seed, std::uint64_t batch)
        : state_(seed ^ (0x9e3779b97f4a7c15ULL * (batch + 0x243f6a8885a308d3ULL))) {
        // burn-in decorrelates nearby batch indices
        splitmix64(state_);
        splitmix64(state_);
    }
    std::uint64_t next() { return splitmix64(state_); }
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1p-53; }

private:
    std::uint64_t state_;
};

}  // namespace rieszlab::phasekit
