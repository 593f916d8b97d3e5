#pragma once

#include "rieszlab/numeric.hpp"

#include <compare>
#include <string>

namespace rieszlab {

// Integer lattice point in Z^2, used as a frequency index.  Coordinates are
// arbitrary-precision: rescaled scheme centers routinely exceed 64 bits.
struct Frequency {
    BigInt k1{0};
    BigInt k2{0};

    friend bool operator==(const Frequency& a, const Frequency& b) {
        return a.k1 == b.k1 && a.k2 == b.k2;
    }
    friend std::strong_ordering operator<=>(const Frequency& a, const Frequency& b) {
        if (a.k1 != b.k1) return a.k1 < b.k1 ? std::strong_ordering::less : std::strong_ordering::greater;
        if (a.k2 != b.k2) return a.k2 < b.k2 ? std::strong_ordering::less : std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    Frequency operator-() const { return {-k1, -k2}; }
    friend Frequency operator+(const Frequency& a, const Frequency& b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
    friend Frequency operator-(const Frequency& a, const Frequency& b) { return {a.k1 - b.k1, a.k2 - b.k2}; }

    bool is_zero() const { return k1 == 0 && k2 == 0; }
    BigInt max_abs_coord() const {
        BigInt a = big_abs(k1), b = big_abs(k2);
        return a > b ? a : b;
    }
    std::string str() const { return "(" + k1.str() + "," + k2.str() + ")"; }
};

inline Frequency freq(long long a, long long b) { return {BigInt(a), BigInt(b)}; }

// Exact point in Q^2 (scheme centers before integer rescaling).
struct RatVec2 {
    BigRat x1{0};
    BigRat x2{0};

    friend bool operator==(const RatVec2&, const RatVec2&) = default;
    RatVec2 operator-(const RatVec2& o) const { return {x1 - o.x1, x2 - o.x2}; }
    RatVec2 operator+(const RatVec2& o) const { return {x1 + o.x1, x2 + o.x2}; }
    // |v|^2, exact.
    BigRat norm2() const { return x1 * x1 + x2 * x2; }
    BigRat max_abs() const {
        BigRat a = boost::multiprecision::abs(x1), b = boost::multiprecision::abs(x2);
        return a > b ? a : b;
    }
};

}  // namespace rieszlab
