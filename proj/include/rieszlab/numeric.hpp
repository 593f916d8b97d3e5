#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace rieszlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt pow2(unsigned k) { return BigInt(1) << k; }

// Number of bits in |v|; bit_length(0) == 0.
inline unsigned bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(v))) + 1;
}

inline BigInt big_abs(const BigInt& v) { return boost::multiprecision::abs(v); }

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const BigRat& v) { return v.convert_to<double>(); }

inline BigInt numer(const BigRat& r) { return boost::multiprecision::numerator(r); }
inline BigInt denom(const BigRat& r) { return boost::multiprecision::denominator(r); }

// True iff r = n / 2^k in lowest terms.
inline bool is_dyadic(const BigRat& r) {
    BigInt d = denom(r);
    return d == (BigInt(1) << (bit_length(d) - 1));
}

// Smallest k >= 0 with r * 2^k integral; r must be dyadic.
inline unsigned dyadic_exponent(const BigRat& r) {
    return bit_length(denom(r)) - 1;
}

// Nearest dyadic n/2^bits to x (ties away from zero are irrelevant here).
inline BigRat dyadic_round(double x, unsigned bits) {
    double scaled = std::ldexp(x, static_cast<int>(bits));
    BigInt n(static_cast<long long>(std::llround(scaled)));
    return BigRat(n, BigInt(1) << bits);
}

inline std::string to_string(const BigInt& v) { return v.str(); }

// --- small deterministic utilities -----------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), seed);
}

}  // namespace rieszlab
