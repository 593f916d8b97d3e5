#include "rieszlab/phase.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rieszlab::phasekit {

std::array<std::uint64_t, kMaxWords> residue_words(const BigInt& q, int W) {
    if (W < 1 || W > kMaxWords) throw std::invalid_argument("residue_words: bad word count");
    std::array<std::uint64_t, kMaxWords> out{};
    BigInt mod = BigInt(1) << (64 * W);
    BigInt r = q % mod;
    if (r < 0) r += mod;
    for (int i = 0; i < W; ++i) {
        out[i] = static_cast<std::uint64_t>(r & 0xffffffffffffffffULL);
        r >>= 64;
    }
    return out;
}

ResidueTable ResidueTable::build(const SparseTrigPoly& poly, int W) {
    std::vector<Frequency> fs;
    std::vector<std::complex<double>> cs;
    fs.reserve(poly.support_size());
    cs.reserve(poly.support_size());
    for (const auto& [q, c] : poly.terms()) {
        fs.push_back(q);
        cs.push_back(c);
    }
    return build(fs, cs, W);
}

ResidueTable ResidueTable::build(const std::vector<Frequency>& freqs,
                                 const std::vector<std::complex<double>>& coeffs, int W) {
    ResidueTable t;
    t.W = W;
    t.count = freqs.size();
    t.r1.resize(t.count * W);
    t.r2.resize(t.count * W);
    t.c_re.resize(t.count);
    t.c_im.resize(t.count);
    for (std::size_t i = 0; i < t.count; ++i) {
        auto w1 = residue_words(freqs[i].k1, W);
        auto w2 = residue_words(freqs[i].k2, W);
        for (int k = 0; k < W; ++k) {
            t.r1[i * W + k] = w1[k];
            t.r2[i * W + k] = w2[k];
        }
        t.c_re[i] = coeffs[i].real();
        t.c_im[i] = coeffs[i].imag();
    }
    return t;
}

FastSinCos::FastSinCos() : sin_(kSize), cos_(kSize) {
    for (int i = 0; i < kSize; ++i) {
        double a = 2.0 * std::numbers::pi * (static_cast<double>(i) / kSize);
        sin_[i] = std::sin(a);
        cos_[i] = std::cos(a);
    }
}

const FastSinCos& fast_sincos() {
    static const FastSinCos table;
    return table;
}

}  // namespace rieszlab::phasekit
