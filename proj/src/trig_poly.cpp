#include "rieszlab/trig_poly.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rieszlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string pattern_str(const std::vector<int8_t>& zeta) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < zeta.size(); ++i) os << (i ? "," : "") << int(zeta[i]);
    os << "]";
    return os.str();
}
}  // namespace

BigInt SparseTrigPoly::max_abs_coord() const {
    BigInt m = 0;
    for (const auto& [q, c] : coeffs_) {
        BigInt a = q.max_abs_coord();
        if (a > m) m = a;
    }
    return m;
}

double SparseTrigPoly::coeff_l1() const {
    double s = 0.0;
    for (const auto& [q, c] : coeffs_) s += std::abs(c);
    return s;
}

double SparseTrigPoly::coeff_l2sq() const {
    double s = 0.0;
    for (const auto& [q, c] : coeffs_) s += std::norm(c);
    return s;
}

SparseTrigPoly::Coeff SparseTrigPoly::eval(double x1, double x2) const {
    double re = 0.0, im = 0.0;
    for (const auto& [q, c] : coeffs_) {
        double phase = kTwoPi * (to_double(q.k1) * x1 + to_double(q.k2) * x2);
        double s = std::sin(phase), co = std::cos(phase);
        re += c.real() * co - c.imag() * s;
        im += c.real() * s + c.imag() * co;
    }
    return {re, im};
}

bool SparseTrigPoly::is_real_valued(double tol) const {
    for (const auto& [q, c] : coeffs_) {
        Coeff mirror = coeff(-q);
        if (std::abs(mirror.real() - c.real()) > tol || std::abs(mirror.imag() + c.imag()) > tol)
            return false;
    }
    return true;
}

SparseTrigPoly& SparseTrigPoly::operator+=(const SparseTrigPoly& o) {
    for (const auto& [q, c] : o.coeffs_) add(q, c);
    return *this;
}

SparseTrigPoly& SparseTrigPoly::operator*=(double s) {
    if (s == 0.0) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [q, c] : coeffs_) c *= s;
    return *this;
}

SparseTrigPoly operator*(const SparseTrigPoly& a, const SparseTrigPoly& b) {
    SparseTrigPoly out;
    for (const auto& [qa, ca] : a.coeffs_)
        for (const auto& [qb, cb] : b.coeffs_) out.add(qa + qb, ca * cb);
    return out;
}

SparseTrigPoly SparseTrigPoly::without_constant() const {
    SparseTrigPoly out = *this;
    out.coeffs_.erase(Frequency{});
    return out;
}

SparseTrigPoly SparseTrigPoly::dilate(const BigInt& scale) const {
    SparseTrigPoly out;
    for (const auto& [q, c] : coeffs_) out.set({q.k1 * scale, q.k2 * scale}, c);
    return out;
}

SumSet SumSet::build(const std::vector<Frequency>& centers) {
    const int s = static_cast<int>(centers.size());
    if (s == 0) throw std::invalid_argument("SumSet: empty center list");
    SumSet out;
    out.centers_ = centers;

    std::vector<int8_t> zeta(s, -1);
    // Odometer over {-1,0,1}^s.
    while (true) {
        SignedSum entry;
        entry.zeta = zeta;
        Frequency q;
        for (int j = 0; j < s; ++j) {
            if (zeta[j] == 0) continue;
            ++entry.weight;
            entry.top = j;
            if (zeta[j] > 0)
                q = q + centers[j];
            else
                q = q - centers[j];
        }
        if (entry.weight > 0) {
            if (q.is_zero())
                throw RepresentationCollision("signed sum " + pattern_str(zeta) +
                                              " of centers vanishes");
            entry.q = q;
            auto [it, inserted] = out.points_.try_emplace(q, std::move(entry));
            if (!inserted)
                throw RepresentationCollision("signed sums " + pattern_str(it->second.zeta) +
                                              " and " + pattern_str(zeta) +
                                              " both give frequency " + q.str());
        }
        int j = 0;
        while (j < s && zeta[j] == 1) zeta[j++] = -1;
        if (j == s) break;
        ++zeta[j];
    }
    return out;
}

SparseTrigPoly riesz_product_expand(const std::vector<Frequency>& centers) {
    SumSet ss = SumSet::build(centers);
    SparseTrigPoly out;
    out.set(Frequency{}, 1.0);
    for (const auto& [q, e] : ss.points()) out.set(q, std::ldexp(1.0, -e.weight));
    return out;
}

SparseTrigPoly riesz_product_tail(const std::vector<Frequency>& centers) {
    return riesz_product_expand(centers).without_constant();
}

SparseTrigPoly z_polynomial(const std::vector<Frequency>& centers, const std::vector<int>& signs) {
    if (signs.size() != centers.size())
        throw std::invalid_argument("z_polynomial: need one sign per center");
    for (int v : signs)
        if (v != 1 && v != -1) throw std::invalid_argument("z_polynomial: signs must be +-1");
    SumSet ss = SumSet::build(centers);
    SparseTrigPoly out;
    for (const auto& [q, e] : ss.points())
        out.set(q, signs[e.top] * std::ldexp(1.0, -e.weight));
    return out;
}

std::vector<int> alternating_signs(int s) {
    std::vector<int> out(s);
    for (int j = 1; j <= s; ++j) out[j - 1] = (j % 2 == 0) ? 1 : -1;
    return out;
}

SparseTrigPoly exp_polynomial(const std::vector<Frequency>& centers) {
    SumSet ss = SumSet::build(centers);
    SparseTrigPoly out;
    for (const auto& [q, e] : ss.points()) {
        if (e.zeta[e.top] != 1) continue;
        out.set(q, std::ldexp(1.0, 1 - e.weight));
    }
    return out;
}

std::vector<Frequency> power_centers(int s, const Frequency& dir, unsigned ratio) {
    std::vector<Frequency> out;
    BigInt m = 1;
    for (int j = 0; j < s; ++j) {
        out.push_back({dir.k1 * m, dir.k2 * m});
        m *= ratio;
    }
    return out;
}

}  // namespace rieszlab
