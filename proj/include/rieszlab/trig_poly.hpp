#pragma once

#include "rieszlab/errors.hpp"
#include "rieszlab/frequency.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace rieszlab {

// Finite trigonometric polynomial on the 2-torus,
//   f(x) = sum_q c_q e^{2 pi i <q, x>},
// stored as a sparse map.  All builders in this module produce coefficients
// that are exact dyadic rationals (sums of powers of two), so the doubles
// hold them without rounding.
class SparseTrigPoly {
public:
    using Coeff = std::complex<double>;
    using Map = std::map<Frequency, Coeff>;

    SparseTrigPoly() = default;

    void add(const Frequency& q, Coeff c) {
        auto [it, inserted] = coeffs_.try_emplace(q, c);
        if (!inserted) {
            it->second += c;
            if (it->second == Coeff{0.0, 0.0}) coeffs_.erase(it);
        }
    }
    void set(const Frequency& q, Coeff c) {
        if (c == Coeff{0.0, 0.0})
            coeffs_.erase(q);
        else
            coeffs_[q] = c;
    }
    Coeff coeff(const Frequency& q) const {
        auto it = coeffs_.find(q);
        return it == coeffs_.end() ? Coeff{0.0, 0.0} : it->second;
    }

    const Map& terms() const { return coeffs_; }
    std::size_t support_size() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }

    // Largest |coordinate| over the support; 0 for the empty polynomial.
    BigInt max_abs_coord() const;

    // sum |c_q|
    double coeff_l1() const;
    // sum |c_q|^2  (equals the squared L^2 norm over the torus)
    double coeff_l2sq() const;

    // Direct evaluation at x in [0,1)^2 via libm; only safe when the
    // coordinates of the support fit in a double (< 2^53).
    Coeff eval(double x1, double x2) const;

    // c_{-q} == conj(c_q) for every q.
    bool is_real_valued(double tol = 0.0) const;

    SparseTrigPoly& operator+=(const SparseTrigPoly& o);
    SparseTrigPoly& operator*=(double s);
    friend SparseTrigPoly operator*(const SparseTrigPoly& a, const SparseTrigPoly& b);

    // Drop the zero-frequency term (used to pass from the product form to its
    // mean-zero version).
    SparseTrigPoly without_constant() const;

    // Apply q -> (scale * q) to every frequency.
    SparseTrigPoly dilate(const BigInt& scale) const;

private:
    Map coeffs_;
};

// One point of the signed sum set: q = sum_j zeta_j c^j with zeta_j in
// {-1,0,+1}, not all zero.
struct SignedSum {
    Frequency q;
    std::vector<int8_t> zeta;   // zeta[j], 0-based over the centers
    int weight = 0;             // number of nonzero zeta_j
    int top = -1;               // largest j with zeta[j] != 0 (0-based)
};

// The full signed sum set of a center sequence, with the uniqueness of
// representation enforced at build time.
class SumSet {
public:
    // Enumerates all 3^s - 1 nonzero sign patterns.  Throws
    // RepresentationCollision if two patterns give the same point (or some
    // pattern sums to zero, which collides with the empty pattern).
    static SumSet build(const std::vector<Frequency>& centers);

    const std::vector<Frequency>& centers() const { return centers_; }
    const std::map<Frequency, SignedSum>& points() const { return points_; }
    const SignedSum* find(const Frequency& q) const {
        auto it = points_.find(q);
        return it == points_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return points_.size(); }

private:
    std::vector<Frequency> centers_;
    std::map<Frequency, SignedSum> points_;
};

// Expansion of prod_j (1 + cos 2 pi <c^j, x>).  Includes the constant term 1;
// the coefficient at q = sum zeta_j c^j is 2^{-weight}.
SparseTrigPoly riesz_product_expand(const std::vector<Frequency>& centers);

// Mean-zero version: riesz_product_expand(centers) - 1.
SparseTrigPoly riesz_product_tail(const std::vector<Frequency>& centers);

// sum_j sigma_j cos(2 pi <c^j, x>) prod_{k<j} (1 + cos 2 pi <c^k, x>).
// signs[j] must be +-1; the coefficient at q is sigma_{top(q)} 2^{-weight(q)}.
SparseTrigPoly z_polynomial(const std::vector<Frequency>& centers, const std::vector<int>& signs);

// Alternating signs sigma_j = (-1)^j for j = 1..s (so sigma_1 = -1).
std::vector<int> alternating_signs(int s);

// sum_j e^{2 pi i <c^j, x>} prod_{k<j} (1 + cos 2 pi <c^k, x>).
// Support is the half of the sum set with zeta_top = +1; coefficients are
// 2^{-(weight-1)}.
SparseTrigPoly exp_polynomial(const std::vector<Frequency>& centers);

// Centers 4^{j-1} * dir for j = 1..s; the default direction (1,0) gives the
// smallest collinear family with unique signed sums.
std::vector<Frequency> power_centers(int s, const Frequency& dir = freq(1, 0), unsigned ratio = 4);

}  // namespace rieszlab
