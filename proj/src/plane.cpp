#include "rieszlab/plane.hpp"

#include "rieszlab/errors.hpp"
#include "rieszlab/phase.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rieszlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSigmas = 3.0;  // standard-error multiple in reported error bounds
constexpr std::uint64_t kBatch = 4096;

// sup over t of |F'(t)/F(t)|.  For a = 2 pi t with |a| >= 3:
//   |dF/da| = |-8 - 4 cos a + 12 sin(a)/a| / a^3 <= 16 / |a|^3,
//   F = (4/a^2)(1 - sin(a)/a) >= (4/a^2)(2/3),
// so |F'/F| = 2 pi |dF/da| / F <= 2 pi * 16 * 3 / (8 |a|) = 12 pi / |a| <= 4 pi.
// On |a| <= 3 the quotient is monotone-ish and peaks below 2 (checked in the
// unit tests by direct scan), so 4 pi bounds it everywhere.
constexpr double kLogDerivSup = 4.0 * kPi;

BigRat pow2_rat(int e) {
    if (e >= 0) return BigRat(BigInt(1) << e);
    return BigRat(BigInt(1), BigInt(1) << (-e));
}

BigInt floor_rat(const BigRat& r) {
    BigInt n = numer(r), d = denom(r);  // d > 0 canonical
    BigInt q = n / d;
    if (q * d != n && n < 0) --q;
    return q;
}

}  // namespace

// --- kernels -----------------------------------------------------------------

double g_kernel(double t) {
    double v = 1.0 - std::fabs(t);
    return v > 0.0 ? v * v : 0.0;
}

double tensor_kernel(double u1, double u2) { return g_kernel(u1) * g_kernel(u2); }

double fejer_sq_density(double t) {
    const double a = kTwoPi * t;
    const double a2 = a * a;
    if (std::fabs(a) < 0.25) {
        // (4/a^2)(1 - sin a / a) = 2/3 - a^2/30 + a^4/1260 - a^6/90720 + ...
        return 2.0 / 3.0 + a2 * (-1.0 / 30.0 + a2 * (1.0 / 1260.0 - a2 / 90720.0));
    }
    return (4.0 / a2) * (1.0 - std::sin(a) / a);
}

namespace {

// dF/da where F(t) = (4/a^2)(1 - sin a / a), a = 2 pi t.
double fejer_sq_dFda(double a) {
    if (std::fabs(a) < 0.25) {
        // -a/15 + a^3/315 - a^5/15120 + ...
        const double a2 = a * a;
        return a * (-1.0 / 15.0 + a2 * (1.0 / 315.0 - a2 / 15120.0));
    }
    return (-8.0 - 4.0 * std::cos(a) + 12.0 * std::sin(a) / a) / (a * a * a);
}

}  // namespace

double fejer_sq_density_derivative(double t) { return kTwoPi * fejer_sq_dFda(kTwoPi * t); }

// --- signed-sum enumeration ----------------------------------------------------

namespace {

// DFS over the nonzero sign patterns of the center ladder; each node extends
// its parent's pattern by one later level, so a node's value per sample is
// parent value times one level phasor.  The order is the single source of
// truth shared by every builder and by the estimator.
struct SumNode {
    int parent;  // index into the node list, -1 for a root
    int level;   // 0-based center index
    int sign;    // +1 or -1
};

struct SumTree {
    std::vector<SumNode> nodes;
    std::vector<BumpAtom> atoms;  // aligned with nodes
    bool off_axis = true;         // no signed sum has a zero first coordinate
};

void extend_tree(SumTree& tree, const std::vector<Frequency>& centers, int parent, int next_level,
                 const Frequency& q, int chi) {
    for (int k = next_level; k < static_cast<int>(centers.size()); ++k) {
        for (int sign : {+1, -1}) {
            Frequency p = sign > 0 ? q + centers[k] : q - centers[k];
            BumpAtom atom;
            atom.center = p;
            atom.weight = std::ldexp(1.0, -(chi + 1));
            if (p.k1 != 0) {
                atom.sigma = to_double(BigRat(BigRat(p.k2) / BigRat(p.k1)));
                atom.inv_q1 = to_double(BigRat(BigRat(1) / BigRat(p.k1)));
            } else {
                tree.off_axis = false;
            }
            int idx = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({parent, k, sign});
            tree.atoms.push_back(std::move(atom));
            extend_tree(tree, centers, idx, k + 1, p, chi + 1);
        }
    }
}

SumTree build_sum_tree(const std::vector<Frequency>& centers) {
    SumTree tree;
    std::size_t total = 1;
    for (std::size_t k = 0; k < centers.size(); ++k) total *= 3;
    tree.nodes.reserve(total);
    tree.atoms.reserve(total);
    extend_tree(tree, centers, -1, 0, Frequency{}, 0);
    return tree;
}

// --- PlaneFunction assembly ---------------------------------------------------

struct BumpData {
    std::vector<BumpAtom> atoms;
    int theta = 0;
    bool ratio = false;
};

PlaneFunction make_bump_sum(std::vector<BumpAtom> atoms, int theta, bool ratio,
                            std::vector<Frequency> levels, std::string tag) {
    auto data = std::make_shared<BumpData>();
    data->atoms = std::move(atoms);
    data->theta = theta;
    data->ratio = ratio;

    PlaneFunction fn;
    fn.theta = theta;
    fn.ratio_weighted = ratio;
    fn.atoms = data->atoms;
    fn.levels = std::move(levels);
    fn.smoothness_tag = std::move(tag);
    const double radius = std::ldexp(1.0, -theta);
    fn.support.reserve(data->atoms.size());
    for (const auto& a : data->atoms) fn.support.push_back({a.center, radius});

    fn.eval_exact = [data](const RatVec2& xi) -> std::complex<double> {
        const BigRat r = pow2_rat(-data->theta);
        const BigInt scale = BigInt(1) << data->theta;
        std::complex<double> sum{0.0, 0.0};
        bool hit = false;
        for (const auto& a : data->atoms) {
            BigRat dx = xi.x1 - BigRat(a.center.k1);
            BigRat dy = xi.x2 - BigRat(a.center.k2);
            using boost::multiprecision::abs;
            if (abs(dx) < r && abs(dy) < r) {
                sum += a.weight * tensor_kernel(to_double(BigRat(dx * scale)),
                                                to_double(BigRat(dy * scale)));
                hit = true;
            }
        }
        if (!hit || sum == std::complex<double>{0.0, 0.0}) return {0.0, 0.0};
        if (data->ratio) {
            // gated at construction: every bump stays off the xi1 = 0 axis
            sum *= to_double(BigRat(xi.x2 / xi.x1));
        }
        return sum;
    };
    fn.eval = [fe = fn.eval_exact](double x1, double x2) {
        return fe(RatVec2{BigRat(x1), BigRat(x2)});
    };
    return fn;
}

void validate_sum_set(const IntegerScheme& scheme) {
    SumSet::build(scheme.centers);  // throws RepresentationCollision on failure
}

void check_bump_gate(const IntegerScheme& scheme, int theta) {
    if (theta < 0) throw ConfigError("bump width exponent must be >= 0");
    BigInt sep = min_sum_separation(scheme);
    if ((sep << theta) <= 2) {
        std::ostringstream os;
        os << "bump half-width 2^-" << theta << " is not below half the minimal sum-set "
           << "separation " << sep.str();
        throw BumpOverlap(os.str());
    }
}

}  // namespace

// --- lattice transfer -----------------------------------------------------------

PlaneFunction tensor_kernel_fn(int theta) {
    std::vector<BumpAtom> atoms(1);
    atoms[0].center = Frequency{};
    atoms[0].weight = 1.0;
    return make_bump_sum(std::move(atoms), theta, false, {}, "squared_triangle_tensor");
}

PlaneFunction fejer_transfer(const std::map<Frequency, std::complex<double>>& phi) {
    std::vector<BumpAtom> atoms;
    atoms.reserve(phi.size());
    for (const auto& [n, c] : phi) {
        BumpAtom a;
        a.center = n;
        a.weight = c;
        atoms.push_back(std::move(a));
    }
    PlaneFunction fn = make_bump_sum(std::move(atoms), 0, false, {}, "lattice_transfer");

    // Radius-1 bumps at adjacent lattice points overlap, so the generic scan
    // works but a lattice-local lookup is both faster and exact: only the
    // floor/ceil neighbours of the point can contribute.
    auto table = std::make_shared<std::map<Frequency, std::complex<double>>>(phi);
    fn.eval_exact = [table](const RatVec2& xi) -> std::complex<double> {
        const BigInt f1 = floor_rat(xi.x1), f2 = floor_rat(xi.x2);
        std::complex<double> sum{0.0, 0.0};
        for (int d1 = 0; d1 <= 1; ++d1) {
            for (int d2 = 0; d2 <= 1; ++d2) {
                Frequency n{f1 + d1, f2 + d2};
                auto it = table->find(n);
                if (it == table->end()) continue;
                double u1 = to_double(BigRat(BigRat(n.k1) - xi.x1));
                double u2 = to_double(BigRat(BigRat(n.k2) - xi.x2));
                sum += it->second * tensor_kernel(u1, u2);
            }
        }
        return sum;
    };
    fn.eval = [fe = fn.eval_exact](double x1, double x2) {
        return fe(RatVec2{BigRat(x1), BigRat(x2)});
    };
    return fn;
}

std::map<Frequency, std::complex<double>> dilated_sum_coefficients(const IntegerScheme& scheme,
                                                                   int theta) {
    validate_sum_set(scheme);
    SumTree tree = build_sum_tree(scheme.centers);
    std::map<Frequency, std::complex<double>> phi;
    for (const auto& a : tree.atoms)
        phi.emplace(Frequency{a.center.k1 << theta, a.center.k2 << theta}, a.weight);
    return phi;
}

BigInt min_sum_separation(const IntegerScheme& scheme) {
    SumSet sums = SumSet::build(scheme.centers);
    std::vector<const Frequency*> pts;
    pts.reserve(sums.size());
    for (const auto& [q, rep] : sums.points()) pts.push_back(&q);
    if (pts.size() < 2) return BigInt(1) << 62;  // single bump never overlaps
    BigInt best = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            BigInt d1 = big_abs(pts[i]->k1 - pts[j]->k1);
            BigInt d2 = big_abs(pts[i]->k2 - pts[j]->k2);
            BigInt d = d1 > d2 ? d1 : d2;
            if (best < 0 || d < best) best = d;
        }
    }
    return best;
}

PlaneFunction h_theta(const IntegerScheme& scheme, int theta) {
    check_bump_gate(scheme, theta);
    SumTree tree = build_sum_tree(scheme.centers);
    return make_bump_sum(std::move(tree.atoms), theta, false, scheme.centers,
                         "disjoint_weighted_bumps");
}

PlaneFunction ratio_bump_sum(const IntegerScheme& scheme, int theta) {
    check_bump_gate(scheme, theta);
    SumTree tree = build_sum_tree(scheme.centers);
    if (!tree.off_axis)
        throw ConfigError("a signed sum of the centers lies on the xi1 = 0 axis; "
                          "the ratio weight is unbounded there");
    return make_bump_sum(std::move(tree.atoms), theta, true, scheme.centers,
                         "ratio_weighted_bumps");
}

// --- Monte Carlo L1 of the inverse transform -----------------------------------

namespace {

// Draw t from the density F = fejer_sq_density by rejection against the
// envelope min(2/3, 5/(4 pi^2 t^2)).  The envelope dominates: F(0) = 2/3 is
// the global maximum, and a^2 F = 4(1 - sin a/a) <= 4(1 + 0.2173) < 5.
// Acceptance rate ~ 0.86; the draw count per attempt is fixed, so the stream
// stays reproducible across block replays.
double sample_density(phasekit::BatchRng& rng) {
    static const double t0 = std::sqrt(15.0 / 8.0) / kPi;  // envelope crossover
    static const double core_mass = (4.0 / 3.0) * t0;
    static const double tail_mass = 5.0 / (2.0 * kPi * kPi * t0);
    static const double total = core_mass + tail_mass;
    for (;;) {
        const double u = rng.next_unit() * total;
        double t, env;
        if (u < core_mass) {
            t = (2.0 * rng.next_unit() - 1.0) * t0;
            env = 2.0 / 3.0;
            rng.next();  // keep the per-attempt draw count fixed
        } else {
            double v = rng.next_unit();
            if (v < 0x1p-300) v = 0x1p-300;
            t = t0 / v;
            if (rng.next() & 1) t = -t;
            env = 5.0 / (4.0 * kPi * kPi * t * t);
        }
        if (rng.next_unit() * env <= fejer_sq_density(t)) return t;
    }
}

// Fixed-point image of y at kappa = theta + 64 W fractional bits, modulo
// 2^(64 W): the double's 53 mantissa bits land at their exact positions and
// every bit below them is dithered uniformly.  Bits at or above 2^(64 W)
// contribute whole turns to every phase <q, 2^theta y> and are dropped.
void y_to_words(double y, int theta, int W, phasekit::BatchRng& rng, std::uint64_t* out) {
    for (int w = 0; w < W; ++w) out[w] = rng.next();
    if (y == 0.0) return;
    int e = 0;
    const double m = std::frexp(std::fabs(y), &e);
    const auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));  // in [2^52, 2^53)
    const long shift = static_cast<long>(theta) + 64L * W + e - 53;
    if (shift >= 64L * W) {
        // mantissa entirely above the kept words: only the dither survives
    } else if (shift < 0) {
        for (int w = 1; w < W; ++w) out[w] = 0;
        out[0] = -shift < 64 ? (mant >> -shift) : 0;
    } else {
        const int ws = static_cast<int>(shift / 64), sb = static_cast<int>(shift % 64);
        for (int w = ws + 1; w < W; ++w) out[w] = 0;
        out[ws] &= sb == 0 ? 0ULL : (~0ULL >> (64 - sb));
        const unsigned __int128 v = static_cast<unsigned __int128>(mant) << sb;
        out[ws] |= static_cast<std::uint64_t>(v);
        if (ws + 1 < W) out[ws + 1] |= static_cast<std::uint64_t>(v >> 64);
    }
    if (y < 0.0) {
        std::uint64_t carry = 1;
        for (int w = 0; w < W; ++w) {
            out[w] = ~out[w] + carry;
            carry = carry != 0 && out[w] == 0 ? 1 : 0;
        }
    }
}

struct EstimatorPlan {
    int W = 1;
    int theta = 0;
    bool ratio = false;
    double h = 1.0;  // 2^-theta
    // per-atom residues (both paths) and constants
    std::vector<std::uint64_t> r1, r2;  // atom path: count * W words
    std::vector<double> w_re, w_im;
    std::vector<double> w_sigma, w_invq1, w_sigma_invq1;
    // level path
    bool use_levels = false;
    std::vector<std::uint64_t> lev_r1, lev_r2;  // levels * W
    std::vector<SumNode> nodes;
    std::size_t count = 0;
    std::size_t levels = 0;
    // honest error terms
    double tail_bound = 0.0;
    double remainder_bound = 0.0;
};

// Closed-form bound on the L1 norm of the inverse transform of the curvature
// part of the ratio weight across one bump: the weight minus its value and
// its linear expansion at the center, times the bump.  Pulled back to the
// unit square u, psi(u) = rho(h u) g(u1) g(u2) with
//     rho(d) = -(d2 - sigma d1) d1 / (q1 (q1 + d1)),   |d_i| <= h,
// which is linear in d2 and vanishes on d1 = 0.  With q = |q1|, D = q - h,
// the plain sups s_ab of |d^a_1 d^b_2 rho| over the square follow from the
// product rule; the transform bound is the two-parameter box-splitting
// estimate ||F^-1 psi||_1 <= (2/pi^2)(sqrt(M00 M22) + sqrt(M20 M02)) where
// M_ab integrates |d^a_1 d^b_2 psi| as a measure (g'' carries the atom
// -4 delta_0, but rho's zero on d1 = 0 kills every atom term except inside
// M02/M22, which the formulas below include via the total-variation factors).
double ratio_curvature_bound(double sigma_abs, double q1_abs, double h) {
    const double q = q1_abs, D = q - h;
    if (D <= 0.0) return std::numeric_limits<double>::infinity();
    const double s = sigma_abs;
    const double qD = q * D, qD2 = qD * D, qD3 = qD2 * D;
    const double h2 = h * h, h3 = h2 * h;
    const double s00 = h2 * (1.0 + s) / qD;
    const double s10 = h2 * ((1.0 + 2.0 * s) / qD + h * (1.0 + s) / qD2);
    const double s01 = h2 / qD;
    const double s20 = h2 * (2.0 * s / qD + 2.0 * h * (1.0 + 2.0 * s) / qD2 +
                             2.0 * h2 * (1.0 + s) / qD3);
    const double s11 = h2 * (1.0 / qD + h / qD2);
    const double s21 = h3 * (2.0 / qD2 + 2.0 * h / qD3);
    const double M00 = (4.0 / 9.0) * s00;
    const double M20 = (4.0 / 9.0) * s20 + (8.0 / 3.0) * s10 + (8.0 / 3.0) * s00;
    const double M02 = (8.0 / 3.0) * (s01 + 2.0 * s00);
    const double M22 = (8.0 / 3.0) * s21 + 16.0 * s11 + 16.0 * s01 +
                       8.0 * ((2.0 / 3.0) * s20 + 4.0 * s10 + 4.0 * s00);
    return (2.0 / (kPi * kPi)) * (std::sqrt(M00 * M22) + std::sqrt(M20 * M02));
}

EstimatorPlan make_plan(const PlaneFunction& fn, double truncation_radius) {
    if (truncation_radius <= 1.0) throw ConfigError("truncation radius must exceed 1");
    if (fn.atoms.empty())
        throw ConfigError("inverse-transform norm needs the bump-sum structure of the function");

    EstimatorPlan plan;
    plan.theta = fn.theta;
    plan.ratio = fn.ratio_weighted;
    plan.h = std::ldexp(1.0, -fn.theta);
    plan.count = fn.atoms.size();

    unsigned maxbits = 0;
    for (const auto& a : fn.atoms) {
        maxbits = std::max(maxbits, bit_length(a.center.k1));
        maxbits = std::max(maxbits, bit_length(a.center.k2));
    }
    plan.W = phasekit::words_for_bits(maxbits);
    if (plan.W > phasekit::kMaxWords)
        throw ResourceExceeded("frequencies need more phase words than the engine width");
    const int W = plan.W;

    double sum_w = 0.0, sum_ws = 0.0, sum_winv = 0.0, sum_wsinv = 0.0;
    plan.w_re.reserve(plan.count);
    for (const auto& a : fn.atoms) {
        plan.w_re.push_back(a.weight.real());
        plan.w_im.push_back(a.weight.imag());
        const double wa = std::abs(a.weight);
        sum_w += wa;
        if (plan.ratio) {
            plan.w_sigma.push_back(a.weight.real() * a.sigma);
            plan.w_invq1.push_back(a.weight.real() * a.inv_q1);
            plan.w_sigma_invq1.push_back(a.weight.real() * a.sigma * a.inv_q1);
            sum_ws += wa * std::fabs(a.sigma);
            sum_winv += wa * std::fabs(a.inv_q1);
            sum_wsinv += wa * std::fabs(a.sigma * a.inv_q1);
            plan.remainder_bound +=
                wa * ratio_curvature_bound(std::fabs(a.sigma),
                                           std::fabs(to_double(a.center.k1)), plan.h);
        }
    }

    // P(|y|_inf > R) <= 8/(pi^2 R): F <= 2/(pi^2 t^2) past |t| = 1.
    const double tail_prob = 8.0 / (kPi * kPi * truncation_radius);
    plan.tail_bound = plan.ratio
                          ? tail_prob * (sum_ws + plan.h * (kLogDerivSup / kTwoPi) *
                                                      (sum_winv + sum_wsinv))
                          : tail_prob * sum_w;

    if (!fn.levels.empty() && fn.levels.size() <= 64) {
        SumTree tree = build_sum_tree(fn.levels);
        if (tree.atoms.size() != fn.atoms.size())
            throw ConfigError("level ladder does not match the atom list");
        plan.use_levels = true;
        plan.nodes = std::move(tree.nodes);
        plan.levels = fn.levels.size();
        plan.lev_r1.resize(plan.levels * W);
        plan.lev_r2.resize(plan.levels * W);
        for (std::size_t k = 0; k < plan.levels; ++k) {
            auto rw1 = phasekit::residue_words(fn.levels[k].k1, W);
            auto rw2 = phasekit::residue_words(fn.levels[k].k2, W);
            std::copy_n(rw1.begin(), W, plan.lev_r1.begin() + k * W);
            std::copy_n(rw2.begin(), W, plan.lev_r2.begin() + k * W);
        }
    } else {
        plan.r1.resize(plan.count * W);
        plan.r2.resize(plan.count * W);
        for (std::size_t t = 0; t < plan.count; ++t) {
            auto rw1 = phasekit::residue_words(fn.atoms[t].center.k1, W);
            auto rw2 = phasekit::residue_words(fn.atoms[t].center.k2, W);
            std::copy_n(rw1.begin(), W, plan.r1.begin() + t * W);
            std::copy_n(rw2.begin(), W, plan.r2.begin() + t * W);
        }
    }
    return plan;
}

// |A| (plain) or |B0 + (h / 2 pi i)(Fl(y2) B1 - Fl(y1) B2)| (ratio) at one
// sample; zre/zim are scratch of size count for the level path.
double sample_value(const EstimatorPlan& plan, const std::uint64_t* j1, const std::uint64_t* j2,
                    double y1, double y2, double* zre, double* zim) {
    const auto& sc = phasekit::fast_sincos();
    const int W = plan.W;
    double b0re = 0.0, b0im = 0.0, b1re = 0.0, b1im = 0.0, b2re = 0.0, b2im = 0.0;
    double are = 0.0, aim = 0.0;

    if (plan.use_levels) {
        double lre[64], lim[64];
        for (std::size_t k = 0; k < plan.levels; ++k) {
            const std::uint64_t top =
                phasekit::phase_top_word(&plan.lev_r1[k * W], &plan.lev_r2[k * W], j1, j2, W);
            double sa, ca;
            sc.eval_u64(top, sa, ca);
            lre[k] = ca;
            lim[k] = sa;
        }
        for (std::size_t t = 0; t < plan.count; ++t) {
            const SumNode& nd = plan.nodes[t];
            const double pre = nd.parent < 0 ? 1.0 : zre[nd.parent];
            const double pim = nd.parent < 0 ? 0.0 : zim[nd.parent];
            const double fre = lre[nd.level];
            const double fim = nd.sign > 0 ? lim[nd.level] : -lim[nd.level];
            const double re = pre * fre - pim * fim;
            const double im = pre * fim + pim * fre;
            zre[t] = re;
            zim[t] = im;
            if (plan.ratio) {
                b0re += plan.w_sigma[t] * re;
                b0im += plan.w_sigma[t] * im;
                b1re += plan.w_invq1[t] * re;
                b1im += plan.w_invq1[t] * im;
                b2re += plan.w_sigma_invq1[t] * re;
                b2im += plan.w_sigma_invq1[t] * im;
            } else {
                are += plan.w_re[t] * re - plan.w_im[t] * im;
                aim += plan.w_re[t] * im + plan.w_im[t] * re;
            }
        }
    } else {
        for (std::size_t t = 0; t < plan.count; ++t) {
            const std::uint64_t top =
                phasekit::phase_top_word(&plan.r1[t * W], &plan.r2[t * W], j1, j2, W);
            double sa, ca;
            sc.eval_u64(top, sa, ca);
            if (plan.ratio) {
                b0re += plan.w_sigma[t] * ca;
                b0im += plan.w_sigma[t] * sa;
                b1re += plan.w_invq1[t] * ca;
                b1im += plan.w_invq1[t] * sa;
                b2re += plan.w_sigma_invq1[t] * ca;
                b2im += plan.w_sigma_invq1[t] * sa;
            } else {
                are += plan.w_re[t] * ca - plan.w_im[t] * sa;
                aim += plan.w_re[t] * sa + plan.w_im[t] * ca;
            }
        }
    }

    if (!plan.ratio) return std::sqrt(are * are + aim * aim);

    const double fl1 = fejer_sq_density_derivative(y1) / fejer_sq_density(y1);
    const double fl2 = fejer_sq_density_derivative(y2) / fejer_sq_density(y2);
    // (h / (2 pi i)) (fl2 B1 - fl1 B2) = -i (h / 2 pi)(fl2 B1 - fl1 B2)
    const double c = plan.h / kTwoPi;
    const double dre = c * (fl2 * b1re - fl1 * b2re);
    const double dim = c * (fl2 * b1im - fl1 * b2im);
    const double re = b0re + dim;   // -i (dre + i dim) = dim - i dre
    const double im = b0im - dre;
    return std::sqrt(re * re + im * im);
}

}  // namespace

NormEstimate inv_ft_l1(const PlaneFunction& fn, double truncation_radius,
                       const QuadratureSpec& spec) {
    const EstimatorPlan plan = make_plan(fn, truncation_radius);
    const std::uint64_t samples = std::max<std::uint64_t>(1, spec.mc_samples);
    const std::uint64_t nbatch = (samples + kBatch - 1) / kBatch;
    std::vector<double> bsum(nbatch, 0.0), bsum2(nbatch, 0.0);
    const double R = truncation_radius;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nbatch); ++b) {
        phasekit::BatchRng rng(spec.seed, static_cast<std::uint64_t>(b));
        const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBatch;
        const std::uint64_t hi = std::min(samples, lo + kBatch);
        std::vector<double> zre(plan.count), zim(plan.count);
        std::uint64_t j1[phasekit::kMaxWords], j2[phasekit::kMaxWords];
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t k = lo; k < hi; ++k) {
            const double y1 = sample_density(rng);
            const double y2 = sample_density(rng);
            if (std::fabs(y1) > R || std::fabs(y2) > R) continue;
            y_to_words(y1, plan.theta, plan.W, rng, j1);
            y_to_words(y2, plan.theta, plan.W, rng, j2);
            const double v = sample_value(plan, j1, j2, y1, y2, zre.data(), zim.data());
            s += v;
            s2 += v * v;
        }
        bsum[b] = s;
        bsum2[b] = s2;
    }

    const double n = static_cast<double>(samples);
    const double mean = pairwise_sum(bsum) / n;
    double var = (pairwise_sum(bsum2) - n * mean * mean) / (n > 1 ? n - 1.0 : 1.0);
    if (var < 0.0) var = 0.0;

    NormEstimate e;
    e.value = mean;
    e.error_bound = kSigmas * std::sqrt(var / n) + plan.tail_bound + plan.remainder_bound;
    e.method = NormMethod::MonteCarlo;
    e.samples_or_gridsize = samples;
    e.rng_seed = spec.seed;
    return e;
}

NormEstimate ratio_multiplier_l1(const IntegerScheme& scheme, int theta,
                                 const QuadratureSpec& spec) {
    return inv_ft_l1(ratio_bump_sum(scheme, theta), 2048.0, spec);
}

ThetaChoice theta_search(const IntegerScheme& scheme, const QuadratureSpec& spec, double rel_tol,
                         int theta_max) {
    const BigInt sep = min_sum_separation(scheme);
    int start = -1;
    for (int t = 1; t <= theta_max; ++t) {
        if ((sep << t) > 2) {
            start = t;
            break;
        }
    }
    if (start < 0)
        throw NoStabilization("no width up to 2^-" + std::to_string(theta_max) +
                              " keeps the bumps disjoint");

    ThetaChoice choice;
    choice.s = scheme.s;
    NormEstimate prev = ratio_multiplier_l1(scheme, start, spec);
    choice.search_trace.emplace_back(start, prev);
    for (int t = start + 1; t <= theta_max; ++t) {
        NormEstimate cur = ratio_multiplier_l1(scheme, t, spec);
        choice.search_trace.emplace_back(t, cur);
        if (std::fabs(cur.value - prev.value) <= rel_tol * std::fabs(prev.value)) {
            choice.theta = t;
            choice.ratio_norm = cur;
            return choice;
        }
        prev = cur;
    }
    throw NoStabilization("ratio norm did not settle within widths up to 2^-" +
                          std::to_string(theta_max));
}

// --- reference implementation ---------------------------------------------------

namespace reference {

double plane_l1_mc(const PlaneFunction& fn, double truncation_radius, std::uint64_t samples,
                   std::uint64_t seed) {
    QuadratureSpec probe;
    probe.mc_samples = samples;
    probe.seed = seed;
    const EstimatorPlan plan = make_plan(fn, truncation_radius);
    const int W = plan.W;
    const BigInt modulus = BigInt(1) << (64 * W);
    const std::uint64_t nbatch = (samples + kBatch - 1) / kBatch;
    std::vector<double> bsum(nbatch, 0.0);

    auto words_to_int = [W](const std::uint64_t* wds) {
        BigInt v = 0;
        for (int w = W - 1; w >= 0; --w) {
            v <<= 64;
            v += wds[w];
        }
        return v;
    };

    for (std::uint64_t b = 0; b < nbatch; ++b) {
        phasekit::BatchRng rng(seed, b);
        const std::uint64_t lo = b * kBatch;
        const std::uint64_t hi = std::min(samples, lo + kBatch);
        std::uint64_t j1[phasekit::kMaxWords], j2[phasekit::kMaxWords];
        double s = 0.0;
        for (std::uint64_t k = lo; k < hi; ++k) {
            const double y1 = sample_density(rng);
            const double y2 = sample_density(rng);
            if (std::fabs(y1) > truncation_radius || std::fabs(y2) > truncation_radius) continue;
            y_to_words(y1, plan.theta, W, rng, j1);
            y_to_words(y2, plan.theta, W, rng, j2);
            const BigInt n1 = words_to_int(j1), n2 = words_to_int(j2);
            std::complex<double> b0{0.0, 0.0}, b1{0.0, 0.0}, b2{0.0, 0.0}, a{0.0, 0.0};
            for (std::size_t t = 0; t < fn.atoms.size(); ++t) {
                const auto& atom = fn.atoms[t];
                BigInt p = (atom.center.k1 * n1 + atom.center.k2 * n2) % modulus;
                if (p < 0) p += modulus;
                const double phase =
                    (p >> (64 * W - 64)).convert_to<double>() * 0x1p-64;
                const std::complex<double> z{std::cos(kTwoPi * phase),
                                             std::sin(kTwoPi * phase)};
                if (plan.ratio) {
                    b0 += plan.w_sigma[t] * z;
                    b1 += plan.w_invq1[t] * z;
                    b2 += plan.w_sigma_invq1[t] * z;
                } else {
                    a += atom.weight * z;
                }
            }
            double v;
            if (plan.ratio) {
                const double fl1 = fejer_sq_density_derivative(y1) / fejer_sq_density(y1);
                const double fl2 = fejer_sq_density_derivative(y2) / fejer_sq_density(y2);
                const std::complex<double> corr =
                    std::complex<double>(0.0, -plan.h / kTwoPi) * (fl2 * b1 - fl1 * b2);
                v = std::abs(b0 + corr);
            } else {
                v = std::abs(a);
            }
            s += v;
        }
        bsum[b] = s;
    }
    return pairwise_sum(bsum) / static_cast<double>(samples);
}

}  // namespace reference

// --- smooth-cutoff inequality -----------------------------------------------------

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// recurrence; n is small and this runs once per table.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

constexpr int kCutoffNodes = 128;   // per-axis quadrature order
constexpr double kCutoffZ = 20.0;   // spatial half-width of the outer grid
constexpr double kCutoffDz = 0.25;  // outer grid step

// || F^-1 (eta_eps f) ||_L1 equals, after xi = eps zeta, the L1 norm of the
// transform of K(zeta) = eta(zeta) f(eps zeta) over the unit square; computed
// by separable two-stage oscillatory quadrature on a truncated z-grid with a
// geometric-decay estimate for the dropped annulus.
double cutoff_lhs(const CutoffField& f, const CutoffDescriptor& eta, double eps) {
    static const auto gl = [] {
        std::pair<std::vector<double>, std::vector<double>> p;
        gauss_legendre(kCutoffNodes, p.first, p.second);
        return p;
    }();
    const std::vector<double>& nodes = gl.first;
    const std::vector<double>& weights = gl.second;
    const int n = kCutoffNodes;
    const int nz = static_cast<int>(std::round(2.0 * kCutoffZ / kCutoffDz));

    std::vector<double> K(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            K[a * n + b] = eta.eval(nodes[a], nodes[b]) * f.eval(eps * nodes[a], eps * nodes[b]);

    std::vector<double> zs(nz);
    for (int i = 0; i < nz; ++i) zs[i] = -kCutoffZ + (i + 0.5) * kCutoffDz;

    // phase tables e^{2 pi i node_a z_i}
    std::vector<std::complex<double>> ph(static_cast<std::size_t>(n) * nz);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < nz; ++i)
            ph[a * nz + i] = std::polar(1.0, kTwoPi * nodes[a] * zs[i]);

    // stage 1: T[a][i2] = sum_b w_b K[a][b] e^{2 pi i node_b z_i2}
    std::vector<std::complex<double>> T(static_cast<std::size_t>(n) * nz);
    for (int a = 0; a < n; ++a) {
        for (int i2 = 0; i2 < nz; ++i2) {
            std::complex<double> acc{0.0, 0.0};
            for (int bnode = 0; bnode < n; ++bnode)
                acc += weights[bnode] * K[a * n + bnode] * ph[bnode * nz + i2];
            T[a * nz + i2] = acc;
        }
    }

    // stage 2 with ring bookkeeping for the tail heuristic
    double total = 0.0, ring_last = 0.0, ring_prev = 0.0;
    for (int i1 = 0; i1 < nz; ++i1) {
        for (int i2 = 0; i2 < nz; ++i2) {
            std::complex<double> acc{0.0, 0.0};
            for (int a = 0; a < n; ++a) acc += weights[a] * T[a * nz + i2] * ph[a * nz + i1];
            const double cell = std::abs(acc) * kCutoffDz * kCutoffDz;
            total += cell;
            const double rinf = std::max(std::fabs(zs[i1]), std::fabs(zs[i2]));
            if (rinf > kCutoffZ - 1.0)
                ring_last += cell;
            else if (rinf > kCutoffZ - 2.0)
                ring_prev += cell;
        }
    }
    double tail = 0.0;
    if (ring_prev > 0.0) {
        const double ratio = std::min(ring_last / ring_prev, 0.9);
        tail = ring_last * ratio / (1.0 - ratio);
    }
    return total + tail;
}

// sup over the unit ball of sum_{|alpha| <= 3} |D^alpha f| via tensorized
// central differences.
double cutoff_derivative_sum(const CutoffField& f) {
    const double h = 1e-3;
    struct Stencil {
        int offs[4];
        double coef[4];
        int len;
    };
    const Stencil st[4] = {
        {{0, 0, 0, 0}, {1.0, 0, 0, 0}, 1},
        {{-1, 1, 0, 0}, {-0.5, 0.5, 0, 0}, 2},
        {{-1, 0, 1, 0}, {1.0, -2.0, 1.0, 0}, 3},
        {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}, 4},
    };
    const double hp[4] = {1.0, h, h * h, h * h * h};

    auto deriv = [&](double x, double y, int a, int bord) {
        double acc = 0.0;
        for (int i = 0; i < st[a].len; ++i)
            for (int j = 0; j < st[bord].len; ++j)
                acc += st[a].coef[i] * st[bord].coef[j] *
                       f.eval(x + st[a].offs[i] * h, y + st[bord].offs[j] * h);
        return acc / (hp[a] * hp[bord]);
    };

    double best = 0.0;
    auto visit = [&](double x, double y) {
        double sum = 0.0;
        for (int a = 0; a <= 3; ++a)
            for (int bord = 0; a + bord <= 3; ++bord) sum += std::fabs(deriv(x, y, a, bord));
        best = std::max(best, sum);
    };
    visit(0.0, 0.0);
    const int nr = 24, na = 48;
    for (int j = 1; j <= nr; ++j) {
        const double r = static_cast<double>(j) / nr;
        for (int i = 0; i < na; ++i) {
            const double phi = kTwoPi * i / na;
            visit(r * std::cos(phi), r * std::sin(phi));
        }
    }
    return best;
}

}  // namespace

CutoffField constant_field() {
    return {"one", [](double, double) { return 1.0; }};
}

CutoffField coordinate_field() {
    return {"xi1", [](double x1, double) { return x1; }};
}

CutoffField ratio_remainder_field(const RatVec2& q, std::optional<double> a_scale) {
    const double q1 = to_double(q.x1), q2 = to_double(q.x2);
    const double a = a_scale.value_or(std::fabs(q1) / 2.0);
    if (!(std::fabs(q1) > std::fabs(a)))
        throw ConfigError("ratio field pole must stay outside the unit ball");
    CutoffField f;
    f.name = "ratio_at_" + std::to_string(q1) + "_" + std::to_string(q2);
    f.eval = [q1, q2, a](double x1, double x2) {
        return (q2 + a * x2) / (q1 + a * x1) - q2 / q1;
    };
    return f;
}

CutoffDescriptor standard_mollifier() {
    return {"exp_bump", [](double x1, double x2) {
                const double r2 = x1 * x1 + x2 * x2;
                if (r2 >= 1.0) return 0.0;
                return std::exp(1.0 - 1.0 / (1.0 - r2));
            }};
}

bool CutoffTable::all_hold() const {
    for (const auto& r : rows)
        if (!r.holds) return false;
    return !rows.empty();
}

double fit_cutoff_constant(const CutoffDescriptor& eta) {
    const double eps0 = 0.125;
    double c = 0.0;
    for (const CutoffField& f : {constant_field(), coordinate_field()}) {
        const double lhs = cutoff_lhs(f, eta, eps0);
        const double rhs_core = std::fabs(f.eval(0.0, 0.0)) + eps0 * cutoff_derivative_sum(f);
        c = std::max(c, lhs / rhs_core);
    }
    return 1.2 * c;
}

CutoffTable cutoff_bound_check(const CutoffField& f, const CutoffDescriptor& eta,
                               const std::vector<double>& epsilon_list,
                               std::optional<double> c_eta) {
    CutoffTable table;
    table.eta_name = eta.name;
    table.field_name = f.name;
    table.c_eta = c_eta ? *c_eta : fit_cutoff_constant(eta);
    table.derivative_sum = cutoff_derivative_sum(f);
    const double f0 = std::fabs(f.eval(0.0, 0.0));
    for (double eps : epsilon_list) {
        CutoffRow row;
        row.epsilon = eps;
        row.lhs = cutoff_lhs(f, eta, eps);
        row.rhs = table.c_eta * (f0 + eps * table.derivative_sum);
        row.holds = row.lhs <= row.rhs;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace rieszlab
