#include "rieszlab/torus_metrics.hpp"

#include "rieszlab/errors.hpp"
#include "rieszlab/phase.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rieszlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile
constexpr std::uint64_t kBatch = 4096;

std::uint64_t grid_side_for(const BigInt& max_coord) {
    if (max_coord == 0) return 1;
    std::uint64_t target = 4 * max_coord.convert_to<std::uint64_t>();
    std::uint64_t n = 1;
    while (n < target) n <<= 1;
    return n;
}

// sum over terms of |q_i| * |coeff|, as doubles (may be huge; that is honest).
void lipschitz_masses(const SparseTrigPoly& poly, double& s1, double& s2) {
    s1 = s2 = 0.0;
    for (const auto& [q, c] : poly.terms()) {
        double a = std::abs(c);
        s1 += to_double(big_abs(q.k1)) * a;
        s2 += to_double(big_abs(q.k2)) * a;
    }
}

struct GridTerm {
    std::int64_t r_out;  // q_outer mod 2 n_outer
    double re, im;
};
struct GridGroup {
    std::int64_t r_in;  // q_inner mod 2 n_inner
    std::vector<GridTerm> terms;
};

std::int64_t mod_residue(const BigInt& q, std::uint64_t m) {
    BigInt r = q % BigInt(m);
    if (r < 0) r += m;
    return r.convert_to<std::int64_t>();
}

// Midpoint-grid pass, streaming one outer row at a time.  The outer axis is
// the one with the larger grid so the row buffer stays small.
double grid_value(const SparseTrigPoly& poly, std::uint64_t n1, std::uint64_t n2) {
    const bool outer_is_x1 = n1 >= n2;
    const std::uint64_t n_out = outer_is_x1 ? n1 : n2;
    const std::uint64_t n_in = outer_is_x1 ? n2 : n1;

    // Group terms by inner-axis residue class.
    std::map<BigInt, GridGroup> groups;
    for (const auto& [q, c] : poly.terms()) {
        const BigInt& q_in = outer_is_x1 ? q.k2 : q.k1;
        const BigInt& q_out = outer_is_x1 ? q.k1 : q.k2;
        auto& g = groups[q_in];
        g.r_in = mod_residue(q_in, 2 * n_in);
        g.terms.push_back({mod_residue(q_out, 2 * n_out), c.real(), c.imag()});
    }
    std::vector<GridGroup> glist;
    glist.reserve(groups.size());
    for (auto& [k, g] : groups) glist.push_back(std::move(g));

    std::vector<double> row_sums(n_out, 0.0);

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<double> buf_re(n_in), buf_im(n_in);
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16)
#endif
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_out); ++i) {
            std::fill(buf_re.begin(), buf_re.end(), 0.0);
            std::fill(buf_im.begin(), buf_im.end(), 0.0);
            const std::int64_t tick_out = 2 * i + 1;
            for (const auto& g : glist) {
                double d_re = 0.0, d_im = 0.0;
                for (const auto& t : g.terms) {
                    std::int64_t m = (t.r_out * tick_out) % (2 * static_cast<std::int64_t>(n_out));
                    double a = kTwoPi * (static_cast<double>(m) / (2.0 * static_cast<double>(n_out)));
                    double sa = std::sin(a), ca = std::cos(a);
                    d_re += t.re * ca - t.im * sa;
                    d_im += t.re * sa + t.im * ca;
                }
                for (std::uint64_t j = 0; j < n_in; ++j) {
                    std::int64_t m = (g.r_in * (2 * static_cast<std::int64_t>(j) + 1)) %
                                     (2 * static_cast<std::int64_t>(n_in));
                    double a = kTwoPi * (static_cast<double>(m) / (2.0 * static_cast<double>(n_in)));
                    double sa = std::sin(a), ca = std::cos(a);
                    buf_re[j] += d_re * ca - d_im * sa;
                    buf_im[j] += d_re * sa + d_im * ca;
                }
            }
            double acc = 0.0;
            for (std::uint64_t j = 0; j < n_in; ++j)
                acc += std::sqrt(buf_re[j] * buf_re[j] + buf_im[j] * buf_im[j]);
            row_sums[i] = acc;
        }
    }
    return pairwise_sum(row_sums) / (static_cast<double>(n_out) * static_cast<double>(n_in));
}

NormEstimate mc_value(const SparseTrigPoly& poly, std::uint64_t samples, std::uint64_t seed) {
    const int W = phasekit::words_for_bits(bit_length(poly.max_abs_coord()));
    const auto table = phasekit::ResidueTable::build(poly, W);
    const auto& sc = phasekit::fast_sincos();
    const std::size_t m = table.count;

    const std::uint64_t nbatch = (samples + kBatch - 1) / kBatch;
    std::vector<double> bsum(nbatch, 0.0), bsum2(nbatch, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(nbatch); ++b) {
        phasekit::BatchRng rng(seed, static_cast<std::uint64_t>(b));
        const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBatch;
        const std::uint64_t hi = std::min(samples, lo + kBatch);
        double s = 0.0, s2 = 0.0;
        std::uint64_t j1[phasekit::kMaxWords], j2[phasekit::kMaxWords];
        for (std::uint64_t k = lo; k < hi; ++k) {
            for (int w = 0; w < W; ++w) j1[w] = rng.next();
            for (int w = 0; w < W; ++w) j2[w] = rng.next();
            double re = 0.0, im = 0.0;
            for (std::size_t t = 0; t < m; ++t) {
                std::uint64_t top = phasekit::phase_top_word(&table.r1[t * W], &table.r2[t * W],
                                                             j1, j2, W);
                double sa, ca;
                sc.eval_u64(top, sa, ca);
                re += table.c_re[t] * ca - table.c_im[t] * sa;
                im += table.c_re[t] * sa + table.c_im[t] * ca;
            }
            double v = std::sqrt(re * re + im * im);
            s += v;
            s2 += v * v;
        }
        bsum[b] = s;
        bsum2[b] = s2;
    }

    const double n = static_cast<double>(samples);
    const double mean = pairwise_sum(bsum) / n;
    double var = (pairwise_sum(bsum2) - n * mean * mean) / (n - 1.0);
    if (var < 0.0) var = 0.0;

    NormEstimate e;
    e.value = mean;
    e.error_bound = kZ99 * std::sqrt(var / n);
    e.method = NormMethod::MonteCarlo;
    e.samples_or_gridsize = samples;
    e.rng_seed = seed;
    return e;
}

}  // namespace

std::complex<double> eval_at(const SparseTrigPoly& poly, double x1, double x2) {
    return poly.eval(x1, x2);
}

NormEstimate l1_norm(const SparseTrigPoly& poly, const QuadratureSpec& spec) {
    if (poly.empty()) {
        NormEstimate e;
        e.method = NormMethod::GridExact;
        e.samples_or_gridsize = 1;
        return e;
    }

    if (spec.mode == QuadMode::MonteCarlo) return mc_value(poly, spec.mc_samples, spec.seed);

    BigInt m1 = 0, m2 = 0;
    for (const auto& [q, c] : poly.terms()) {
        m1 = std::max(m1, big_abs(q.k1));
        m2 = std::max(m2, big_abs(q.k2));
    }

    std::uint64_t n1, n2;
    if (spec.mode == QuadMode::FixedGrid) {
        n1 = n2 = std::max<std::uint64_t>(2, spec.fixed_n);
        double cost = static_cast<double>(n1) * static_cast<double>(n2) *
                      static_cast<double>(poly.support_size());
        if (cost > static_cast<double>(spec.max_point_evals) || n2 * 16 > spec.max_memory_hint)
            throw ResourceExceeded("l1_norm: fixed grid exceeds configured budget");
    } else {
        // AutoGrid: bail out to Monte Carlo when the resolving grid is huge.
        constexpr std::uint64_t kSideCap = std::uint64_t(1) << 28;
        std::size_t d1 = 0, d2 = 0;  // distinct coordinate values per axis
        {
            std::set<BigInt> s1v, s2v;
            for (const auto& [q, c] : poly.terms()) {
                s1v.insert(q.k1);
                s2v.insert(q.k2);
            }
            d1 = s1v.size();
            d2 = s2v.size();
        }
        auto stream_cost = [&](std::uint64_t a, std::uint64_t b) {
            double support = static_cast<double>(poly.support_size());
            return a >= b ? static_cast<double>(a) * (support + static_cast<double>(d2) * b)
                          : static_cast<double>(b) * (support + static_cast<double>(d1) * a);
        };
        bool too_big = bit_length(m1) > 30 || bit_length(m2) > 30;
        if (!too_big) {
            n1 = grid_side_for(m1);
            n2 = grid_side_for(m2);
            too_big = std::max(n1, n2) > kSideCap || std::min(n1, n2) * 16 > spec.max_memory_hint ||
                      stream_cost(n1, n2) > static_cast<double>(spec.max_point_evals);
        }
        if (too_big) {
            if (!spec.allow_mc_fallback)
                throw ResourceExceeded("l1_norm: resolving grid exceeds configured budget");
            return mc_value(poly, spec.mc_samples, spec.seed);
        }
        // The 4*max floor integrates the polynomial exactly but samples |poly|
        // too coarsely (4 points per top-frequency period alias |cos| badly),
        // so refine while the streamed pass stays cheap.
        const double refine_budget =
            static_cast<double>(std::min<std::uint64_t>(std::uint64_t(1) << 22, spec.max_point_evals));
        while (true) {
            std::uint64_t a = m1 > 0 ? 2 * n1 : n1;
            std::uint64_t b = m2 > 0 ? 2 * n2 : n2;
            if ((a == n1 && b == n2) || std::max(a, b) > kSideCap ||
                std::min(a, b) * 16 > spec.max_memory_hint || stream_cost(a, b) > refine_budget)
                break;
            n1 = a;
            n2 = b;
        }
    }

    NormEstimate e;
    e.value = grid_value(poly, n1, n2);
    double s1, s2;
    lipschitz_masses(poly, s1, s2);
    e.error_bound = 0.5 * std::numbers::pi *
                    (s1 / static_cast<double>(n1) + s2 / static_cast<double>(n2));
    bool resolves = BigInt(n1) >= 2 * m1 + 1 && BigInt(n2) >= 2 * m2 + 1;
    e.method = resolves ? NormMethod::GridExact : NormMethod::GridBounded;
    e.samples_or_gridsize = n1 * n2;
    return e;
}

std::vector<GrowthRow> growth_profile(GrowthBuilder builder,
                                      const std::function<std::vector<Frequency>(int)>& centers_for,
                                      int s_min, int s_max, const QuadratureSpec& spec) {
    std::vector<GrowthRow> rows;
    for (int s = s_min; s <= s_max; ++s) {
        auto centers = centers_for(s);
        SparseTrigPoly poly;
        switch (builder) {
            case GrowthBuilder::SymmetricZ:
                poly = z_polynomial(centers, alternating_signs(s));
                break;
            case GrowthBuilder::AsymmetricExp:
                poly = exp_polynomial(centers);
                break;
            case GrowthBuilder::ProductTail:
                poly = riesz_product_tail(centers);
                break;
        }
        GrowthRow row;
        row.s = s;
        row.norm = l1_norm(poly, spec);
        row.per_s = row.norm.value / s;
        rows.push_back(row);
    }
    return rows;
}

namespace reference {

double l1_grid(const SparseTrigPoly& poly, std::uint64_t n1, std::uint64_t n2) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < n1; ++i)
        for (std::uint64_t j = 0; j < n2; ++j) {
            double x1 = (2.0 * i + 1.0) / (2.0 * n1);
            double x2 = (2.0 * j + 1.0) / (2.0 * n2);
            acc += std::abs(poly.eval(x1, x2));
        }
    return acc / (static_cast<double>(n1) * static_cast<double>(n2));
}

double l1_mc(const SparseTrigPoly& poly, std::uint64_t samples, std::uint64_t seed) {
    const int W = phasekit::words_for_bits(bit_length(poly.max_abs_coord()));
    const BigInt mod = BigInt(1) << (64 * W);
    const std::uint64_t nbatch = (samples + kBatch - 1) / kBatch;
    std::vector<double> bsum(nbatch, 0.0);
    for (std::uint64_t b = 0; b < nbatch; ++b) {
        phasekit::BatchRng rng(seed, b);
        const std::uint64_t lo = b * kBatch;
        const std::uint64_t hi = std::min(samples, lo + kBatch);
        double s = 0.0;
        for (std::uint64_t k = lo; k < hi; ++k) {
            BigInt J1 = 0, J2 = 0;
            for (int w = 0; w < W; ++w) J1 += BigInt(rng.next()) << (64 * w);
            for (int w = 0; w < W; ++w) J2 += BigInt(rng.next()) << (64 * w);
            double re = 0.0, im = 0.0;
            for (const auto& [q, c] : poly.terms()) {
                BigInt ph = (q.k1 * J1 + q.k2 * J2) % mod;
                if (ph < 0) ph += mod;
                double frac = BigRat(ph, mod).convert_to<double>();
                double a = kTwoPi * frac;
                double sa = std::sin(a), ca = std::cos(a);
                re += c.real() * ca - c.imag() * sa;
                im += c.real() * sa + c.imag() * ca;
            }
            s += std::sqrt(re * re + im * im);
        }
        bsum[b] = s;
    }
    return pairwise_sum(bsum) / static_cast<double>(samples);
}

}  // namespace reference

}  // namespace rieszlab
