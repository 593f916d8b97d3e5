// Kernel benchmark: OpenMP streaming evaluators against the serial libm
// reference implementations, on the same inputs and sample streams.  Prints
// one table row per case with timings, speedup, and the |fast - reference|
// agreement gap.  Not a test; run manually via the bench_kernels target.

#include "rieszlab/plane.hpp"
#include "rieszlab/quadrature.hpp"
#include "rieszlab/scheme.hpp"
#include "rieszlab/torus_metrics.hpp"
#include "rieszlab/trig_poly.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rieszlab;

namespace {

double seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

void row(const std::string& name, double fast_s, double ref_s, double fast_v, double ref_v) {
    std::printf("%-34s %10.3fs %10.3fs %8.2fx   %.3e\n", name.c_str(), fast_s, ref_s,
                ref_s / fast_s, std::fabs(fast_v - ref_v));
}

IntegerScheme ladder(int s) {
    IntegerScheme sch;
    sch.scale = 1;
    sch.osc_case = OscCase::IIa;
    sch.s = s;
    sch.symbol_id = "bench";
    long long a = 2;
    for (int k = 0; k < s; ++k) {
        sch.centers.push_back(freq(a, a / 2));
        a <<= 2;
    }
    sch.radii.assign(s, BigRat(1, 2));
    return sch;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("%-34s %11s %11s %9s   %s\n", "kernel", "parallel", "serial", "speedup",
                "|diff|");

    // Torus grid: streaming phase-recurrence evaluator vs direct libm grid.
    {
        const auto centers = power_centers(5, freq(1, 0), 4);
        const SparseTrigPoly tail = riesz_product_tail(centers);
        QuadratureSpec spec;
        spec.mode = QuadMode::FixedGrid;
        spec.fixed_n = 1024;
        double fast_v = 0.0, ref_v = 0.0;
        const double tf = seconds([&] { fast_v = l1_norm(tail, spec).value; });
        const double tr = seconds([&] { ref_v = reference::l1_grid(tail, 1024, 1024); });
        row("torus grid 1024^2, s=5 tail", tf, tr, fast_v, ref_v);
    }

    // Torus Monte Carlo: block-indexed counter RNG vs serial full-precision
    // phases on the identical sample stream.  The reference pays big-integer
    // arithmetic per term per sample, so the case is sized for it.
    {
        const auto centers = power_centers(5, freq(1, 0), 16);
        const SparseTrigPoly zed = z_polynomial(centers, alternating_signs(5));
        QuadratureSpec spec;
        spec.mode = QuadMode::MonteCarlo;
        spec.mc_samples = 100'000;
        double fast_v = 0.0, ref_v = 0.0;
        const double tf = seconds([&] { fast_v = l1_norm(zed, spec).value; });
        const double tr =
            seconds([&] { ref_v = reference::l1_mc(zed, spec.mc_samples, spec.seed); });
        row("torus MC 1e5, s=5 alternating", tf, tr, fast_v, ref_v);
    }

    // Plane Monte Carlo: Fejer-density importance sampler vs serial libm.
    {
        const PlaneFunction h = h_theta(ladder(4), 2);
        QuadratureSpec spec;
        spec.mode = QuadMode::MonteCarlo;
        spec.mc_samples = 200'000;
        double fast_v = 0.0, ref_v = 0.0;
        const double tf = seconds([&] { fast_v = inv_ft_l1(h, 2048.0, spec).value; });
        const double tr = seconds(
            [&] { ref_v = reference::plane_l1_mc(h, 2048.0, spec.mc_samples, spec.seed); });
        row("plane MC 2e5, s=4 bump sum", tf, tr, fast_v, ref_v);
    }

    return 0;
}
