#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rieszlab {

enum class QuadMode { AutoGrid, FixedGrid, MonteCarlo };
enum class NormMethod { GridExact, GridBounded, MonteCarlo };

struct QuadratureSpec {
    QuadMode mode = QuadMode::AutoGrid;
    // FixedGrid: points per axis (the same n on both axes).
    std::uint64_t fixed_n = 256;
    // MonteCarlo: sample count and stream seed.
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t seed = 0x5eed0001ULL;
    // Budgets for AutoGrid before the Monte Carlo fallback kicks in.
    std::uint64_t max_memory_hint = std::uint64_t(256) << 20;
    std::uint64_t max_point_evals = std::uint64_t(1) << 31;
    bool allow_mc_fallback = true;
};

struct NormEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    NormMethod method = NormMethod::GridExact;
    std::uint64_t samples_or_gridsize = 0;
    std::optional<std::uint64_t> rng_seed;

    std::string method_name() const {
        switch (method) {
            case NormMethod::GridExact: return "GridExact";
            case NormMethod::GridBounded: return "GridBounded";
            default: return "MonteCarlo";
        }
    }
};

// Order-independent sum: split-in-half recursion over fixed slot layout, so
// the result is bit-identical no matter how many workers filled the slots.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace rieszlab
