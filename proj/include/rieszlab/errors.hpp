#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

// Raised when two distinct sign patterns produce the same signed subset sum,
// i.e. the center sequence is not lacunary enough for a unique expansion.
struct RepresentationCollision : std::runtime_error {
    explicit RepresentationCollision(const std::string& what) : std::runtime_error(what) {}
};

// A quadrature request would exceed the configured memory or evaluation budget
// and the Monte Carlo fallback is disabled.
struct ResourceExceeded : std::runtime_error {
    explicit ResourceExceeded(const std::string& what) : std::runtime_error(what) {}
};

// The center sampler could not satisfy the oscillation condition at some level.
struct ConstructionFailed : std::runtime_error {
    ConstructionFailed(char condition_, int depth_, const std::string& what)
        : std::runtime_error(what), condition(condition_), depth(depth_) {}
    char condition;
    int depth;  // scheme level k at which the search gave up
};

// Rescaling to integer centers would need a common denominator beyond the cap.
struct ScaleOverflow : std::runtime_error {
    explicit ScaleOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Requested bump half-width does not keep the translated kernels disjoint.
struct BumpOverlap : std::runtime_error {
    explicit BumpOverlap(const std::string& what) : std::runtime_error(what) {}
};

// The ratio-norm trace did not settle within the allowed range of widths.
struct NoStabilization : std::runtime_error {
    explicit NoStabilization(const std::string& what) : std::runtime_error(what) {}
};

// A lattice sample fell on the symbol's declared discontinuity locus.
struct SampleOnSingularity : std::runtime_error {
    explicit SampleOnSingularity(const std::string& what) : std::runtime_error(what) {}
};

// A sum-set point landed in zero or several of the top-level balls.
struct BallAssignmentAmbiguous : std::runtime_error {
    explicit BallAssignmentAmbiguous(const std::string& what) : std::runtime_error(what) {}
};

// Coefficient distance between sampled and target polynomials exceeded eps*3^s.
struct GapExceeded : std::runtime_error {
    explicit GapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Bad or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rieszlab
