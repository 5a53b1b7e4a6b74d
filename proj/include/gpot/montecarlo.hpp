#pragma once

#include <cstdint>
#include <span>

#include "gpot/exec.hpp"
#include "gpot/green.hpp"
#include "gpot/kernels.hpp"
#include "gpot/rng.hpp"

namespace gpot {

struct MCConfig {
    std::int64_t paths = 10000;
    double horizon = 10.0;   // T
    double lambda = 0.0;     // discount; 0 = undiscounted
    double bm_step = 0.01;   // dt, Brownian paths only
    std::uint64_t master_seed = 0;
    Exec exec = Exec::Parallel;
};

struct PotentialEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t paths = 0;
    double horizon = 0.0;
    double lambda = 0.0;
    double tail_bias_bound = 0.0;           // horizon-truncation budget
    double discretization_bias_bound = 0.0; // Brownian trapezoid budget
    std::uint64_t seed = 0;
};

// One compound-Poisson path: unit-rate Exp(1) waiting times, jumps drawn from
// the kernel; the state is constant between jumps so the discounted time
// integral of f is accumulated exactly per segment.
double simulate_cpp_functional(const JumpKernel& kernel, const TestFunction& f,
                               std::span<const double> x0, double horizon, double lambda,
                               PathRng& rng, std::int64_t* jump_count = nullptr);

// Mean over cfg.paths independent paths; per-path streams come from
// (master_seed, path index), so serial and parallel runs sample identical
// paths and the blocked reduction returns bit-identical means.
PotentialEstimate estimate_potential_cpp(const JumpKernel& kernel, const TestFunction& f,
                                         std::span<const double> x0, const MCConfig& cfg);

// Brownian path with generator Delta: increments N(0, 2 dt) per coordinate,
// trapezoidal accumulation of e^{-lambda t} f(X_t).
double simulate_bm_functional(const TestFunction& f, std::span<const double> x0, double horizon,
                              double dt, double lambda, PathRng& rng,
                              double* second_difference_sum = nullptr);

PotentialEstimate estimate_potential_bm(const TestFunction& f, std::span<const double> x0,
                                        const MCConfig& cfg);

} // namespace gpot
