#include "gpot/montecarlo.hpp"

#include <cmath>
#include <vector>

#include "gpot/errors.hpp"

namespace gpot {
namespace {

void validate_cfg(const MCConfig& cfg) {
    if (cfg.paths < 1) throw Error(Errc::ValidationError, "paths must be >= 1");
    if (!(cfg.horizon > 0.0)) throw Error(Errc::ValidationError, "horizon must be > 0");
    if (!(cfg.bm_step > 0.0) || cfg.bm_step > cfg.horizon)
        throw Error(Errc::ValidationError, "bm_step must satisfy 0 < dt <= T");
    if (cfg.lambda < 0.0) throw Error(Errc::ValidationError, "lambda must be >= 0");
}

// Undiscounted runs truncate int_0^inf at T; the neglected tail is budgeted
// with the local-limit proxy sup_x p(t, x) ~ (d / (2 pi sigma^2 t))^{d/2}.
double cpp_tail_bound(const TestFunction& f, const JumpKernel& kernel, double horizon,
                      double lambda) {
    if (lambda > 0.0) return f.sup_norm() * std::exp(-lambda * horizon) / lambda;
    const double d = kernel.dim();
    const double sigma2 = kernel.second_moment_or_throw();
    return f.l1_norm() * std::pow(d / (2.0 * M_PI * sigma2), 0.5 * d) * (2.0 / (d - 2.0)) *
           std::pow(horizon, 1.0 - 0.5 * d);
}

double bm_tail_bound(const TestFunction& f, int dim, double horizon, double lambda) {
    if (lambda > 0.0) return f.sup_norm() * std::exp(-lambda * horizon) / lambda;
    return f.l1_norm() * std::pow(4.0 * M_PI, -0.5 * dim) * (2.0 / (dim - 2.0)) *
           std::pow(horizon, 1.0 - 0.5 * dim);
}

PotentialEstimate reduce_paths(const std::vector<double>& vals, const MCConfig& cfg) {
    PotentialEstimate est;
    est.paths = cfg.paths;
    est.horizon = cfg.horizon;
    est.lambda = cfg.lambda;
    est.seed = cfg.master_seed;
    const auto m = static_cast<double>(cfg.paths);
    est.mean = block_sum(vals, cfg.exec) / m;
    if (cfg.paths > 1) {
        const double ss = block_sum_n(
            cfg.paths,
            [&](std::int64_t i) {
                const double d = vals[static_cast<std::size_t>(i)] - est.mean;
                return d * d;
            },
            cfg.exec);
        est.std_error = std::sqrt(ss / (m * (m - 1.0)));
    }
    return est;
}

} // namespace

double simulate_cpp_functional(const JumpKernel& kernel, const TestFunction& f,
                               std::span<const double> x0, double horizon, double lambda,
                               PathRng& rng, std::int64_t* jump_count) {
    const int d = kernel.dim();
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> jump(static_cast<std::size_t>(d));
    double t = 0.0;
    double acc = 0.0;
    std::int64_t jumps = 0;
    for (;;) {
        const double wait = rng.exponential();
        const double t_next = std::min(t + wait, horizon);
        const double fx = f(x);
        if (fx != 0.0) {
            if (lambda > 0.0)
                acc += fx * (std::exp(-lambda * t) - std::exp(-lambda * t_next)) / lambda;
            else
                acc += fx * (t_next - t);
        }
        if (t + wait >= horizon) break;
        t = t_next;
        kernel.sample_jump(rng, jump);
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] += jump[static_cast<std::size_t>(i)];
        ++jumps;
    }
    if (jump_count) *jump_count = jumps;
    return acc;
}

PotentialEstimate estimate_potential_cpp(const JumpKernel& kernel, const TestFunction& f,
                                         std::span<const double> x0, const MCConfig& cfg) {
    validate_cfg(cfg);
    if (cfg.lambda == 0.0 && kernel.dim() < 3)
        throw Error(Errc::RecurrentRegime, "undiscounted potential needs d >= 3");
    std::vector<double> vals(static_cast<std::size_t>(cfg.paths), 0.0);
    parallel_for(
        cfg.paths,
        [&](std::int64_t p) {
            PathRng rng(cfg.master_seed, static_cast<std::uint64_t>(p));
            vals[static_cast<std::size_t>(p)] =
                simulate_cpp_functional(kernel, f, x0, cfg.horizon, cfg.lambda, rng);
        },
        cfg.exec);
    PotentialEstimate est = reduce_paths(vals, cfg);
    est.tail_bias_bound = cpp_tail_bound(f, kernel, cfg.horizon, cfg.lambda);
    return est;
}

double simulate_bm_functional(const TestFunction& f, std::span<const double> x0, double horizon,
                              double dt, double lambda, PathRng& rng,
                              double* second_difference_sum) {
    const int d = static_cast<int>(x0.size());
    std::vector<double> x(x0.begin(), x0.end());
    const auto steps = static_cast<std::int64_t>(std::llround(horizon / dt));
    const double step_sigma = std::sqrt(2.0 * dt); // generator Delta: var 2t per coordinate

    double acc = 0.0;
    double sd_sum = 0.0;
    double f_prev2 = 0.0, f_prev = f(x);
    double t = 0.0;
    for (std::int64_t s = 1; s <= steps; ++s) {
        for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] += step_sigma * rng.normal();
        t += dt;
        double f_cur = f(x);
        if (lambda > 0.0) f_cur *= std::exp(-lambda * t);
        acc += 0.5 * (f_prev + f_cur) * dt;
        if (s >= 2) sd_sum += std::abs(f_cur - 2.0 * f_prev + f_prev2);
        f_prev2 = f_prev;
        f_prev = f_cur;
    }
    if (second_difference_sum) *second_difference_sum = sd_sum;
    return acc;
}

PotentialEstimate estimate_potential_bm(const TestFunction& f, std::span<const double> x0,
                                        const MCConfig& cfg) {
    validate_cfg(cfg);
    const int d = static_cast<int>(x0.size());
    if (cfg.lambda == 0.0 && d < 3)
        throw Error(Errc::RecurrentRegime, "undiscounted potential needs d >= 3");
    std::vector<double> vals(static_cast<std::size_t>(cfg.paths), 0.0);
    std::vector<double> sd(static_cast<std::size_t>(cfg.paths), 0.0);
    parallel_for(
        cfg.paths,
        [&](std::int64_t p) {
            PathRng rng(cfg.master_seed, static_cast<std::uint64_t>(p));
            double s = 0.0;
            vals[static_cast<std::size_t>(p)] =
                simulate_bm_functional(f, x0, cfg.horizon, cfg.bm_step, cfg.lambda, rng, &s);
            sd[static_cast<std::size_t>(p)] = s;
        },
        cfg.exec);
    PotentialEstimate est = reduce_paths(vals, cfg);
    est.tail_bias_bound = bm_tail_bound(f, d, cfg.horizon, cfg.lambda);
    // Composite-trapezoid error: sum_i (dt^3/12) |f''| with f'' dt^2 estimated
    // by the second differences accumulated along each path.
    est.discretization_bias_bound =
        (cfg.bm_step / 12.0) * block_sum(sd, cfg.exec) / static_cast<double>(cfg.paths);
    return est;
}

} // namespace gpot
