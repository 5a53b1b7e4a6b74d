#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gpot {

// Execution policy for the data-parallel kernels. Serial is the reference
// path; Parallel must produce bit-identical results for any thread count,
// which every kernel in this library achieves by fixing the work
// decomposition independently of the thread count.
enum class Exec { Serial, Parallel };

template <typename F>
void parallel_for(std::int64_t n, F&& body, Exec exec = Exec::Parallel) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) body(i);
    }
}

// Fixed block size for deterministic reductions. Partial sums are formed
// per block (serially within a block) and combined in block order, so the
// result does not depend on the execution policy or thread count.
inline constexpr std::int64_t kReduceBlock = 4096;

template <typename F>
double block_sum_n(std::int64_t n, F&& term, Exec exec = Exec::Parallel) {
    if (n <= 0) return 0.0;
    const std::int64_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
    parallel_for(
        nblocks,
        [&](std::int64_t b) {
            const std::int64_t lo = b * kReduceBlock;
            const std::int64_t hi = std::min(n, lo + kReduceBlock);
            double s = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) s += term(i);
            partial[static_cast<std::size_t>(b)] = s;
        },
        exec);
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

inline double block_sum(std::span<const double> v, Exec exec = Exec::Parallel) {
    return block_sum_n(static_cast<std::int64_t>(v.size()),
                       [&](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }, exec);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

} // namespace gpot
