#include "gpot/spectral.hpp"

#include <cmath>

#include "gpot/errors.hpp"

namespace gpot {

bool boundary_decay_ok(const RealField& f, double eps) {
    const double m = field_max_abs(f);
    if (m == 0.0) return true;
    return boundary_max_abs(f) <= eps * m;
}

RealField convolve(const RealField& f, const RealField& g, ConvolveDiag* diag, Exec exec) {
    if (!(f.grid == g.grid))
        throw Error(Errc::ValidationError, "convolve needs both fields on the same grid");
    if (diag) {
        const double mf = field_max_abs(f, exec), mg = field_max_abs(g, exec);
        diag->boundary_ratio_f = mf > 0.0 ? boundary_max_abs(f) / mf : 0.0;
        diag->boundary_ratio_g = mg > 0.0 ? boundary_max_abs(g) / mg : 0.0;
        diag->wrap_risk = diag->boundary_ratio_f > 1e-8 || diag->boundary_ratio_g > 1e-8;
    }
    SpectralField fh = dft_forward(f, exec);
    const SpectralField gh = dft_forward(g, exec);
    parallel_for(f.grid.total(), [&](std::int64_t i) { fh[i] *= gh[i]; }, exec);
    return dft_inverse(fh, exec);
}

SpectralField spectral_power(const SpectralField& ahat, long long k, Exec exec) {
    if (k < 1) throw Error(Errc::ValidationError, "spectral_power needs k >= 1");
    SpectralField out;
    out.grid = ahat.grid;
    out.values.assign(ahat.values.size(), std::complex<double>(1.0, 0.0));
    parallel_for(
        ahat.grid.total(),
        [&](std::int64_t i) {
            std::complex<double> base = ahat[i];
            std::complex<double> r(1.0, 0.0);
            long long e = k;
            while (e > 0) {
                if (e & 1) r *= base;
                base *= base;
                e >>= 1;
            }
            out[i] = r;
        },
        exec);
    return out;
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b, Exec exec) {
    if (!(a.grid == b.grid))
        throw Error(Errc::ValidationError, "pointwise_product needs matching grids");
    SpectralField out = a;
    parallel_for(a.grid.total(), [&](std::int64_t i) { out[i] *= b[i]; }, exec);
    return out;
}

double parseval_gap(const RealField& f, const SpectralField& fhat, Exec exec) {
    const double lhs = f.grid.cell_volume() *
                       block_sum_n(f.grid.total(), [&](std::int64_t i) { return f[i] * f[i]; }, exec);
    const double dual_cell = std::pow(f.grid.freq_step(), f.grid.dim);
    const double rhs = std::pow(2.0 * M_PI, -f.grid.dim) * dual_cell *
                       block_sum_n(f.grid.total(), [&](std::int64_t i) { return std::norm(fhat[i]); },
                                   exec);
    const double denom = std::max(std::abs(lhs), std::abs(rhs));
    return denom == 0.0 ? 0.0 : std::abs(lhs - rhs) / denom;
}

double hermitian_defect(const SpectralField& s) {
    const GridSpec& g = s.grid;
    double max_abs = 0.0;
    for (const auto& v : s.values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return 0.0;

    std::vector<int> idx(static_cast<std::size_t>(g.dim)), mirror(static_cast<std::size_t>(g.dim));
    double defect = 0.0;
    for (std::int64_t i = 0; i < g.total(); ++i) {
        g.multi_index(i, idx);
        bool has_mirror = true;
        for (int a = 0; a < g.dim; ++a) {
            const int j = idx[static_cast<std::size_t>(a)];
            // -k of the j-th frequency is at index n - j, absent for j = 0.
            if (j == 0) { has_mirror = false; break; }
            mirror[static_cast<std::size_t>(a)] = (j == g.n / 2) ? j : g.n - j;
        }
        if (!has_mirror) continue;
        const auto v = s[i];
        const auto w = s[g.flat_index(mirror)];
        defect = std::max(defect, std::abs(v - std::conj(w)));
    }
    return defect / max_abs;
}

} // namespace gpot
