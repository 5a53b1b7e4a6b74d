#include "gpot/fft.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "gpot/errors.hpp"

namespace gpot {
namespace {

using cplx = std::complex<double>;

// Twiddle factors for one radix-2 size, built once per transform call
// (n is at most a few hundred here, so the table is tiny).
struct Twiddles {
    int n;
    std::vector<cplx> w; // w[j] = exp(-2 pi i j / n), j < n/2
    std::vector<int> rev;

    explicit Twiddles(int n_) : n(n_), w(static_cast<std::size_t>(n_ / 2)), rev(static_cast<std::size_t>(n_)) {
        for (int j = 0; j < n / 2; ++j) {
            const double ph = -2.0 * M_PI * j / n;
            w[static_cast<std::size_t>(j)] = cplx(std::cos(ph), std::sin(ph));
        }
        int bits = 0;
        while ((1 << bits) < n) ++bits;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < bits; ++b)
                if (i & (1 << b)) r |= 1 << (bits - 1 - b);
            rev[static_cast<std::size_t>(i)] = r;
        }
    }
};

// In-place radix-2 FFT of one line; sign = -1 forward, +1 inverse
// (unnormalized).
void fft_line(cplx* a, const Twiddles& tw, int sign) {
    const int n = tw.n;
    for (int i = 0; i < n; ++i) {
        const int r = tw.rev[static_cast<std::size_t>(i)];
        if (i < r) std::swap(a[i], a[r]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len >> 1;
        const int step = n / len;
        for (int i = 0; i < n; i += len) {
            for (int j = 0; j < half; ++j) {
                cplx w = tw.w[static_cast<std::size_t>(j * step)];
                if (sign > 0) w = std::conj(w);
                const cplx u = a[i + j];
                const cplx v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
}

// One axis pass of the centered transform over every line of the lattice.
// Centered phases: with x = (i - n/2) h and k = (j - n/2) pi/L,
//   sum_i e^{-i k x} f_i = (-1)^{j + n/2} FFT[ (-1)^i f_i ](j).
void axis_pass(std::vector<cplx>& data, const GridSpec& g, int axis, int sign, Exec exec) {
    const int n = g.n;
    const Twiddles tw(n);

    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= n;
    const std::int64_t lines = g.total() / n;

    parallel_for(
        lines,
        [&](std::int64_t line) {
            // Decompose the line id into (outer, inner) so that the line's
            // first element sits at outer*stride*n + inner.
            const std::int64_t inner = line % stride;
            const std::int64_t outer = line / stride;
            const std::int64_t base = outer * stride * n + inner;

            std::vector<cplx> buf(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                cplx v = data[static_cast<std::size_t>(base + i * stride)];
                if (i & 1) v = -v;
                buf[static_cast<std::size_t>(i)] = v;
            }
            fft_line(buf.data(), tw, sign);
            const int half_parity = (n / 2) & 1;
            for (int j = 0; j < n; ++j) {
                cplx v = buf[static_cast<std::size_t>(j)];
                if ((j + half_parity) & 1) v = -v;
                data[static_cast<std::size_t>(base + j * stride)] = v;
            }
        },
        exec);
}

void transform(std::vector<cplx>& data, const GridSpec& g, int sign, Exec exec) {
    for (int axis = 0; axis < g.dim; ++axis) axis_pass(data, g, axis, sign, exec);
}

} // namespace

SpectralField dft_forward(const RealField& f, Exec exec) {
    SpectralField out;
    out.grid = f.grid;
    out.values.assign(f.values.begin(), f.values.end());
    transform(out.values, f.grid, -1, exec);
    const double scale = f.grid.cell_volume();
    parallel_for(f.grid.total(), [&](std::int64_t i) { out[i] *= scale; }, exec);
    return out;
}

SpectralField dft_forward_complex(const SpectralField& f, Exec exec) {
    SpectralField out = f;
    transform(out.values, f.grid, -1, exec);
    const double scale = f.grid.cell_volume();
    parallel_for(f.grid.total(), [&](std::int64_t i) { out[i] *= scale; }, exec);
    return out;
}

SpectralField dft_inverse_complex(const SpectralField& s, Exec exec) {
    SpectralField out = s;
    transform(out.values, s.grid, +1, exec);
    // (2 pi)^{-d} (pi/L)^d and the 1/n^d of the unnormalized inverse FFT
    // combine to (n h)^{-d} = (2L)^{-d}.
    const double scale = std::pow(1.0 / (s.grid.n * s.grid.spacing()), s.grid.dim);
    parallel_for(s.grid.total(), [&](std::int64_t i) { out[i] *= scale; }, exec);
    return out;
}

RealField dft_inverse(const SpectralField& s, Exec exec, double* imag_residual) {
    const SpectralField c = dft_inverse_complex(s, exec);
    RealField out = make_field(s.grid);
    parallel_for(s.grid.total(), [&](std::int64_t i) { out[i] = c[i].real(); }, exec);
    if (imag_residual) {
        double m = 0.0;
        for (const cplx& v : c.values) m = std::max(m, std::abs(v.imag()));
        *imag_residual = m;
    }
    return out;
}

} // namespace gpot
