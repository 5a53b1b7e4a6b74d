#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "gpot/errors.hpp"
#include "gpot/fft.hpp"
#include "gpot/green.hpp"
#include "gpot/grid.hpp"
#include "gpot/kernels.hpp"
#include "gpot/rng.hpp"
#include "gpot/spectral.hpp"

using namespace gpot;

namespace {

RealField random_field(const GridSpec& g, std::uint64_t seed) {
    RealField f = make_field(g);
    PathRng rng(seed, 0);
    for (auto& v : f.values) v = rng.normal();
    return f;
}

// Direct O(n^{2d}) circular convolution on the centered lattice: the
// brute-force oracle the transform route must reproduce.
RealField convolve_direct(const RealField& f, const RealField& g) {
    const GridSpec& gr = f.grid;
    RealField out = make_field(gr);
    const int n = gr.n;
    std::vector<int> xi(static_cast<std::size_t>(gr.dim)), yi(static_cast<std::size_t>(gr.dim)),
        di(static_cast<std::size_t>(gr.dim));
    for (std::int64_t x = 0; x < gr.total(); ++x) {
        gr.multi_index(x, xi);
        double s = 0.0;
        for (std::int64_t y = 0; y < gr.total(); ++y) {
            gr.multi_index(y, yi);
            for (int a = 0; a < gr.dim; ++a) {
                const int diff = xi[static_cast<std::size_t>(a)] - yi[static_cast<std::size_t>(a)] +
                                 n / 2;
                di[static_cast<std::size_t>(a)] = ((diff % n) + n) % n;
            }
            s += f[y] * g[gr.flat_index(di)];
        }
        out[x] = s * gr.cell_volume();
    }
    return out;
}

double max_abs_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace

TEST_CASE("grid index maps are inverse bijections") {
    const GridSpec g = GridSpec::make(3, 16, 5.0);
    PathRng rng(2, 0);
    std::vector<int> idx(3);
    std::vector<double> x(3);
    for (int t = 0; t < 10000; ++t) {
        const auto flat = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(g.total()));
        g.multi_index(flat, idx);
        CHECK(g.flat_index(idx) == flat);
        g.point(flat, x);
        CHECK(g.index_of_point(x) == flat);
    }
    CHECK(g.coord(g.n / 2) == 0.0);
    CHECK(g.total() == 16LL * 16 * 16);
    CHECK_THROWS_AS((void)GridSpec::make(3, 12, 5.0), Error); // not a power of two
    CHECK_THROWS_AS((void)GridSpec::make(3, 4, 5.0), Error);  // below minimum
}

TEST_CASE("sampling basics") {
    const GridSpec g = GridSpec::make(3, 64, 8.0);
    const RealField ones = sample_on_grid([](std::span<const double>) { return 1.0; }, g);
    for (double v : ones.values) CHECK(v == 1.0);

    const JumpKernel k = JumpKernel::gaussian(3, 1.0);
    const RealField a = sample_on_grid([&](std::span<const double> x) { return k.density(x); }, g);
    CHECK(field_mass(a) == doctest::Approx(1.0).epsilon(1e-6));

    const RealField odd = sample_on_grid(
        [](std::span<const double> x) {
            return x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        },
        g);
    CHECK(std::abs(field_sum(odd)) < 1e-12);
}

TEST_CASE("transform round trip and analytic values") {
    const GridSpec g = GridSpec::make(3, 32, 6.0);
    const RealField f = random_field(g, 3);
    const RealField back = dft_inverse(dft_forward(f));
    CHECK(max_abs_diff(f, back) < 1e-10 * field_max_abs(f));

    // gaussian forward matches exp(-|k|^2/2) on the dual lattice
    const GridSpec g2 = GridSpec::make(3, 128, 10.0);
    const JumpKernel k = JumpKernel::gaussian(3, 1.0);
    const RealField a = sample_on_grid([&](std::span<const double> x) { return k.density(x); }, g2);
    const SpectralField ah = dft_forward(a);
    CHECK(ah[g2.zero_flat()].real() == doctest::Approx(1.0).epsilon(1e-8));
    // dual point m = (3, 1, 0): |k|^2 = 10 (pi/10)^2, the lattice point nearest |k| = 1
    std::vector<int> idx = {64 + 3, 64 + 1, 64};
    const double k2 = 10.0 * std::pow(M_PI / 10.0, 2);
    CHECK(ah[g2.flat_index(idx)].real() == doctest::Approx(std::exp(-0.5 * k2)).epsilon(1e-6));
    CHECK(hermitian_defect(ah) < 1e-10);

    double imag_resid = 0.0;
    (void)dft_inverse(ah, Exec::Parallel, &imag_resid);
    CHECK(imag_resid < 1e-12);
}

TEST_CASE("parseval identity") {
    const GridSpec g = GridSpec::make(2, 64, 7.0);
    const RealField f = random_field(g, 4);
    CHECK(parseval_gap(f, dft_forward(f)) < 1e-8);
}

TEST_CASE("convolution equals the brute-force oracle") {
    {
        const GridSpec g = GridSpec::make(1, 16, 2.0);
        const RealField f = random_field(g, 5), h = random_field(g, 6);
        const RealField via_fft = convolve(f, h);
        const RealField direct = convolve_direct(f, h);
        CHECK(max_abs_diff(via_fft, direct) < 1e-10);
    }
    {
        const GridSpec g = GridSpec::make(2, 8, 2.0);
        const RealField f = random_field(g, 7), h = random_field(g, 8);
        CHECK(max_abs_diff(convolve(f, h), convolve_direct(f, h)) < 1e-10);
    }
}

TEST_CASE("convolution identity, commutativity, mass") {
    const GridSpec g = GridSpec::make(3, 32, 6.0);
    const JumpKernel k = JumpKernel::gaussian(3, 1.0);
    const RealField a = sample_on_grid([&](std::span<const double> x) { return k.density(x); }, g);

    // unit-mass spike at the origin is the identity element
    RealField spike = make_field(g);
    spike[g.zero_flat()] = 1.0 / g.cell_volume();
    CHECK(max_abs_diff(convolve(a, spike), a) < 1e-10);

    const RealField f = random_field(g, 9);
    CHECK(max_abs_diff(convolve(a, f), convolve(f, a)) < 1e-12);

    const double lhs = field_mass(convolve(a, f));
    const double rhs = field_mass(a) * field_mass(f);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));

    // gaussian self-convolution at the origin: a_2(0) = (b/(4 pi))^{d/2}
    const GridSpec g2 = GridSpec::make(3, 64, 8.0);
    const RealField a2f = sample_on_grid([&](std::span<const double> x) { return k.density(x); }, g2);
    const RealField a2 = convolve(a2f, a2f);
    CHECK(a2[g2.zero_flat()] == doctest::Approx(std::pow(4.0 * M_PI, -1.5)).epsilon(1e-6));
}

TEST_CASE("wrap-around guard") {
    const GridSpec g = GridSpec::make(3, 32, 10.0);
    const JumpKernel gauss = JumpKernel::gaussian(3, 1.0);
    const JumpKernel mod = JumpKernel::moderate(3, 3.0);
    const RealField a = sample_on_grid([&](std::span<const double> x) { return gauss.density(x); }, g);
    const RealField m = sample_on_grid([&](std::span<const double> x) { return mod.density(x); }, g);
    CHECK(boundary_decay_ok(a));
    CHECK(!boundary_decay_ok(m));
    ConvolveDiag diag;
    (void)convolve(m, m, &diag);
    CHECK(diag.wrap_risk);
    ConvolveDiag diag2;
    (void)convolve(a, a, &diag2);
    CHECK(!diag2.wrap_risk);
}

TEST_CASE("spectral powers") {
    const GridSpec g = GridSpec::make(3, 32, 8.0);
    const JumpKernel k = JumpKernel::gaussian(3, 1.0);
    const SpectralField ah = kernel_fourier_on_grid(k, g);

    const SpectralField p1 = spectral_power(ah, 1);
    for (std::int64_t i = 0; i < g.total(); ++i) CHECK(std::abs(p1[i] - ah[i]) == 0.0);

    // additivity a^{j+k} = a^j a^k
    const SpectralField p2 = spectral_power(ah, 2);
    const SpectralField p3 = spectral_power(ah, 3);
    const SpectralField p5 = spectral_power(ah, 5);
    double worst = 0.0;
    for (std::int64_t i = 0; i < g.total(); ++i)
        worst = std::max(worst, std::abs(p5[i] - p2[i] * p3[i]));
    CHECK(worst < 1e-12);

    CHECK(std::abs(p5[g.zero_flat()] - 1.0) < 1e-12); // mass conserved under convolution

    // inverse at the origin reproduces a_k(0) = (b/(2 pi k))^{d/2}
    const RealField a4 = dft_inverse(spectral_power(ah, 4));
    CHECK(a4[g.zero_flat()] == doctest::Approx(std::pow(1.0 / (8.0 * M_PI), 1.5)).epsilon(1e-6));
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    const GridSpec g = GridSpec::make(3, 32, 6.0);
    const RealField f = random_field(g, 10), h = random_field(g, 11);

    const SpectralField fs = dft_forward(f, Exec::Serial);
    const SpectralField fp = dft_forward(f, Exec::Parallel);
    for (std::int64_t i = 0; i < g.total(); ++i) {
        CHECK(fs[i].real() == fp[i].real());
        CHECK(fs[i].imag() == fp[i].imag());
    }

    const RealField cs = convolve(f, h, nullptr, Exec::Serial);
    const RealField cp = convolve(f, h, nullptr, Exec::Parallel);
    for (std::int64_t i = 0; i < g.total(); ++i) CHECK(cs[i] == cp[i]);

    CHECK(field_sum(f, Exec::Serial) == field_sum(f, Exec::Parallel));
    CHECK(block_sum_n(100001, [](std::int64_t i) { return std::sin(0.001 * i); }, Exec::Serial) ==
          block_sum_n(100001, [](std::int64_t i) { return std::sin(0.001 * i); }, Exec::Parallel));
}
