#include "gpot/verify.hpp"

#include <cmath>

#include "gpot/fft.hpp"
#include "gpot/green.hpp"
#include "gpot/grid.hpp"
#include "gpot/kernels.hpp"
#include "gpot/rng.hpp"
#include "gpot/spectral.hpp"

namespace gpot {
namespace {

CheckResult gate(std::string name, double metric, double threshold, std::string detail = "") {
    return CheckResult{std::move(name), metric <= threshold, metric, threshold, std::move(detail)};
}

} // namespace

std::vector<CheckResult> run_core_checks(int dim, int n, double box) {
    std::vector<CheckResult> out;
    const GridSpec grid = GridSpec::make(dim, n, box);
    const JumpKernel kernel = JumpKernel::gaussian(dim, 1.0);
    const double lambda = 0.5;

    // Three-route agreement: series and spectral inversion against the
    // closed-form discounted series at a few displacements.
    {
        const GreenEstimate gf = green_fourier(kernel, grid, lambda);
        const GreenEstimate gs = green_series(kernel, grid, lambda, 200, 1e-8);
        double worst = 0.0;
        std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
        const double probes[3][3] = {{0, 0, 0}, {1, 0, 0}, {2, 1, 0}};
        for (const auto& p : probes) {
            for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = (a < 3) ? p[a] : 0.0;
            // snap to the lattice; the closed form is evaluated at the
            // snapped displacement, not the nominal one
            const std::int64_t i = grid.index_of_point(x);
            grid.point(i, x);
            double r2 = 0.0;
            for (double c : x) r2 += c * c;
            const double closed = gauss_green_closed(1.0, dim, std::sqrt(r2), lambda, 1e-10);
            worst = std::max(worst, std::abs(gf.regular_part[i] - closed) / closed);
            worst = std::max(worst, std::abs(gs.regular_part[i] - closed) / closed);
            worst = std::max(worst, std::abs(gf.regular_part[i] - gs.regular_part[i]) / closed);
        }
        out.push_back(gate("three-route-agreement", worst,
                           std::max(1e-6, gs.truncation_error_bound), "fourier/series/closed"));
    }

    // Resolvent identity (1+lambda) Rf - a*Rf = f.
    {
        const TestFunction f = TestFunction::gaussian_bump(
            std::vector<double>(static_cast<std::size_t>(dim), 0.0), 1.0, 1.0);
        const RealField rf = resolvent_apply(kernel, f, lambda, grid);
        const RealField a_field =
            sample_on_grid([&](std::span<const double> x) { return kernel.density(x); }, grid);
        const RealField conv = convolve(a_field, rf);
        const RealField f_field = sample_test_function(f, grid);
        double worst = 0.0;
        for (std::int64_t i = 0; i < grid.total(); ++i)
            worst = std::max(worst, std::abs((1.0 + lambda) * rf[i] - conv[i] - f_field[i]));
        out.push_back(gate("resolvent-identity", worst, 1e-6 * f.sup_norm()));
    }

    // Chapman-Kolmogorov in the spectral domain.
    {
        const SpectralField p1 = transition_spectral(kernel, 0.7, grid);
        const SpectralField p2 = transition_spectral(kernel, 1.4, grid);
        double worst = 0.0;
        for (std::int64_t i = 0; i < grid.total(); ++i)
            worst = std::max(worst, std::abs(p1[i] * p1[i] - p2[i]));
        out.push_back(gate("chapman-kolmogorov", worst, 1e-12));
    }

    // Conservativity of the transition density.
    {
        double worst = 0.0;
        for (double t : {0.5, 1.0, 2.0}) {
            const TransitionDensity td = transition_density(kernel, t, grid);
            const double mass = td.atom_weight + field_mass(td.density_part);
            worst = std::max(worst, std::abs(mass - 1.0));
        }
        out.push_back(gate("conservativity", worst, 1e-8));
    }

    // Parseval on a reproducible random field.
    {
        RealField f = make_field(grid);
        PathRng rng(1234, 0);
        for (auto& v : f.values) v = rng.normal();
        out.push_back(gate("parseval", parseval_gap(f, dft_forward(f)), 1e-8));
    }

    // Mass multiplicativity of convolution.
    {
        const RealField a_field =
            sample_on_grid([&](std::span<const double> x) { return kernel.density(x); }, grid);
        const TestFunction f = TestFunction::gaussian_bump(
            std::vector<double>(static_cast<std::size_t>(dim), 0.0), 1.5, 0.7);
        const RealField f_field = sample_test_function(f, grid);
        const double lhs = field_mass(convolve(a_field, f_field));
        const double rhs = field_mass(a_field) * field_mass(f_field);
        out.push_back(
            gate("convolution-mass", std::abs(lhs - rhs) / std::abs(rhs), 1e-8));
    }

    // G_lambda decreases in lambda, pointwise.
    {
        const GreenEstimate hi = green_fourier(kernel, grid, 0.5);
        const GreenEstimate lo = green_fourier(kernel, grid, 0.25);
        double worst = -1e300;
        for (std::int64_t i = 0; i < grid.total(); ++i)
            worst = std::max(worst, hi.regular_part[i] - lo.regular_part[i]);
        out.push_back(gate("lambda-monotonicity", worst, 1e-12));
    }

    // Spectral identity of the inversion: G_hat (1+lambda-a_hat) = a_hat.
    {
        const SpectralField ahat = kernel_fourier_on_grid(kernel, grid);
        double worst = 0.0;
        for (std::int64_t i = 0; i < grid.total(); ++i) {
            const std::complex<double> a = ahat[i];
            const std::complex<double> g = a / (1.0 + lambda - a);
            worst = std::max(worst, std::abs(g * (1.0 + lambda - a) - a));
        }
        out.push_back(gate("spectral-identity", worst, 1e-10));
    }

    // Type invariants of a fresh estimate (positivity, evenness, atom weight).
    {
        CheckResult r{"green-invariants", true, 0.0, 0.0, "check_invariants()"};
        try {
            green_fourier(kernel, grid, lambda).check_invariants();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    }

    return out;
}

} // namespace gpot
