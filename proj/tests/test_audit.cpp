#include <cmath>
#include <vector>

#include "doctest.h"

#include "gpot/audit.hpp"
#include "gpot/errors.hpp"
#include "gpot/fft.hpp"
#include "gpot/green.hpp"
#include "gpot/spectral.hpp"

using namespace gpot;

TEST_CASE("zeta values and bracket property") {
    CHECK(zeta(2.0, 1e-10).value == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-10));
    CHECK(zeta(1.5, 1e-8).value == doctest::Approx(2.612375).epsilon(1e-6));
    CHECK(std::abs(zeta(1.5, 1e-10).value - 2.6123753486854883) < 1e-9);
    CHECK(zeta(1.5, 1e-10).value > zeta(2.0, 1e-10).value); // monotone decreasing in s
    CHECK(zeta(4.0, 1e-12).value == doctest::Approx(std::pow(M_PI, 4) / 90.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)zeta(1.0, 1e-8), Error);
    CHECK_THROWS_AS((void)zeta(0.5, 1e-8), Error);
    try {
        (void)zeta(1.0, 1e-8);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DivergesAtOne);
    }

    // tail bracket: zeta(s) - partial(N) in [0, N^{1-s}/(s-1)]
    for (double s : {1.3, 1.7, 2.5}) {
        const double z = zeta(s, 1e-12).value;
        for (long n : {10L, 100L, 1000L}) {
            double partial = 0.0;
            for (long k = 1; k <= n; ++k) partial += std::pow(static_cast<double>(k), -s);
            const double tail = z - partial;
            CHECK(tail >= 0.0);
            CHECK(tail <= std::pow(static_cast<double>(n), 1.0 - s) / (s - 1.0));
        }
    }
}

TEST_CASE("slope estimator recovers a synthetic power law") {
    std::vector<double> lx, ly;
    const double p = 1.37;
    for (double r : {2.0, 3.0, 4.5, 6.0, 8.0, 10.0}) {
        lx.push_back(std::log(r));
        ly.push_back(std::log(2.7 * std::pow(r, -p)));
    }
    const SlopeFit fit = fit_line(lx, ly);
    CHECK(std::abs(fit.value + p) < 1e-6);
    CHECK(fit.ci_half_width < 1e-6);
    CHECK_THROWS_AS((void)fit_line({1.0, 2.0}, {1.0, 2.0}), Error);
}

TEST_CASE("gaussian envelope audit reports growth and the Newtonian slope") {
    std::vector<double> radii;
    for (int i = 0; i < 9; ++i) radii.push_back(2.0 + i);
    const BoundReport rep = audit_gauss_bound(1.0, 3, radii);

    CHECK(rep.prop == "gauss");
    CHECK(rep.conclusion == AuditConclusion::EnvelopeRatioGrows);
    CHECK(rep.ratio_monotone_growing);
    CHECK(std::abs(rep.loglog_slope.value + 1.0) < 0.05);
    CHECK(rep.radii.size() == 9);
    for (std::size_t i = 1; i < rep.radii.size(); ++i) CHECK(rep.radii[i] > rep.radii[i - 1]);
    for (double v : rep.g0_values) CHECK(v > 0.0);
    for (double v : rep.ratios) CHECK(v > 0.0);
    // report echoes the oracle bit-for-bit
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
        CHECK(rep.g0_values[i] == gauss_g0_closed(1.0, 3, rep.radii[i], 1e-8));
    CHECK(rep.constants.count("C1_quarter") == 1);
    CHECK(rep.constants.count("C1_half") == 1);

    CHECK_THROWS_AS((void)audit_gauss_bound(1.0, 3, {2.0}), Error);
    try {
        (void)audit_gauss_bound(1.0, 3, {2.0, 4.0});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientData);
    }
}

TEST_CASE("exponential-tail audit emits both fits") {
    const JumpKernel kernel = JumpKernel::exponential(3, 1.0);
    const GridSpec grid = GridSpec::make(3, 64, 40.0);
    const BoundReport rep =
        audit_exp_bound(kernel, grid, ZeroModePolicy::Exclude, {2.0, 3.0, 4.0, 5.0, 6.0, 8.0});
    CHECK(rep.prop == "exp");
    CHECK(rep.constants.count("A") == 1);
    CHECK(rep.constants.count("B") == 1);
    CHECK(rep.constants.count("power_slope") == 1);
    CHECK(rep.constants.at("exp_residual_rms") >= 0.0);
    CHECK(rep.constants.at("power_residual_rms") >= 0.0);
    for (std::size_t i = 1; i < rep.radii.size(); ++i) CHECK(rep.radii[i] > rep.radii[i - 1]);
    CHECK((rep.conclusion == AuditConclusion::Consistent ||
           rep.conclusion == AuditConclusion::PolynomialDecayDetected));

    CHECK_THROWS_AS(
        (void)audit_exp_bound(kernel, grid, ZeroModePolicy::Exclude, std::vector<double>{3.0}),
        Error);
}

TEST_CASE("convolution-power audit") {
    const JumpKernel kernel = JumpKernel::exponential(3, 1.0);
    const GridSpec grid = GridSpec::make(3, 64, 40.0);

    // n = 1: envelope reduces to a bound on a itself; fitted c stays below delta
    const BoundReport r1 = audit_an_bound(kernel, {1}, grid);
    CHECK(r1.constants.at("c") <= 1.0 + 1e-9);
    CHECK(r1.constants.at("C") > 0.0);

    const BoundReport rn = audit_an_bound(kernel, {1, 2, 4, 8}, grid);
    CHECK(rn.prop == "an");
    CHECK(rn.radii.size() >= 3);
    CHECK(rn.g0_values.size() == rn.radii.size());

    // mass is preserved by every convolution power
    const SpectralField ahat = kernel_fourier_on_grid(kernel, grid);
    for (int n : {1, 2, 4, 8}) {
        const RealField an = dft_inverse(spectral_power(ahat, n));
        CHECK(field_mass(an) == doctest::Approx(1.0).epsilon(1e-6));
    }

    // a gaussian kernel is accepted: the envelope is evaluated literally
    const BoundReport rg = audit_an_bound(JumpKernel::gaussian(3, 1.0), {1, 2}, GridSpec::make(3, 32, 10.0));
    CHECK(rg.constants.count("C") == 1);
}

TEST_CASE("newtonian far-field audit") {
    std::vector<double> radii = {6.0, 7.0, 8.0, 9.0, 10.0};
    const JumpKernel kernel = JumpKernel::gaussian(3, 1.0);
    const BoundReport rep = audit_newtonian(kernel, radii);
    CHECK(rep.constants.at("sigma2") == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(rep.constants.at("prefactor") == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-9));
    CHECK(rep.conclusion == AuditConclusion::Consistent);
    for (double ratio : rep.ratios) CHECK(std::abs(ratio - 1.0) < 0.05);

    // prediction is homogeneous of degree 2-d
    const double pred6 = rep.constants.at("prefactor") * std::pow(6.0, -1.0);
    const double pred12 = rep.constants.at("prefactor") * std::pow(12.0, -1.0);
    CHECK(pred12 / pred6 == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS((void)audit_newtonian(JumpKernel::heavy(3, 1.0), radii), Error);
    try {
        (void)audit_newtonian(JumpKernel::heavy(3, 1.0), radii);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::HeavyTailUnsupported);
    }

    // grid route for a finite-variance non-gaussian family: report emitted
    const JumpKernel mod = JumpKernel::moderate(3, 4.0);
    const GridSpec grid = GridSpec::make(3, 64, 16.0);
    const BoundReport grep = audit_newtonian(mod, {3.0, 4.0, 5.0, 6.0}, &grid);
    CHECK(grep.ratios.size() == 4);
    for (double ratio : grep.ratios) CHECK(ratio > 0.0);
}

TEST_CASE("reports are reproducible") {
    std::vector<double> radii = {2.0, 4.0, 6.0, 8.0};
    const BoundReport a = audit_gauss_bound(1.0, 3, radii);
    const BoundReport b = audit_gauss_bound(1.0, 3, radii);
    CHECK(a.g0_values == b.g0_values);
    CHECK(a.ratios == b.ratios);
    CHECK(a.loglog_slope.value == b.loglog_slope.value);
}
