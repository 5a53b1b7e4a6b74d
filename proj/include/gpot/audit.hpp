#pragma once

#include <map>
#include <string>
#include <vector>

#include "gpot/green.hpp"
#include "gpot/grid.hpp"
#include "gpot/kernels.hpp"

namespace gpot {

struct ZetaValue {
    double s = 0.0;
    double value = 0.0;
    double error_bound = 0.0;
};

// Riemann zeta for s > 1: partial sum plus the integral tail correction,
// refined with the first Euler-Maclaurin terms so modest N reaches tight tol.
ZetaValue zeta(double s, double tol = 1e-10);

enum class AuditConclusion { Consistent, EnvelopeRatioGrows, PolynomialDecayDetected };
const char* audit_conclusion_name(AuditConclusion c);

struct SlopeFit {
    double value = 0.0;
    double ci_half_width = 0.0; // ~95% (2 standard errors)
    double residual_rms = 0.0;
};

// Ordinary least squares of y against x (both already transformed).
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Empirical audit of a claimed decay envelope. The audits report, they never
// assert: fitted constants, per-radius envelope ratios and the log-log decay
// slope are all diagnostics for the caller to judge.
struct BoundReport {
    std::string prop;
    std::vector<double> radii;
    std::vector<double> g0_values;
    std::string envelope; // "gauss-quarter" | "gauss-half" | "exponential" | "newtonian" | "min-mixed"
    std::map<std::string, double> constants;
    std::vector<double> ratios; // per-radius value/envelope
    bool ratio_monotone_growing = false;
    SlopeFit loglog_slope;
    AuditConclusion conclusion = AuditConclusion::Consistent;
};

// Gaussian-envelope audit: G_0 for the gaussian family against the claimed
// C1 exp(-b r^2 / 4) envelope (the /2 variant is reported alongside), plus
// the log-log decay slope of the exact series values.
BoundReport audit_gauss_bound(double b, int dim, std::vector<double> radii, double tol = 1e-8);

// Exponential-envelope audit: grid G_0 for an exponential-tail kernel along a
// radial ray, fit both log g ~ -B r and log g ~ s log r, report which wins.
BoundReport audit_exp_bound(const JumpKernel& kernel, const GridSpec& grid, ZeroModePolicy policy,
                            std::vector<double> radii);

// n-fold convolution audit: a_n against C n^{-d/2} exp(-c min(|x|, |x|^2/n)),
// c fitted by profile search, (C, c) stability reported across n.
BoundReport audit_an_bound(const JumpKernel& kernel, const std::vector<int>& n_list,
                           const GridSpec& grid);

// Far-field cross-check: G_0(r) against the diffusive-limit prediction
// (2d/sigma^2) C(d) r^{2-d}.
BoundReport audit_newtonian(const JumpKernel& kernel, std::vector<double> radii,
                            const GridSpec* grid = nullptr);

} // namespace gpot
