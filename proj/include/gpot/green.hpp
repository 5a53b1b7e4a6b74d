#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpot/grid.hpp"
#include "gpot/kernels.hpp"
#include "gpot/spectral.hpp"

namespace gpot {

// Bounded, integrable probe functions (finite ||f||_inf + ||f||_1).
class TestFunction {
  public:
    // height * exp(-|y - c|^2 / (2 w^2))
    static TestFunction gaussian_bump(std::vector<double> center, double width, double height);
    // height * exp(1 - 1/(1 - (r/R)^2)) inside |y - c| < R, 0 outside
    static TestFunction compact_bump(std::vector<double> center, double radius, double height);
    static TestFunction custom(RealField samples);
    // grammar: "gaussbump:w=1,h=1" | "compact:r=1,h=1", optional CSV center "c=..." via set_center
    static TestFunction parse(std::string_view spec, int dim);

    double operator()(std::span<const double> y) const;
    double sup_norm() const;
    double l1_norm() const; // over R^dim
    double cl_norm() const { return sup_norm() + l1_norm(); }

    int dim() const;
    bool is_radial() const; // radial about its center (bump families)
    std::span<const double> center() const;
    double radial_profile(double r) const; // value at distance r from the center
    double support_radius() const;         // radius beyond which |f| < 1e-300 * height

    void set_center(std::vector<double> c);

  private:
    enum class Family { GaussianBump, CompactBump, Custom };
    Family family_ = Family::GaussianBump;
    std::vector<double> center_;
    double width_ = 1.0, height_ = 1.0;
    RealField samples_; // Custom only
};

enum class ZeroModePolicy { Exclude, Richardson };
enum class GreenMethod { Fourier, Series };

const char* zero_mode_policy_name(ZeroModePolicy p);
const char* green_method_name(GreenMethod m);

// Regular part G_lambda of the resolvent kernel on a grid, plus the weight
// of the delta atom. Series convention:
//   G_lambda = sum_{k>=1} a_k / (1+lambda)^k,
//   resolvent kernel = (delta + G_lambda) / (1+lambda),
// so the atom weight is 1/(1+lambda).
struct GreenEstimate {
    GridSpec grid;
    RealField regular_part;
    double atom_weight = 1.0; // 1/(1+lambda), exact
    double lambda = 0.0;
    GreenMethod method = GreenMethod::Fourier;
    int series_terms = 0;                // Series only
    double truncation_error_bound = 0.0; // Series only; q^{K+1}/(1-q)
    ZeroModePolicy zero_mode_policy = ZeroModePolicy::Exclude;
    bool mean_adjusted = false; // lambda = 0 with the zero mode excluded
    bool periodized = false;    // kernel failed the boundary-decay guard
    std::string kernel_spec;

    // Positivity (unless mean-adjusted) and evenness; throws on violation.
    void check_invariants() const;
};

struct GreenOptions {
    ZeroModePolicy zero_mode = ZeroModePolicy::Exclude;
    bool allow_heavy = false; // experimental-route opt-in for heavy tails
    Exec exec = Exec::Parallel;
};

// a_hat on the dual lattice: closed form per point when the family has one,
// otherwise the transform of the sampled density (periodized for fat tails).
SpectralField kernel_fourier_on_grid(const JumpKernel& kernel, const GridSpec& grid,
                                     Exec exec = Exec::Parallel);

// G_lambda by spectral inversion of a_hat/(1 + lambda - a_hat). At lambda = 0
// the dual zero mode diverges; policy Exclude zeroes it (differences only are
// certified), policy Richardson extrapolates lambda in {0.1, 0.05, 0.025} to 0.
GreenEstimate green_fourier(const JumpKernel& kernel, const GridSpec& grid, double lambda,
                            const GreenOptions& opts = {});

// G_lambda by the truncated convolution-power series sum_{j<=K} a_j/(1+lambda)^j,
// accumulated in the spectral domain; stops early once
// q^{K+1}/(1-q) < tol with q = max_{k != 0} |a_hat| / (1+lambda).
GreenEstimate green_series(const JumpKernel& kernel, const GridSpec& grid, double lambda,
                           int max_terms, double tol, const GreenOptions& opts = {});

// Grid-free reference for the gaussian family:
//   G_lambda(|x|) = sum_{k>=1} (b/(2 pi k))^{d/2} exp(-b|x|^2/(2k)) (1+lambda)^{-k},
// partial sums plus an integral tail correction keep the error below tol.
double gauss_green_closed(double b, int dim, double radius, double lambda, double tol);
double gauss_g0_closed(double b, int dim, double radius, double tol);

RealField sample_test_function(const TestFunction& f, const GridSpec& grid,
                               Exec exec = Exec::Parallel);

// R_lambda f = (f + G_lambda * f) / (1 + lambda); solves ((1+lambda) - a*) R = f.
RealField resolvent_apply(const JumpKernel& kernel, const TestFunction& f, double lambda,
                          const GridSpec& grid, Exec exec = Exec::Parallel);

// p(t, .) = e^{-t} delta + density_part, density_part from e^{t(a_hat - 1)} - e^{-t}.
struct TransitionDensity {
    double t = 0.0;
    double atom_weight = 1.0; // e^{-t}
    RealField density_part;
};

SpectralField transition_spectral(const JumpKernel& kernel, double t, const GridSpec& grid,
                                  Exec exec = Exec::Parallel);
TransitionDensity transition_density(const JumpKernel& kernel, double t, const GridSpec& grid,
                                     Exec exec = Exec::Parallel);

// V_lambda(f, x) = atom_weight f(x) + atom_weight (G_lambda * f)(x).
struct PotentialResult {
    double value = 0.0;
    bool zero_mode_uncertain = false; // est was mean-adjusted at lambda = 0
};
PotentialResult potential(const GreenEstimate& est, const TestFunction& f,
                          std::span<const double> x, Exec exec = Exec::Parallel);

// Brownian motion with generator Delta (not Delta/2): heat kernel
// (4 pi t)^{-d/2} exp(-|x|^2/(4t)).
double bm_green(std::span<const double> x, std::span<const double> y, int dim);
double bm_green_radial(double r, int dim);
double newtonian_constant(int dim); // Gamma(d/2-1) / (4 pi^{d/2})

// Independent oracle for the constant: adaptive quadrature of
// int_0^{t_max} (4 pi t)^{-d/2} e^{-r^2/(4t)} dt; the neglected tail is
// bounded analytically and counted against tol.
double heat_kernel_time_integral(double r, int dim, double t_max, double tol);

// V(f, x) = C(d) int f(y) |x-y|^{2-d} dy for f in CL (bounded + integrable),
// radial bump families. d = 3 supports any center through the spherical-mean
// chord formula; d > 3 needs the bump centered at x. cl_bound, when passed,
// receives the a-priori bound C max(S_{d-1}/2, 1) ||f||_CL from the unit-ball
// split, which |V| never exceeds.
double bm_potential(const TestFunction& f, std::span<const double> x, int dim, double tol = 1e-9,
                    double* cl_bound = nullptr);

} // namespace gpot
