#include "gpot/green.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "gpot/errors.hpp"
#include "gpot/quadrature.hpp"
#include "gpot/special.hpp"

namespace gpot {
namespace {

double dist(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

// --------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::gaussian_bump(std::vector<double> center, double width, double height) {
    if (!(width > 0.0)) throw Error(Errc::ParseError, "gaussian bump needs width > 0");
    TestFunction f;
    f.family_ = Family::GaussianBump;
    f.center_ = std::move(center);
    f.width_ = width;
    f.height_ = height;
    return f;
}

TestFunction TestFunction::compact_bump(std::vector<double> center, double radius, double height) {
    if (!(radius > 0.0)) throw Error(Errc::ParseError, "compact bump needs radius > 0");
    TestFunction f;
    f.family_ = Family::CompactBump;
    f.center_ = std::move(center);
    f.width_ = radius;
    f.height_ = height;
    return f;
}

TestFunction TestFunction::custom(RealField samples) {
    TestFunction f;
    f.family_ = Family::Custom;
    f.center_.assign(static_cast<std::size_t>(samples.grid.dim), 0.0);
    f.samples_ = std::move(samples);
    return f;
}

TestFunction TestFunction::parse(std::string_view spec, int dim) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw Error(Errc::ParseError, "test function spec needs '<family>:<params>'");
    const std::string_view family = spec.substr(0, colon);
    std::string_view rest = spec.substr(colon + 1);
    double w = 1.0, h = 1.0, r = 1.0;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = (comma == std::string_view::npos) ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::ParseError, "test function param needs key=value");
        const std::string val(item.substr(eq + 1));
        char* end = nullptr;
        const double num = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw Error(Errc::ParseError, "test function param has non-numeric value");
        const std::string_view key = item.substr(0, eq);
        if (key == "w") w = num;
        else if (key == "h") h = num;
        else if (key == "r") r = num;
        else throw Error(Errc::ParseError, "unknown test function param '" + std::string(key) + "'");
    }
    std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
    if (family == "gaussbump") return gaussian_bump(std::move(c), w, h);
    if (family == "compact") return compact_bump(std::move(c), r, h);
    throw Error(Errc::ParseError, "unknown test function family '" + std::string(family) + "'");
}

void TestFunction::set_center(std::vector<double> c) {
    if (family_ == Family::Custom)
        throw Error(Errc::ValidationError, "custom test functions are grid-anchored");
    center_ = std::move(c);
}

int TestFunction::dim() const {
    return family_ == Family::Custom ? samples_.grid.dim : static_cast<int>(center_.size());
}

bool TestFunction::is_radial() const { return family_ != Family::Custom; }

std::span<const double> TestFunction::center() const { return center_; }

double TestFunction::radial_profile(double r) const {
    switch (family_) {
        case Family::GaussianBump:
            return height_ * std::exp(-0.5 * r * r / (width_ * width_));
        case Family::CompactBump: {
            const double u = r / width_;
            if (u >= 1.0) return 0.0;
            return height_ * std::exp(1.0 - 1.0 / (1.0 - u * u));
        }
        case Family::Custom: break;
    }
    throw Error(Errc::ValidationError, "custom test functions have no radial profile");
}

double TestFunction::operator()(std::span<const double> y) const {
    if (family_ == Family::Custom) {
        const GridSpec& g = samples_.grid;
        const double h = g.spacing();
        std::int64_t f = 0;
        for (int a = 0; a < g.dim; ++a) {
            const long j = std::lround(y[static_cast<std::size_t>(a)] / h) + g.n / 2;
            if (j < 0 || j >= g.n) return 0.0;
            f = f * g.n + j;
        }
        return samples_[f];
    }
    // hot path for the Monte Carlo integrators: no square root needed
    double r2 = 0.0;
    for (std::size_t i = 0; i < center_.size(); ++i) {
        const double d = y[i] - center_[i];
        r2 += d * d;
    }
    if (family_ == Family::GaussianBump)
        return height_ * std::exp(-0.5 * r2 / (width_ * width_));
    const double u2 = r2 / (width_ * width_);
    if (u2 >= 1.0) return 0.0;
    return height_ * std::exp(1.0 - 1.0 / (1.0 - u2));
}

double TestFunction::sup_norm() const {
    if (family_ == Family::Custom) return field_max_abs(samples_, Exec::Serial);
    return std::abs(height_);
}

double TestFunction::l1_norm() const {
    const int d = dim();
    switch (family_) {
        case Family::GaussianBump:
            return std::abs(height_) * std::pow(2.0 * M_PI, 0.5 * d) * std::pow(width_, d);
        case Family::CompactBump: {
            const double q = integrate(
                                 [&](double r) {
                                     return std::abs(radial_profile(r)) * std::pow(r, d - 1);
                                 },
                                 0.0, width_, 1e-12, 1e-12)
                                 .value;
            return sphere_surface(d) * q;
        }
        case Family::Custom: {
            double s = 0.0;
            for (double v : samples_.values) s += std::abs(v);
            return s * samples_.grid.cell_volume();
        }
    }
    return 0.0;
}

double TestFunction::support_radius() const {
    switch (family_) {
        case Family::GaussianBump: return width_ * 38.0; // exp underflows past ~37.6 widths
        case Family::CompactBump: return width_;
        case Family::Custom:
            return samples_.grid.half_width * std::sqrt(static_cast<double>(samples_.grid.dim));
    }
    return 0.0;
}

// --------------------------------------------------------------------------
// Green estimates

const char* zero_mode_policy_name(ZeroModePolicy p) {
    return p == ZeroModePolicy::Exclude ? "excluded" : "richardson";
}

const char* green_method_name(GreenMethod m) { return m == GreenMethod::Fourier ? "fourier" : "series"; }

void GreenEstimate::check_invariants() const {
    if (std::abs(atom_weight - 1.0 / (1.0 + lambda)) > 1e-15)
        throw Error(Errc::ValidationError, "atom weight must equal 1/(1+lambda)");
    // Positivity: G is a sum of nonnegative convolutions, but a mean-adjusted
    // field sits below zero far out by construction, so only the raw routes
    // are held to it.
    if (!mean_adjusted) {
        double mn = 0.0;
        for (double v : regular_part.values) mn = std::min(mn, v);
        if (mn < -1e-10)
            throw Error(Errc::ValidationError, "regular part dips below -1e-10: " + std::to_string(mn));
    }
    // Evenness G(x) = G(-x). Index n-j mirrors j; the j = 0 plane has no
    // mirror on an even grid and is skipped.
    const GridSpec& g = regular_part.grid;
    const double scale = field_max_abs(regular_part, Exec::Serial);
    std::vector<int> idx(static_cast<std::size_t>(g.dim)), mirror(static_cast<std::size_t>(g.dim));
    for (std::int64_t i = 0; i < g.total(); ++i) {
        g.multi_index(i, idx);
        bool ok = true;
        for (int a = 0; a < g.dim; ++a) {
            if (idx[static_cast<std::size_t>(a)] == 0) { ok = false; break; }
            mirror[static_cast<std::size_t>(a)] = (g.n - idx[static_cast<std::size_t>(a)]) % g.n;
        }
        if (!ok) continue;
        if (std::abs(regular_part[i] - regular_part[g.flat_index(mirror)]) > 1e-10 * scale)
            throw Error(Errc::ValidationError, "regular part violates evenness");
    }
}

SpectralField kernel_fourier_on_grid(const JumpKernel& kernel, const GridSpec& grid, Exec exec) {
    SpectralField out;
    out.grid = grid;
    out.values.resize(static_cast<std::size_t>(grid.total()));
    if (kernel.has_analytic_fourier()) {
        const int d = grid.dim;
        parallel_for(
            grid.total(),
            [&](std::int64_t i) {
                double k[8];
                std::int64_t f = i;
                double k2 = 0.0;
                for (int a = d - 1; a >= 0; --a) {
                    k[a] = grid.freq(static_cast<int>(f % grid.n));
                    k2 += k[a] * k[a];
                    f /= grid.n;
                }
                out[i] = kernel.fourier_radial(std::sqrt(k2), FourierRoute::Analytic);
            },
            exec);
        return out;
    }
    // Numeric route: transform of the sampled density, with cell averaging
    // near the power-law peak so the lattice mass stays at 1, and the cell
    // window deconvolved afterwards (averaging multiplies the spectrum by
    // sinc(k h/2) per axis, which would damp the peak's high-k content).
    // Fat tails wrap around the box, so callers label such results
    // periodized.
    const RealField a = sample_on_grid_cell_averaged(
        [&](std::span<const double> x) { return kernel.density(x); }, grid,
        5.0 * kernel.length_scale(), exec);
    SpectralField ahat = dft_forward(a, exec);
    const double half_h = 0.5 * grid.spacing();
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            std::int64_t f = i;
            double window = 1.0;
            for (int a2 = grid.dim - 1; a2 >= 0; --a2) {
                const double k = grid.freq(static_cast<int>(f % grid.n));
                f /= grid.n;
                const double z = k * half_h;
                window *= z == 0.0 ? 1.0 : std::sin(z) / z;
            }
            ahat[i] = ahat[i].real() / window;
        },
        exec);
    out = std::move(ahat);
    return out;
}

namespace {

bool kernel_fits_box(const JumpKernel& kernel, const GridSpec& grid) {
    const double peak = kernel.radial_density(0.0);
    return kernel.radial_density(grid.half_width) <= 1e-8 * peak;
}

void require_green_preconditions(const JumpKernel& kernel, const GridSpec& grid, double lambda,
                                 const GreenOptions& opts) {
    if (kernel.dim() != grid.dim)
        throw Error(Errc::ValidationError, "kernel and grid dimensions differ");
    if (lambda < 0.0) throw Error(Errc::ValidationError, "lambda must be >= 0");
    if (lambda == 0.0 && grid.dim < 3)
        throw Error(Errc::DimensionTooSmall,
                    "G_0 requires d >= 3; use lambda > 0 in low dimension");
    if (kernel.tail() == TailClass::Heavy && !opts.allow_heavy)
        throw Error(Errc::HeavyTailUnsupported,
                    "heavy-tail kernels need the experimental opt-in flag");
}

// Periodic-box image potential for d = 3, Ewald-split so both halves fit the
// grid: on the dual lattice k = (pi/L) Z^3,
//   W(x) = (1/V) sum_{k != 0} (4 pi / k^2) e^{-k^2/(4 a^2)} e^{i k x}
//          - erf(a |x|)/|x| - pi/(a^2 V).
// W equals sum_{m != 0} 1/|x + 2Lm| with a neutralizing background: exactly
// the spurious Newtonian image cloud a zero-mode-excluded G_0 inversion
// carries, scaled by the kernel's far-field constant.
RealField box_image_potential(const GridSpec& grid, Exec exec) {
    const double k_max = grid.freq_step() * (grid.n / 2);
    const double alpha = k_max / 11.4; // e^{-k_max^2 / 4 alpha^2} ~ 1e-14
    SpectralField recip;
    recip.grid = grid;
    recip.values.resize(static_cast<std::size_t>(grid.total()));
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            std::int64_t f = i;
            double k2 = 0.0;
            for (int a = grid.dim - 1; a >= 0; --a) {
                const double k = grid.freq(static_cast<int>(f % grid.n));
                k2 += k * k;
                f /= grid.n;
            }
            recip[i] = k2 == 0.0 ? 0.0
                                 : 4.0 * M_PI * std::exp(-0.25 * k2 / (alpha * alpha)) / k2;
        },
        exec);
    RealField w = dft_inverse(recip, exec);
    const double volume = std::pow(2.0 * grid.half_width, grid.dim);
    const double background = M_PI / (alpha * alpha * volume);
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            double x[8];
            grid.point(i, std::span<double>(x, static_cast<std::size_t>(grid.dim)));
            double r2 = 0.0;
            for (int a = 0; a < grid.dim; ++a) r2 += x[a] * x[a];
            const double r = std::sqrt(r2);
            const double direct = r < 1e-12 ? 2.0 * alpha / std::sqrt(M_PI) : std::erf(alpha * r) / r;
            w[i] -= direct + background;
        },
        exec);
    return w;
}

GreenEstimate invert_green_spectrum(const JumpKernel& kernel, const GridSpec& grid, double lambda,
                                    const SpectralField& ahat, const GreenOptions& opts,
                                    bool exclude_zero_mode, double zero_mode_value) {
    SpectralField ghat;
    ghat.grid = grid;
    ghat.values.resize(static_cast<std::size_t>(grid.total()));
    const std::int64_t zero = grid.zero_flat();
    double amax = -1e300;
    for (std::int64_t i = 0; i < grid.total(); ++i) {
        if (i == zero) continue;
        amax = std::max(amax, ahat[i].real());
    }
    if (1.0 + lambda - amax <= 1e-12)
        throw Error(Errc::NotConverged,
                    "grid does not resolve the kernel: spectral radius reaches 1 + lambda");
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            const std::complex<double> a = ahat[i];
            ghat[i] = a / (1.0 + lambda - a);
        },
        opts.exec);
    if (exclude_zero_mode) ghat[zero] = zero_mode_value;

    GreenEstimate est;
    est.grid = grid;
    est.regular_part = dft_inverse(ghat, opts.exec);
    est.regular_part.unit = "1/length^d";
    est.atom_weight = 1.0 / (1.0 + lambda);
    est.lambda = lambda;
    est.method = GreenMethod::Fourier;
    est.zero_mode_policy = opts.zero_mode;
    est.periodized = !kernel_fits_box(kernel, grid);
    est.kernel_spec = kernel.spec_string();
    return est;
}

} // namespace

GreenEstimate green_fourier(const JumpKernel& kernel, const GridSpec& grid, double lambda,
                            const GreenOptions& opts) {
    require_green_preconditions(kernel, grid, lambda, opts);
    const SpectralField ahat = kernel_fourier_on_grid(kernel, grid, opts.exec);

    if (lambda > 0.0) {
        GreenEstimate est = invert_green_spectrum(kernel, grid, lambda, ahat, opts, false, 0.0);
        return est;
    }

    if (opts.zero_mode == ZeroModePolicy::Exclude) {
        GreenEstimate est = invert_green_spectrum(kernel, grid, 0.0, ahat, opts, true, 0.0);
        est.mean_adjusted = true;
        return est;
    }

    // Richardson: extrapolate zero-mode-excluded fields over the lambda-floor
    // sequence in sqrt(lambda) (the G_lambda - G_0 gap opens as sqrt(lambda)
    // in d = 3). The excluded inversion converges to G_0(x) plus the image
    // cloud c_N W(x); for finite-variance kernels in d = 3 that cloud is
    // removed exactly with the Ewald-split W above.
    const double lams[3] = {0.1, 0.05, 0.025};
    std::vector<RealField> fields;
    fields.reserve(3);
    for (double lam : lams) {
        GreenEstimate e = invert_green_spectrum(kernel, grid, lam, ahat, opts, true, 0.0);
        fields.push_back(std::move(e.regular_part));
    }
    GreenEstimate est;
    est.grid = grid;
    est.regular_part = make_field(grid);
    est.regular_part.unit = "1/length^d";
    const double s0 = std::sqrt(lams[0]), s1 = std::sqrt(lams[1]), s2 = std::sqrt(lams[2]);
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            // Neville to s = 0 through (s_i, G_{lambda_i}(x))
            const double y0 = fields[0][i], y1 = fields[1][i], y2 = fields[2][i];
            const double p01 = (s0 * y1 - s1 * y0) / (s0 - s1);
            const double p12 = (s1 * y2 - s2 * y1) / (s1 - s2);
            est.regular_part[i] = (s0 * p12 - s2 * p01) / (s0 - s2);
        },
        opts.exec);
    if (grid.dim == 3 && kernel.tail() != TailClass::Heavy) {
        const double c_far =
            2.0 * grid.dim / kernel.second_moment_or_throw() * newtonian_constant(grid.dim);
        const RealField w = box_image_potential(grid, opts.exec);
        parallel_for(grid.total(), [&](std::int64_t i) { est.regular_part[i] -= c_far * w[i]; },
                     opts.exec);
    }
    est.atom_weight = 1.0;
    est.lambda = 0.0;
    est.method = GreenMethod::Fourier;
    est.zero_mode_policy = ZeroModePolicy::Richardson;
    est.mean_adjusted = false;
    est.periodized = !kernel_fits_box(kernel, grid);
    est.kernel_spec = kernel.spec_string();
    // extrapolation can undershoot slightly; clamp the tiny negative fringe
    parallel_for(
        grid.total(), [&](std::int64_t i) { est.regular_part[i] = std::max(est.regular_part[i], 0.0); },
        opts.exec);
    return est;
}

GreenEstimate green_series(const JumpKernel& kernel, const GridSpec& grid, double lambda,
                           int max_terms, double tol, const GreenOptions& opts) {
    require_green_preconditions(kernel, grid, lambda, opts);
    if (max_terms < 1) throw Error(Errc::ValidationError, "series needs max_terms >= 1");
    const SpectralField ahat = kernel_fourier_on_grid(kernel, grid, opts.exec);
    const std::int64_t zero = grid.zero_flat();

    // q = max_{k != 0} |a_hat| / (1 + lambda) controls the truncation bound.
    double amax = 0.0;
    for (std::int64_t i = 0; i < grid.total(); ++i) {
        if (i == zero) continue;
        amax = std::max(amax, std::abs(ahat[i]));
    }
    const double q = amax / (1.0 + lambda);
    if (q >= 1.0)
        throw Error(Errc::NotConverged, "series spectral radius >= 1 on this grid");

    const bool exclude_zero = (lambda == 0.0);

    SpectralField term;
    term.grid = grid;
    term.values.resize(static_cast<std::size_t>(grid.total()));
    const double inv = 1.0 / (1.0 + lambda);
    parallel_for(grid.total(), [&](std::int64_t i) { term[i] = ahat[i] * inv; }, opts.exec);
    if (exclude_zero) term[zero] = 0.0;

    // tol <= 0 means "run exactly max_terms" (diagnostics mode, no gate)
    SpectralField acc = term;
    int k = 1;
    double bound = std::pow(q, k + 1) / (1.0 - q);
    while ((tol <= 0.0 || bound >= tol) && k < max_terms) {
        parallel_for(grid.total(), [&](std::int64_t i) { acc[i] += (term[i] *= ahat[i] * inv); },
                     opts.exec);
        ++k;
        bound = std::pow(q, k + 1) / (1.0 - q);
    }
    if (tol > 0.0 && bound >= tol)
        throw Error(Errc::NotConverged, "series truncation bound " + std::to_string(bound) +
                                            " above tol after " + std::to_string(k) + " terms");

    GreenEstimate est;
    est.grid = grid;
    est.regular_part = dft_inverse(acc, opts.exec);
    est.regular_part.unit = "1/length^d";
    est.atom_weight = inv;
    est.lambda = lambda;
    est.method = GreenMethod::Series;
    est.series_terms = k;
    est.truncation_error_bound = bound;
    est.zero_mode_policy = opts.zero_mode;
    est.mean_adjusted = exclude_zero;
    est.periodized = !kernel_fits_box(kernel, grid);
    est.kernel_spec = kernel.spec_string();
    return est;
}

// --------------------------------------------------------------------------
// Closed-form gaussian reference

double gauss_green_closed(double b, int dim, double radius, double lambda, double tol) {
    if (dim < 3 && lambda == 0.0)
        throw Error(Errc::DimensionTooSmall, "G_0 series diverges for d < 3");
    if (!(b > 0.0)) throw Error(Errc::ValidationError, "b must be > 0");
    const double pref = std::pow(b / (2.0 * M_PI), 0.5 * dim);
    const double c = 0.5 * b * radius * radius;
    const double rho = 1.0 / (1.0 + lambda);
    const double half_d = 0.5 * dim;

    if (lambda > 0.0) {
        double sum = 0.0;
        double rho_k = 1.0;
        for (long k = 1; k <= 100000000L; ++k) {
            rho_k *= rho;
            sum += std::pow(static_cast<double>(k), -half_d) * std::exp(-c / k) * rho_k;
            if (k >= 4) {
                const double tail =
                    pref * std::pow(static_cast<double>(k + 1), -half_d) * rho_k * rho / (1.0 - rho);
                if (tail < tol) return pref * sum;
            }
        }
        throw Error(Errc::NotConverged, "discounted closed series did not reach tol");
    }

    // lambda = 0: partial sum to N plus the midpoint-rule integral tail
    //   sum_{k>N} f(k) ~ int_{N+1/2}^inf t^{-d/2} e^{-c/t} dt,
    // whose error is bounded by |f'(N+1/2)|/24 for the eventually monotone f.
    auto run = [&](long n_terms) {
        double sum = 0.0;
        for (long k = 1; k <= n_terms; ++k)
            sum += std::pow(static_cast<double>(k), -half_d) * std::exp(-c / k);
        const double m = n_terms + 0.5;
        double tail;
        if (c == 0.0) {
            tail = std::pow(m, 1.0 - half_d) / (half_d - 1.0);
        } else {
            tail = std::pow(c, 1.0 - half_d) * std::tgamma(half_d - 1.0) *
                   gamma_p(half_d - 1.0, c / m);
        }
        const double fm = std::pow(m, -half_d) * std::exp(-c / m);
        const double err = fm * (c / (m * m) + half_d / m) / 24.0;
        return std::pair<double, double>(pref * (sum + tail), pref * err);
    };

    long n = std::max<long>(64, static_cast<long>(2.0 * c));
    for (int iter = 0; iter < 24; ++iter) {
        const auto [value, err] = run(n);
        if (err < tol) return value;
        n *= 2;
    }
    throw Error(Errc::NotConverged, "G_0 closed series did not reach tol");
}

double gauss_g0_closed(double b, int dim, double radius, double tol) {
    return gauss_green_closed(b, dim, radius, 0.0, tol);
}

// --------------------------------------------------------------------------
// Resolvent, transition density, potentials

RealField sample_test_function(const TestFunction& f, const GridSpec& grid, Exec exec) {
    return sample_on_grid([&](std::span<const double> x) { return f(x); }, grid, exec);
}

RealField resolvent_apply(const JumpKernel& kernel, const TestFunction& f, double lambda,
                          const GridSpec& grid, Exec exec) {
    if (!(lambda > 0.0)) throw Error(Errc::ValidationError, "resolvent needs lambda > 0");
    GreenOptions opts;
    opts.exec = exec;
    const GreenEstimate est = green_fourier(kernel, grid, lambda, opts);
    const RealField f_grid = sample_test_function(f, grid, exec);
    RealField conv = convolve(est.regular_part, f_grid, nullptr, exec);
    parallel_for(grid.total(), [&](std::int64_t i) { conv[i] = est.atom_weight * (f_grid[i] + conv[i]); },
                 exec);
    return conv;
}

SpectralField transition_spectral(const JumpKernel& kernel, double t, const GridSpec& grid,
                                  Exec exec) {
    if (t < 0.0) throw Error(Errc::ValidationError, "time must be >= 0");
    SpectralField ph = kernel_fourier_on_grid(kernel, grid, exec);
    parallel_for(grid.total(), [&](std::int64_t i) { ph[i] = std::exp(t * (ph[i] - 1.0)); }, exec);
    return ph;
}

TransitionDensity transition_density(const JumpKernel& kernel, double t, const GridSpec& grid,
                                     Exec exec) {
    TransitionDensity out;
    out.t = t;
    out.atom_weight = std::exp(-t);
    SpectralField ph = transition_spectral(kernel, t, grid, exec);
    parallel_for(grid.total(), [&](std::int64_t i) { ph[i] -= out.atom_weight; }, exec);
    out.density_part = dft_inverse(ph, exec);
    out.density_part.unit = "1/length^d";
    return out;
}

PotentialResult potential(const GreenEstimate& est, const TestFunction& f,
                          std::span<const double> x, Exec exec) {
    const std::int64_t ix = est.grid.index_of_point(x);
    const RealField f_grid = sample_test_function(f, est.grid, exec);
    const RealField conv = convolve(est.regular_part, f_grid, nullptr, exec);
    PotentialResult out;
    out.value = est.atom_weight * (f_grid[ix] + conv[ix]);
    out.zero_mode_uncertain = est.mean_adjusted;
    return out;
}

// --------------------------------------------------------------------------
// Brownian motion (generator Delta, heat kernel (4 pi t)^{-d/2} e^{-r^2/4t})

double newtonian_constant(int dim) {
    if (dim < 3) throw Error(Errc::DimensionTooSmall, "Newtonian constant needs d >= 3");
    return std::tgamma(0.5 * dim - 1.0) / (4.0 * std::pow(M_PI, 0.5 * dim));
}

double bm_green_radial(double r, int dim) {
    if (dim < 3) throw Error(Errc::DimensionTooSmall, "Brownian Green function needs d >= 3");
    if (r <= 0.0) throw Error(Errc::SingularAtCoincidence, "Green function singular at x = y");
    return newtonian_constant(dim) * std::pow(r, 2.0 - dim);
}

double bm_green(std::span<const double> x, std::span<const double> y, int dim) {
    if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim)
        throw Error(Errc::ValidationError, "point dimension mismatch");
    return bm_green_radial(dist(x, y), dim);
}

double heat_kernel_time_integral(double r, int dim, double t_max, double tol) {
    if (dim < 3) throw Error(Errc::DimensionTooSmall, "time integral diverges for d < 3");
    if (!(r > 0.0)) throw Error(Errc::SingularAtCoincidence, "needs r > 0");
    // integrate in s = log t; the integrand is smooth and compactly peaked
    const double half_d = 0.5 * dim;
    auto g = [&](double s) {
        const double t = std::exp(s);
        return std::pow(4.0 * M_PI * t, -half_d) * std::exp(-0.25 * r * r / t) * t;
    };
    // below s_lo the exponential factor is ~e^{-45}; above log(t_max) we stop
    const double s_lo = std::log(r * r / 180.0);
    const double s_hi = std::log(t_max);
    if (s_hi <= s_lo) throw Error(Errc::ValidationError, "t_max too small for this radius");
    const QuadResult q = integrate(g, s_lo, s_hi, tol * 1e-3, tol * 1e-3);
    const double tail =
        std::pow(4.0 * M_PI, -half_d) * std::pow(t_max, 1.0 - half_d) / (half_d - 1.0);
    const double value = q.value;
    if (q.error + tail > tol * std::abs(value))
        throw Error(Errc::NotConverged, "heat-kernel quadrature budget exceeded; raise t_max");
    return value;
}

double bm_potential(const TestFunction& f, std::span<const double> x, int dim, double tol,
                    double* cl_bound) {
    if (dim < 3) throw Error(Errc::DimensionTooSmall, "Brownian potential needs d >= 3");
    if (!f.is_radial())
        throw Error(Errc::ValidationError, "bm_potential supports radial bump families");
    if (cl_bound) {
        // |x-y| <= 1 against ||f||_inf, the rest against ||f||_1
        *cl_bound = newtonian_constant(dim) * std::max(0.5 * sphere_surface(dim), 1.0) *
                    f.cl_norm();
    }
    const double rho = dist(x, f.center());
    const double reff = f.support_radius();

    if (rho < 1e-12) {
        // centered: C(d) S_{d-1} int f(r) r dr and C(d) S_{d-1} = 1/(d-2)
        const QuadResult q =
            integrate([&](double r) { return f.radial_profile(r) * r; }, 0.0, reff, tol, tol);
        return q.value / (dim - 2.0);
    }
    if (dim != 3)
        throw Error(Errc::ValidationError,
                    "off-center bm_potential implemented for d = 3 (spherical chord means)");

    // d = 3: V = int_0^inf s * mean_{|u|=s} f(x+u) ds with the chord formula
    //   mean(s) = (2 rho s)^{-1} int_{|rho-s|}^{rho+s} tau f(tau) dtau.
    auto mean_s = [&](double s) {
        const double lo = std::abs(rho - s), hi = rho + s;
        if (lo >= reff) return 0.0;
        const QuadResult inner = integrate(
            [&](double tau) { return tau * f.radial_profile(tau); }, lo, std::min(hi, reff),
            tol * 1e-2, tol * 1e-2);
        return inner.value / (2.0 * rho * s);
    };
    const double s_lo = std::max(0.0, rho - reff), s_hi = rho + reff;
    const QuadResult outer =
        integrate([&](double s) { return s * mean_s(s); }, s_lo, s_hi, tol, tol);
    return outer.value;
}

} // namespace gpot
