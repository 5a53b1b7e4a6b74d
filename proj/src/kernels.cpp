#include "gpot/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "gpot/errors.hpp"
#include "gpot/quadrature.hpp"
#include "gpot/special.hpp"

namespace gpot {
namespace {

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Oscillatory radial Fourier integral, summed between consecutive phase
// nodes so the alternating tail bounds the truncation error. Segments are
// capped at the kernel's radial scale so a long first half-period cannot
// hide the bump from the panel nodes.
double oscillatory_radial(const std::function<double(double)>& weight, double k,
                          const std::function<double(double, double)>& osc, double r_scale,
                          double tol) {
    const double seg = std::min(M_PI / k, r_scale);
    double total = 0.0;
    int consecutive_small = 0;
    const int min_segments = static_cast<int>(r_scale / seg) + 3;
    const int max_segments = 200000;
    for (int j = 0; j < max_segments; ++j) {
        const double a = j * seg, b = (j + 1) * seg;
        QuadResult q = integrate([&](double r) { return weight(r) * osc(k, r); }, a, b,
                                 tol * 1e-2, 1e-12);
        total += q.value;
        consecutive_small = std::abs(q.value) < tol ? consecutive_small + 1 : 0;
        if (j >= min_segments && consecutive_small >= 2) break;
    }
    return total;
}

} // namespace

const char* tail_class_name(TailClass t) {
    switch (t) {
        case TailClass::LightGaussian: return "gauss";
        case TailClass::LightExponential: return "exp";
        case TailClass::Moderate: return "moderate";
        case TailClass::Heavy: return "heavy";
    }
    return "?";
}

double JumpKernel::profile(double r) const {
    switch (tail_) {
        case TailClass::LightGaussian: return std::exp(-0.5 * b_ * r * r);
        case TailClass::LightExponential: return std::exp(-delta_ * r);
        case TailClass::Moderate:
        case TailClass::Heavy: return std::pow(1.0 + r / scale_, -(dim_ + gamma_));
    }
    return 0.0;
}

double JumpKernel::radial_profile_integral(double power) const {
    switch (tail_) {
        case TailClass::LightGaussian:
            return integrate_semi_infinite(
                       [&](double r) { return std::exp(-0.5 * b_ * r * r) * std::pow(r, power); }, 0.0,
                       1e-12, 1e-12)
                .value;
        case TailClass::LightExponential:
            return integrate_semi_infinite(
                       [&](double r) { return std::exp(-delta_ * r) * std::pow(r, power); }, 0.0, 1e-12,
                       1e-12)
                .value;
        case TailClass::Moderate:
        case TailClass::Heavy: {
            // u = (r/l)/(1 + r/l) turns the integral into a Beta integral:
            // int r^p (1+r/l)^{-(d+g)} dr = l^{p+1} B(p+1, d+g-p-1).
            const double q = dim_ + gamma_ - power - 1.0;
            if (q <= 0.0)
                throw Error(Errc::InfiniteMoment, "radial moment of order " + fmt_num(power) +
                                                      " diverges for gamma=" + fmt_num(gamma_));
            return std::pow(scale_, power + 1.0) * beta_integral_quad(power + 1.0, q).value;
        }
    }
    return 0.0;
}

JumpKernel JumpKernel::gaussian(int dim, double b) {
    if (dim < 1) throw Error(Errc::ParseError, "dim must be >= 1");
    if (!(b > 0.0)) throw Error(Errc::ParseError, "gauss kernel needs b > 0");
    JumpKernel k;
    k.tail_ = TailClass::LightGaussian;
    k.dim_ = dim;
    k.b_ = b;
    k.c_norm_ = std::pow(b / (2.0 * M_PI), 0.5 * dim);
    return k;
}

JumpKernel JumpKernel::exponential(int dim, double delta) {
    if (dim < 1) throw Error(Errc::ParseError, "dim must be >= 1");
    if (!(delta > 0.0)) throw Error(Errc::ParseError, "exp kernel needs delta > 0");
    JumpKernel k;
    k.tail_ = TailClass::LightExponential;
    k.dim_ = dim;
    k.delta_ = delta;
    k.c_norm_ = 1.0 / (sphere_surface(dim) * k.radial_profile_integral(dim - 1.0));
    return k;
}

JumpKernel JumpKernel::moderate(int dim, double gamma, double scale) {
    if (dim < 1) throw Error(Errc::ParseError, "dim must be >= 1");
    if (!(gamma > 2.0)) throw Error(Errc::ParseError, "moderate kernel needs gamma > 2");
    if (!(scale > 0.0)) throw Error(Errc::ParseError, "scale must be > 0");
    JumpKernel k;
    k.tail_ = TailClass::Moderate;
    k.dim_ = dim;
    k.gamma_ = gamma;
    k.scale_ = scale;
    k.c_norm_ = 1.0 / (sphere_surface(dim) * k.radial_profile_integral(dim - 1.0));
    return k;
}

JumpKernel JumpKernel::heavy(int dim, double gamma, double scale) {
    if (dim < 1) throw Error(Errc::ParseError, "dim must be >= 1");
    if (!(gamma > 0.0 && gamma < 2.0))
        throw Error(Errc::ParseError, "heavy kernel needs gamma in (0, 2)");
    if (!(scale > 0.0)) throw Error(Errc::ParseError, "scale must be > 0");
    JumpKernel k;
    k.tail_ = TailClass::Heavy;
    k.dim_ = dim;
    k.gamma_ = gamma;
    k.scale_ = scale;
    k.c_norm_ = 1.0 / (sphere_surface(dim) * k.radial_profile_integral(dim - 1.0));
    return k;
}

JumpKernel JumpKernel::parse(std::string_view spec, int default_dim) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw Error(Errc::ParseError, "kernel spec needs '<family>:<params>', got '" +
                                          std::string(spec) + "'");
    const std::string_view family = spec.substr(0, colon);
    std::string_view rest = spec.substr(colon + 1);

    double b = 0, delta = 0, gamma = 0, scale = 1.0;
    int dim = default_dim;
    bool have_b = false, have_delta = false, have_gamma = false;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = (comma == std::string_view::npos) ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::ParseError, "kernel param '" + std::string(item) + "' needs key=value");
        const std::string_view key = item.substr(0, eq);
        const std::string val(item.substr(eq + 1));
        char* end = nullptr;
        const double num = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw Error(Errc::ParseError, "kernel param '" + std::string(key) + "' has non-numeric value '" + val + "'");
        if (key == "b") { b = num; have_b = true; }
        else if (key == "delta") { delta = num; have_delta = true; }
        else if (key == "gamma") { gamma = num; have_gamma = true; }
        else if (key == "scale") { scale = num; }
        else if (key == "dim") { dim = static_cast<int>(num); }
        else throw Error(Errc::ParseError, "unknown kernel param '" + std::string(key) + "'");
    }

    if (family == "gauss") {
        if (!have_b) throw Error(Errc::ParseError, "gauss kernel needs b=<float>");
        return gaussian(dim, b);
    }
    if (family == "exp") {
        if (!have_delta) throw Error(Errc::ParseError, "exp kernel needs delta=<float>");
        return exponential(dim, delta);
    }
    if (family == "moderate") {
        if (!have_gamma) throw Error(Errc::ParseError, "moderate kernel needs gamma=<float>");
        return moderate(dim, gamma, scale);
    }
    if (family == "heavy") {
        if (!have_gamma) throw Error(Errc::ParseError, "heavy kernel needs gamma=<float>");
        return heavy(dim, gamma, scale);
    }
    throw Error(Errc::ParseError, "unknown kernel family '" + std::string(family) + "'");
}

std::string JumpKernel::spec_string() const {
    switch (tail_) {
        case TailClass::LightGaussian: return "gauss:b=" + fmt_num(b_) + ",dim=" + std::to_string(dim_);
        case TailClass::LightExponential:
            return "exp:delta=" + fmt_num(delta_) + ",dim=" + std::to_string(dim_);
        case TailClass::Moderate:
            return "moderate:gamma=" + fmt_num(gamma_) + ",scale=" + fmt_num(scale_) +
                   ",dim=" + std::to_string(dim_);
        case TailClass::Heavy:
            return "heavy:gamma=" + fmt_num(gamma_) + ",scale=" + fmt_num(scale_) +
                   ",dim=" + std::to_string(dim_);
    }
    return "?";
}

double JumpKernel::density(std::span<const double> x) const {
    return radial_density(std::sqrt(norm2(x)));
}

double JumpKernel::radial_density(double r) const { return c_norm_ * profile(r); }

bool JumpKernel::has_analytic_fourier() const {
    return tail_ == TailClass::LightGaussian || tail_ == TailClass::LightExponential;
}

double JumpKernel::fourier(std::span<const double> k, FourierRoute route) const {
    return fourier_radial(std::sqrt(norm2(k)), route);
}

double JumpKernel::fourier_radial(double kmag, FourierRoute route) const {
    if (route == FourierRoute::Analytic && !has_analytic_fourier())
        throw Error(Errc::UnsupportedAnalytic,
                    std::string(tail_class_name(tail_)) + " family has no closed-form transform");
    const bool analytic =
        route == FourierRoute::Analytic || (route == FourierRoute::Auto && has_analytic_fourier());
    if (analytic) {
        if (tail_ == TailClass::LightGaussian) return std::exp(-0.5 * kmag * kmag / b_);
        // exp(-delta r) <-> (1 + |k|^2/delta^2)^{-(d+1)/2}
        return std::pow(1.0 + kmag * kmag / (delta_ * delta_), -0.5 * (dim_ + 1));
    }

    if (kmag < 1e-9) return 1.0; // unit mass
    const double tol = 1e-10;
    double r_scale = 1.0;
    switch (tail_) {
        case TailClass::LightGaussian: r_scale = 8.0 / std::sqrt(b_); break;
        case TailClass::LightExponential: r_scale = 35.0 / delta_; break;
        case TailClass::Moderate:
        case TailClass::Heavy: r_scale = 25.0 * scale_; break;
    }
    double integral = 0.0;
    if (dim_ == 1) {
        integral = 2.0 * oscillatory_radial([&](double r) { return radial_density(r); }, kmag,
                                            [](double k, double r) { return std::cos(k * r); },
                                            r_scale, tol);
    } else if (dim_ == 3) {
        integral = 4.0 * M_PI / kmag *
                   oscillatory_radial([&](double r) { return radial_density(r) * r; }, kmag,
                                      [](double k, double r) { return std::sin(k * r); }, r_scale,
                                      tol);
    } else {
        const double nu = 0.5 * dim_ - 1.0;
        integral = std::pow(2.0 * M_PI, 0.5 * dim_) * std::pow(kmag, 1.0 - 0.5 * dim_) *
                   oscillatory_radial(
                       [&](double r) { return radial_density(r) * std::pow(r, 0.5 * dim_); }, kmag,
                       [nu](double k, double r) {
                           return r == 0.0 ? 0.0 : std::cyl_bessel_j(nu, k * r);
                       },
                       r_scale, tol);
    }
    return integral;
}

KernelMoments JumpKernel::moments() const {
    KernelMoments m;
    const double surf = sphere_surface(dim_);
    m.mass = surf * c_norm_ * radial_profile_integral(dim_ - 1.0);
    m.sup_density = c_norm_; // profiles are radially decreasing with profile(0) = 1
    if (tail_ == TailClass::Heavy) {
        m.second_moment = std::nullopt;
    } else {
        m.second_moment = surf * c_norm_ * radial_profile_integral(dim_ + 1.0);
    }
    return m;
}

double JumpKernel::second_moment_or_throw() const {
    const KernelMoments m = moments();
    if (!m.second_moment)
        throw Error(Errc::InfiniteMoment, "heavy-tail kernel has no finite second moment");
    return *m.second_moment;
}

void JumpKernel::sample_jump(PathRng& rng, std::span<double> out) const {
    if (static_cast<int>(out.size()) != dim_)
        throw Error(Errc::ValidationError, "sample_jump output span has wrong dimension");

    if (tail_ == TailClass::LightGaussian) {
        const double inv_sqrt_b = 1.0 / std::sqrt(b_);
        for (auto& v : out) v = rng.normal() * inv_sqrt_b;
        return;
    }

    double r = 0.0;
    if (tail_ == TailClass::LightExponential) {
        // radius ~ Gamma(d, 1/delta): sum of d unit exponentials over delta
        double g = 0.0;
        for (int i = 0; i < dim_; ++i) g += rng.exponential();
        r = g / delta_;
    } else {
        // radius/scale = U/(1-U) with U ~ Beta(d, gamma)
        double x = 0.0;
        for (int i = 0; i < dim_; ++i) x += rng.exponential(); // Gamma(d)
        const double y = rng.gamma(gamma_);
        const double u = x / (x + y);
        r = scale_ * u / (1.0 - u);
    }

    if (dim_ == 1) {
        out[0] = (rng.uniform() < 0.5) ? -r : r;
        return;
    }
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& v : out) {
            v = rng.normal();
            n2 += v * v;
        }
    } while (n2 == 0.0);
    const double f = r / std::sqrt(n2);
    for (auto& v : out) v *= f;
}

double JumpKernel::radial_cdf(double r) const {
    if (r <= 0.0) return 0.0;
    switch (tail_) {
        case TailClass::LightGaussian: return gamma_p(0.5 * dim_, 0.5 * b_ * r * r);
        case TailClass::LightExponential: return gamma_p(static_cast<double>(dim_), delta_ * r);
        case TailClass::Moderate:
        case TailClass::Heavy: {
            const double t = r / scale_;
            return beta_inc_reg(static_cast<double>(dim_), gamma_, t / (1.0 + t));
        }
    }
    return 0.0;
}

} // namespace gpot
