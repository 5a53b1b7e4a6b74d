#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "gpot/rng.hpp"

namespace gpot {

enum class TailClass { LightGaussian, LightExponential, Moderate, Heavy };

const char* tail_class_name(TailClass t);

struct KernelMoments {
    double mass = 0.0;
    std::optional<double> second_moment; // nullopt == infinite (heavy tails)
    double sup_density = 0.0;
};

enum class FourierRoute { Auto, Analytic, Numeric };

// Symmetric jump density a(x) on R^d, normalized to unit mass. Families:
//   gauss     a(x) = (b/2pi)^{d/2} exp(-b|x|^2/2)
//   exp       a(x) = c exp(-delta |x|)
//   moderate  a(x) = c (1 + |x|/l)^{-(d+gamma)},  gamma > 2
//   heavy     same form, gamma in (0, 2)
// Instances are immutable and safe to share across threads.
class JumpKernel {
  public:
    static JumpKernel gaussian(int dim, double b);
    static JumpKernel exponential(int dim, double delta);
    static JumpKernel moderate(int dim, double gamma, double scale = 1.0);
    static JumpKernel heavy(int dim, double gamma, double scale = 1.0);

    // Grammar: "gauss:b=1", "exp:delta=2", "moderate:gamma=3",
    // "heavy:gamma=1"; an optional dim=<int> entry overrides default_dim.
    static JumpKernel parse(std::string_view spec, int default_dim);

    int dim() const { return dim_; }
    TailClass tail() const { return tail_; }
    std::string spec_string() const;

    double density(std::span<const double> x) const;
    double radial_density(double r) const; // includes the normalization

    // a_hat(k) = int cos((k,y)) a(y) dy; radial, so only |k| matters.
    double fourier(std::span<const double> k, FourierRoute route = FourierRoute::Auto) const;
    double fourier_radial(double kmag, FourierRoute route = FourierRoute::Auto) const;
    bool has_analytic_fourier() const;

    KernelMoments moments() const;
    double second_moment_or_throw() const; // InfiniteMoment for heavy tails

    void sample_jump(PathRng& rng, std::span<double> out) const;

    // P(|X| <= r), the oracle the samplers are tested against.
    double radial_cdf(double r) const;

    double normalization() const { return c_norm_; }
    double gauss_b() const { return b_; }
    double exp_delta() const { return delta_; }
    double tail_gamma() const { return gamma_; }
    double length_scale() const { return scale_; }

  private:
    JumpKernel() = default;

    double profile(double r) const; // un-normalized radial shape, profile(0) = 1
    double radial_profile_integral(double power) const; // int_0^inf profile(r) r^power dr

    TailClass tail_ = TailClass::LightGaussian;
    int dim_ = 0;
    double b_ = 0.0;
    double delta_ = 0.0;
    double gamma_ = 0.0;
    double scale_ = 1.0;
    double c_norm_ = 0.0;
};

} // namespace gpot
