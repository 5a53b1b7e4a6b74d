#pragma once

namespace gpot {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_inc_reg(double a, double b, double x);

// Surface area of the unit sphere S^{d-1} in R^d: 2 pi^{d/2} / Gamma(d/2).
double sphere_surface(int d);

} // namespace gpot
