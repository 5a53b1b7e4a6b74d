#pragma once

#include <functional>
#include <vector>

namespace gpot {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
    long evals = 0;
};

// Adaptive quadrature on [a, b]. Panels use a 21-point Gauss-Legendre rule;
// the error estimate on a panel is |GL21(panel) - GL21(left) - GL21(right)|
// and panels are bisected until the local estimate fits the budget.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, double rel_tol = 1e-10);

// Integral over [a, inf) via the substitution r = a + t/(1-t).
QuadResult integrate_semi_infinite(const std::function<double(double)>& f, double a,
                                   double abs_tol = 1e-10, double rel_tol = 1e-10);

// int_0^1 u^{p-1} (1-u)^{q-1} du computed by quadrature, p >= 1, q > 0.
// For q < 1 the endpoint singularity is removed with u = 1 - v^{1/q}
// before integrating, so small q is as cheap as large q.
QuadResult beta_integral_quad(double p, double q, double abs_tol = 1e-12);

struct QuadNode {
    double x; // on [-1, 1]
    double w;
};

// Gauss-Legendre nodes/weights, computed (not tabulated) on first use.
const std::vector<QuadNode>& gauss_legendre_rule(int n);

} // namespace gpot
