#include "gpot/quadrature.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

namespace gpot {
namespace {

constexpr int kPanelOrder = 21;

struct GaussRule {
    std::array<double, kPanelOrder> node{};   // on [-1, 1]
    std::array<double, kPanelOrder> weight{};
};

// Gauss-Legendre nodes via Newton iteration on P_n; no tabulated constants.
GaussRule make_rule() {
    GaussRule r;
    const int n = kPanelOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.node[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weight[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const GaussRule& rule() {
    static const GaussRule r = make_rule();
    return r;
}

double panel(const std::function<double(double)>& f, double a, double b, long& evals) {
    const GaussRule& r = rule();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < kPanelOrder; ++i) s += r.weight[static_cast<std::size_t>(i)] * f(c + h * r.node[static_cast<std::size_t>(i)]);
    evals += kPanelOrder;
    return s * h;
}

struct Segment {
    double a, b, whole;
};

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol) {
    QuadResult out;
    if (a == b) return out;
    std::vector<Segment> stack;
    stack.push_back({a, b, panel(f, a, b, out.evals)});
    double coarse = std::abs(stack.back().whole);

    // Budget per pop is scaled to the panel's share of the interval so the
    // accepted local errors sum to at most the requested total.
    while (!stack.empty()) {
        Segment s = stack.back();
        stack.pop_back();
        const double m = 0.5 * (s.a + s.b);
        const double left = panel(f, s.a, m, out.evals);
        const double right = panel(f, m, s.b, out.evals);
        const double diff = std::abs(s.whole - left - right);
        const double span_frac = (s.b - s.a) / (b - a);
        const double budget =
            std::max(abs_tol, rel_tol * std::max(coarse, std::abs(out.value))) * std::max(span_frac, 1e-6);
        if (diff <= budget || (s.b - s.a) < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) {
            out.value += left + right;
            out.error += diff;
        } else {
            stack.push_back({s.a, m, left});
            stack.push_back({m, s.b, right});
        }
        if (out.evals > 50'000'000) { // runaway guard
            for (const Segment& rem : stack) out.value += rem.whole;
            out.error += 1.0;
            break;
        }
    }
    return out;
}

QuadResult integrate_semi_infinite(const std::function<double(double)>& f, double a,
                                   double abs_tol, double rel_tol) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        const double r = a + t / om;
        return f(r) / (om * om);
    };
    return integrate(g, 0.0, 1.0 - 1e-14, abs_tol, rel_tol);
}

const std::vector<QuadNode>& gauss_legendre_rule(int n) {
    static std::map<int, std::vector<QuadNode>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<QuadNode> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p1 = 0.0, dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        out[static_cast<std::size_t>(n - 1 - i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return cache.emplace(n, std::move(out)).first->second;
}

QuadResult beta_integral_quad(double p, double q, double abs_tol) {
    if (q >= 1.0) {
        return integrate([&](double u) { return std::pow(u, p - 1.0) * std::pow(1.0 - u, q - 1.0); },
                         0.0, 1.0, abs_tol, abs_tol);
    }
    // u = 1 - v^{1/q}: u^{p-1}(1-u)^{q-1} du = (1/q) (1 - v^{1/q})^{p-1} dv
    return integrate(
        [&](double v) {
            const double u = 1.0 - std::pow(v, 1.0 / q);
            return std::pow(u, p - 1.0) / q;
        },
        0.0, 1.0, abs_tol, abs_tol);
}

} // namespace gpot
