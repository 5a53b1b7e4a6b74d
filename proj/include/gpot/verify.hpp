#pragma once

#include <string>
#include <vector>

namespace gpot {

struct CheckResult {
    std::string name;
    bool passed = false;
    double metric = 0.0;    // measured violation / gap
    double threshold = 0.0; // gate the metric must stay under
    std::string detail;
};

// Cross-method invariant suite behind `verify`: three-route agreement,
// resolvent identity, Chapman-Kolmogorov, conservativity, Parseval,
// convolution mass, lambda-monotonicity, estimate invariants.
std::vector<CheckResult> run_core_checks(int dim = 3, int n = 64, double box = 10.0);

} // namespace gpot
