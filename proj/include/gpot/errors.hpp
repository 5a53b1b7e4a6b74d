#pragma once

#include <stdexcept>
#include <string>

namespace gpot {

enum class Errc {
    ParseError,            // malformed spec/config input
    ValidationError,       // structurally valid input failing a domain check
    DimensionTooSmall,     // d < 3 requested where transience is required
    HeavyTailUnsupported,  // heavy-tail kernel passed to an op that needs sigma^2 < inf
    NotConverged,          // iterative method exhausted its budget above tolerance
    InfiniteMoment,        // finite second moment demanded from a heavy-tail kernel
    UnsupportedAnalytic,   // analytic Fourier form requested for a family without one
    SingularAtCoincidence, // Green function evaluated at x == y
    RecurrentRegime,       // undiscounted potential in a recurrent dimension
    InsufficientData,      // fit needs more points than supplied
    DivergesAtOne,         // zeta(s) with s <= 1
};

const char* errc_name(Errc c);

// CLI exit-code contract: 0 success, 2 parse, 3 validation,
// 4 mathematical precondition, 5 numerical non-convergence.
int exit_code_for(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

} // namespace gpot
