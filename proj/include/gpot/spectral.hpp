#pragma once

#include "gpot/exec.hpp"
#include "gpot/fft.hpp"
#include "gpot/grid.hpp"

namespace gpot {

struct ConvolveDiag {
    bool wrap_risk = false;     // a boundary-decay precondition failed
    double boundary_ratio_f = 0.0; // max boundary |f| / max |f|
    double boundary_ratio_g = 0.0;
};

// Boundary decay guard for periodic convolution: true when the largest
// boundary-face magnitude is below eps times the field's maximum.
bool boundary_decay_ok(const RealField& f, double eps = 1e-8);

// Continuum-scaled circular convolution via the transform pair; commutative,
// mass-multiplicative. Wrap-around risk is reported through diag, never fatal.
RealField convolve(const RealField& f, const RealField& g, ConvolveDiag* diag = nullptr,
                   Exec exec = Exec::Parallel);

// Pointwise k-th power by repeated squaring; the transform of the k-fold
// convolution a^{*k} when ahat transforms a probability density.
SpectralField spectral_power(const SpectralField& ahat, long long k, Exec exec = Exec::Parallel);

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b,
                                Exec exec = Exec::Parallel);

// Relative gap in Parseval's identity
//   h^d sum |f|^2  vs  (2 pi)^{-d} (pi/L)^d sum |F|^2.
double parseval_gap(const RealField& f, const SpectralField& fhat, Exec exec = Exec::Parallel);

// Largest relative deviation from conjugate symmetry F(-k) == conj(F(k)).
double hermitian_defect(const SpectralField& s);

} // namespace gpot
