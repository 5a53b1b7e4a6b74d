#pragma once

#include "gpot/exec.hpp"
#include "gpot/grid.hpp"

namespace gpot {

// Continuum-scaled discrete Fourier transform on the centered lattice:
//   forward:  F(k_m) = h^d sum_x exp(-i (k_m, x)) f(x)
//   inverse:  f(x)   = (2 pi)^{-d} (pi/L)^d sum_k exp(+i (k, x)) F(k)
// so inverse(forward(f)) == f to rounding, and F approximates the continuum
// transform of a function sampled on the box. Both directions run one radix-2
// FFT per lattice line; lines are independent, which keeps results
// bit-identical for any execution policy or thread count.
SpectralField dft_forward(const RealField& f, Exec exec = Exec::Parallel);

// Inverse of dft_forward; the imaginary residue of the complex inverse is
// discarded, with its largest magnitude reported through imag_residual when
// a non-null pointer is passed (should be ~1e-16 * max for Hermitian input).
RealField dft_inverse(const SpectralField& s, Exec exec = Exec::Parallel,
                      double* imag_residual = nullptr);

// Complex-to-complex variants used by the solvers.
SpectralField dft_forward_complex(const SpectralField& f, Exec exec = Exec::Parallel);
SpectralField dft_inverse_complex(const SpectralField& s, Exec exec = Exec::Parallel);

} // namespace gpot
