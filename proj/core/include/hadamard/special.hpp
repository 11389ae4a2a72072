#pragma once

#include <complex>

namespace hadamard {

/// log Gamma(z) for complex z (Lanczos, g = 7, with reflection for
/// Re z < 1/2). The imaginary part is only defined modulo 2*pi.
std::complex<double> lgamma_complex(std::complex<double> z);

/// 1/Gamma(z); exactly zero at the poles z = 0, -1, -2, ...
std::complex<double> rgamma(std::complex<double> z);

/// True when z is (exactly) a nonpositive integer.
bool is_gamma_pole(std::complex<double> z);

}  // namespace hadamard
