#pragma once

#include <complex>

namespace tpa {

using cplx = std::complex<double>;

// Scaled complementary error function w(z) = exp(-z^2) erfc(-i z), full complex plane.
// Rational approximation with 40 terms; relative accuracy ~1e-14 in the upper half plane.
cplx faddeeva_w(cplx z);

// Integral over (-inf, upper] of exp(-a t^2 + beta t + gamma) dt, a > 0 real.
// Evaluated without forming exp(beta^2/4a) unless the peak lies inside the range.
cplx truncated_gaussian_integral(double a, cplx beta, cplx gamma, double upper);

} // namespace tpa
