#pragma once

#include <complex>

#include "qv/core.hpp"

namespace qv::specfun {

// A logarithm of Gamma(z). Not necessarily the principal branch of
// log Gamma (the imaginary part may differ by 2*pi*k), which is fine for
// anything that ends up exponentiated.
// Throws PoleError at nonpositive integers.
cplx log_gamma(cplx z);

// Euler Gamma. PoleError at nonpositive integers, OverflowError when
// |Gamma(z)| exceeds double range.
cplx complex_gamma(cplx z);

// log |Gamma(x + iy)|^2, computed without forming Gamma.
double log_abs_gamma_sq(cplx z);

// 1F1(a; b; z). ConvergenceError when the term budget runs out,
// PoleError if b is a nonpositive integer, OverflowError when the value
// leaves double range (use log_kummer_1f1 then).
cplx kummer_1f1(cplx a, cplx b, cplx z);

// A logarithm of 1F1(a; b; z), overflow free. Same error contract.
cplx log_kummer_1f1(cplx a, cplx b, cplx z);

struct KummerOptions {
    int max_terms = 10000;
};
cplx log_kummer_1f1(cplx a, cplx b, cplx z, const KummerOptions& opt);

// K_nu(x) as mantissa * exp(log_scale).
struct Scaled {
    cplx mantissa;
    double log_scale;
    cplx value() const;  // may overflow to inf / underflow to 0
};

// Modified Bessel function of the second kind, complex order and
// argument, Re x > 0. Uses the integral representation
//   K_nu(x) = 1/2 int exp(-x cosh t - nu t) dt
// on a line shifted into the lower/upper half plane so that imaginary
// orders do not cancel.
Scaled bessel_k_scaled(cplx nu, cplx x, double rel_tol = 1e-12);

// Throws InvalidArgument for x = 0 or Re x <= 0, OverflowError /
// UnderflowError when the result leaves double range.
cplx bessel_k(cplx nu, cplx x);

} // namespace qv::specfun
