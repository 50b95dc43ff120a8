#include <array>
#include <cmath>

#include "qv/specfun.hpp"

namespace qv::specfun {

namespace {

const double log_2pi_half = 0.91893853320467274178;  // log(2 pi)/2

bool is_pole(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// log sin(pi z), stable for large |Im z|
cplx log_sin_pi(cplx z) {
    const cplx I(0, 1);
    cplx w = pi * z;
    if (w.imag() > 20.0) return -I * w + std::log((1.0 - std::exp(2.0 * I * w)) * cplx(0, 0.5));
    if (w.imag() < -20.0) return I * w + std::log((1.0 - std::exp(-2.0 * I * w)) / cplx(0, 2));
    // reduce the real part so sin stays accurate
    double shift = std::round(z.real());
    cplx zr(z.real() - shift, z.imag());
    cplx s = std::sin(pi * zr);
    if (std::fmod(std::abs(shift), 2.0) == 1.0) s = -s;
    return std::log(s);
}

// Stirling series, valid for Re z >= 15
cplx stirling(cplx z) {
    static const std::array<double, 9> c = {
        1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
        -691.0 / 360360, 1.0 / 156, -3617.0 / 122400, 43867.0 / 244188};
    cplx zi = 1.0 / z, z2 = zi * zi, p = zi, corr = 0.0;
    for (double ck : c) {
        corr += ck * p;
        p *= z2;
    }
    return (z - 0.5) * std::log(z) - z + log_2pi_half + corr;
}

cplx lgamma_right(cplx z) {
    // shift up until Re z >= 15
    if (z.real() >= 15.0) return stirling(z);
    int n = static_cast<int>(std::ceil(15.0 - z.real()));
    cplx prod = 1.0, logs = 0.0;
    for (int k = 0; k < n; ++k) {
        prod *= (z + double(k));
        if (std::abs(prod) > 1e200 || std::abs(prod) < 1e-200) {
            logs += std::log(prod);
            prod = 1.0;
        }
    }
    logs += std::log(prod);
    return stirling(z + double(n)) - logs;
}

} // namespace

cplx log_gamma(cplx z) {
    if (is_pole(z)) throw PoleError("Gamma has a pole at a nonpositive integer");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument("log_gamma: non-finite argument");
    if (z.real() < 0.5) return std::log(pi) - log_sin_pi(z) - lgamma_right(1.0 - z);
    return lgamma_right(z);
}

cplx complex_gamma(cplx z) {
    cplx lg = log_gamma(z);
    if (lg.real() > 709.7) throw OverflowError("Gamma overflows double range");
    return std::exp(lg);
}

double log_abs_gamma_sq(cplx z) { return 2.0 * log_gamma(z).real(); }

} // namespace qv::specfun
