#include <algorithm>
#include <cmath>

#include "qv/quadrature.hpp"
#include "qv/specfun.hpp"

namespace qv::specfun {

cplx Scaled::value() const { return mantissa * std::exp(log_scale); }

namespace {

// Contour t = s - i sigma(s) with sigma = sigma0 g(s), g a smooth even bump
// that is ~1 through the saddle region |s| < s1 and falls to 0 beyond it,
// where exp(-x cosh t) decays at full speed.
struct Line {
    cplx nu, x;
    double sigma0, s1;
    double sigma(double s) const { return 0.5 * sigma0 * (std::erf(s + s1) - std::erf(s - s1)); }
    double dsigma(double s) const {
        return sigma0 / std::sqrt(pi) * (std::exp(-(s + s1) * (s + s1)) - std::exp(-(s - s1) * (s - s1)));
    }
    // log of exp(-x cosh t - nu t) dt/ds
    cplx log_f(double s) const {
        cplx t(s, -sigma(s));
        return -x * std::cosh(t) - nu * t + std::log(cplx(1.0, -dsigma(s)));
    }
};

} // namespace

Scaled bessel_k_scaled(cplx nu, cplx x, double rel_tol) {
    if (x == 0.0) throw InvalidArgument("bessel_k: x = 0");
    if (!(x.real() > 0.0)) throw InvalidArgument("bessel_k: requires Re x > 0");
    const double phi = std::arg(x);
    const double room = 0.5 * pi - std::abs(phi);
    const double b = nu.imag();
    const double delta = std::min(0.5 * room, 1.0 / (1.0 + std::abs(b)));
    double sigma = std::max(0.0, room - delta);
    if (b < 0) sigma = -sigma;
    if (b == 0) sigma = 0.0;
    // past cosh s = (pi/2)|b|/|x| the real part of x cosh t dominates |b| sigma
    const double s1 = std::acosh(std::max(1.0, 0.5 * pi * std::abs(b) / std::abs(x))) + 1.0;
    Line L{nu, x, sigma, s1};

    // bracket the mass: walk out from the peak until the log-integrand
    // is 45 below the running maximum on both sides
    const double h = 0.05;
    double emax = L.log_f(0.0).real();
    double lo = 0.0, hi = 0.0;
    for (int side : {-1, 1}) {
        double s = 0.0;
        double last = emax;
        for (int k = 0; k < 40000; ++k) {
            s += side * h;
            double e = L.log_f(s).real();
            if (!std::isfinite(e) && e < 0) break;
            emax = std::max(emax, e);
            if (e < emax - 45.0 && e < last) break;
            last = e;
        }
        (side < 0 ? lo : hi) = s;
    }

    auto f = [&](double s) { return std::exp(L.log_f(s) - emax); };
    // mass of the scaled integrand is O(width); tolerance relative to that
    auto coarse = quad::integrate<cplx>(f, lo, hi, 1e-3 * (hi - lo), 16, 20);
    double mag = std::max(std::abs(coarse.value), 1e-300);
    // the scaled integrand peaks at 1 and its phase reaches |nu| s, so node
    // rounding is ~eps (1 + |nu| s) per unit width; asking for less than
    // that only bisects forever
    const double phase = 1.0 + std::abs(nu) * std::max(-lo, hi) + std::abs(x);
    const double tol = std::max(rel_tol * mag, 4e-16 * phase * (hi - lo));
    auto fine = quad::integrate<cplx>(f, lo, hi, tol, 16, 20);
    if (!fine.converged)
        throw ConvergenceError("bessel_k quadrature did not converge", std::abs(fine.value),
                               fine.error);
    return Scaled{0.5 * fine.value, emax};
}

cplx bessel_k(cplx nu, cplx x) {
    Scaled r = bessel_k_scaled(nu, x);
    double lm = std::log(std::abs(r.mantissa)) + r.log_scale;
    if (lm > 709.7) throw OverflowError("bessel_k overflows double range");
    if (lm < -708.0) throw UnderflowError("bessel_k underflows double range");
    return r.value();
}

} // namespace qv::specfun
