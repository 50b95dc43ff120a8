#include <cmath>

#include "qv/specfun.hpp"

namespace qv::specfun {

namespace {

bool is_nonpos_int(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Neumaier-compensated complex accumulator
struct Accum {
    double sr = 0, cr = 0, si = 0, ci = 0;
    static void add1(double& s, double& c, double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    void add(cplx x) {
        add1(sr, cr, x.real());
        add1(si, ci, x.imag());
    }
    cplx value() const { return {sr + cr, si + ci}; }
    void scale(double f) {
        sr *= f;
        cr *= f;
        si *= f;
        ci *= f;
    }
};

// log of the Taylor series sum_n (a)_n/(b)_n z^n/n!, with running
// rescaling so huge intermediate terms do not overflow.
cplx log_taylor(cplx a, cplx b, cplx z, int max_terms) {
    const double big = 1e150;
    Accum sum;
    cplx term = 1.0;
    double log_scale = 0.0;
    sum.add(term);
    int small_run = 0;
    cplx last = sum.value();
    int stagnant = 0;
    for (int n = 0; n < max_terms; ++n) {
        cplx an = a + double(n);
        if (an == 0.0) return std::log(sum.value()) + log_scale;  // series terminates
        cplx ratio = an / (b + double(n)) * z / double(n + 1);
        term *= ratio;
        sum.add(term);
        if (std::abs(term) > big) {
            term /= big;
            sum.scale(1.0 / big);
            log_scale += std::log(big);
        }
        cplx s = sum.value();
        double as = std::abs(s);
        // tail bound once the ratio has settled below one
        double r = std::abs(ratio);
        bool settled = double(n) > std::abs(z) && double(n) > std::abs(a) &&
                       double(n) > std::abs(b) && r < 0.9;
        if (settled && std::abs(term) * r / (1.0 - r) <= 1e-17 * as) {
            if (++small_run >= 2) return std::log(s) + log_scale;
        } else {
            small_run = 0;
        }
        if (settled && s == last) {
            if (++stagnant >= 5) return std::log(s) + log_scale;
        } else {
            stagnant = 0;
        }
        last = s;
    }
    cplx s = sum.value();
    throw ConvergenceError("1F1 Taylor series did not converge within the term budget",
                           std::abs(s) > 0 ? std::exp(std::log(s) + log_scale).real() : 0.0,
                           std::abs(term));
}

} // namespace

cplx log_kummer_1f1(cplx a, cplx b, cplx z, const KummerOptions& opt) {
    if (is_nonpos_int(b)) throw PoleError("1F1: b is a nonpositive integer");
    if (z == 0.0 || a == 0.0) return 0.0;
    // Kummer transformation keeps terms of one sign-pattern for Re z < 0
    if (z.real() < 0.0) return z + log_taylor(b - a, b, -z, opt.max_terms);
    return log_taylor(a, b, z, opt.max_terms);
}

cplx log_kummer_1f1(cplx a, cplx b, cplx z) { return log_kummer_1f1(a, b, z, KummerOptions{}); }

cplx kummer_1f1(cplx a, cplx b, cplx z) {
    cplx l = log_kummer_1f1(a, b, z);
    if (l.real() > 709.7) throw OverflowError("1F1 overflows double range");
    return std::exp(l);
}

} // namespace qv::specfun
