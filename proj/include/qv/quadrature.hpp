#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace qv::quad {

// 15-point Kronrod rule on [-1,1] with its embedded 7-point Gauss rule.
// wg is zero on the Kronrod-only nodes.
struct Rule15 {
    std::array<double, 15> x;
    std::array<double, 15> wk;
    std::array<double, 15> wg;
};

const Rule15& gk15();

template <class T>
struct PanelSum {
    T kronrod{};
    T gauss{};
    double err() const { return std::abs(kronrod - gauss); }
};

// One panel. f(x) -> T, T in {double, std::complex<double>}.
template <class T, class F>
PanelSum<T> panel(F&& f, double a, double b) {
    const auto& r = gk15();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    PanelSum<T> out;
    for (int i = 0; i < 15; ++i) {
        T fx = f(c + h * r.x[i]);
        out.kronrod += r.wk[i] * fx;
        out.gauss += r.wg[i] * fx;
    }
    out.kronrod *= h;
    out.gauss *= h;
    return out;
}

template <class T>
struct Adaptive {
    T value{};
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {
template <class T, class F>
void bisect(F& f, double a, double b, const PanelSum<T>& whole, double tol, int depth,
            Adaptive<T>& acc) {
    const double m = 0.5 * (a + b);
    auto l = panel<T>(f, a, m);
    auto r = panel<T>(f, m, b);
    acc.evaluations += 30;
    (void)whole;
    const double e = l.err() + r.err();
    if (e <= tol || depth <= 0) {
        if (e > tol) acc.converged = false;
        acc.value += l.kronrod + r.kronrod;
        acc.error += e;
        return;
    }
    bisect(f, a, m, l, 0.5 * tol, depth - 1, acc);
    bisect(f, m, b, r, 0.5 * tol, depth - 1, acc);
}
} // namespace detail

// Adaptive bisection over [a,b] split into n_init equal panels.
// Tolerance is absolute; callers fold relative targets in beforehand.
template <class T, class F>
Adaptive<T> integrate(F&& f, double a, double b, double abs_tol, int n_init = 1, int max_depth = 30) {
    Adaptive<T> acc;
    const double w = (b - a) / n_init;
    for (int k = 0; k < n_init; ++k) {
        double lo = a + k * w, hi = (k + 1 == n_init) ? b : a + (k + 1) * w;
        auto p = panel<T>(f, lo, hi);
        acc.evaluations += 15;
        if (p.err() <= abs_tol / n_init) {
            acc.value += p.kronrod;
            acc.error += p.err();
        } else {
            detail::bisect(f, lo, hi, p, abs_tol / n_init, max_depth, acc);
        }
    }
    return acc;
}

} // namespace qv::quad
