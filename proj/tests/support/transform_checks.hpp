#pragma once

// Identity checks on the fundamental transform, shared by the unit and
// acceptance suites. Each returns the worst error seen.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qv/models.hpp"

namespace qvtest {

using qv::cplx;
using qv::ModelSpec;

inline const qv::HestonParams kHeston{0.5, 0.2, 0.3, -0.4};
inline const qv::ThreeHalvesParams kThreeHalves{2.0, 0.2, 0.8, -0.5};
inline const qv::GarchParams kGarch{0.1, 0.4};

inline std::vector<ModelSpec> all_models() {
    return {ModelSpec(kHeston), ModelSpec(kThreeHalves), ModelSpec(kGarch)};
}

struct Point {
    cplx w, e;
    double v, tau;
};

// Points where every model's transform is defined: Re(u) > 0 keeps GARCH happy.
inline std::vector<Point> random_points(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-5, 5), k1(0.2, 0.8), v(0.05, 0.5), tau(0.25, 3.0), t(0, 1);
    std::vector<Point> out;
    while (int(out.size()) < n) {
        const double a = k1(rng);
        const double k2 = -0.5 + t(rng) * (0.5 * (a - a * a) - 0.02 + 0.5);
        out.push_back({cplx(re(rng), a), cplx(re(rng), k2), v(rng), tau(rng)});
    }
    return out;
}

// drift, squared diffusion of v and the correlation term of the generator
struct Coeffs {
    double a, b2;
    double cross;
};
inline Coeffs coeffs(const ModelSpec& m, double v) {
    if (auto h = m.get<qv::HestonParams>())
        return {h->kappa * (h->theta - v), h->epsilon * h->epsilon * v, h->rho * h->epsilon * v};
    if (auto t = m.get<qv::ThreeHalvesParams>())
        return {t->kappa * v * (t->theta - v), t->epsilon * t->epsilon * v * v * v, t->rho * t->epsilon * v * v};
    auto g = m.get<qv::GarchParams>();
    return {g->theta * v, g->epsilon * g->epsilon * v * v, 0.0};
}

inline double worst_initial_condition(const ModelSpec& m) {
    double w = 0;
    for (const auto& p : random_points(100, 1))
        w = std::max(w, std::abs(qv::fundamental_transform({p.w, p.e, p.v, 0.0}, m) - 1.0));
    return w;
}

inline double worst_martingale(const ModelSpec& m) {
    double w = 0;
    for (double v : {0.05, 0.2, 0.5})
        for (double tau : {0.25, 1.0, 3.0, 5.0})
            w = std::max(w, std::abs(qv::fundamental_transform({cplx(0, 1), 0.0, v, tau}, m) - 1.0));
    return w;
}

inline double worst_zero_frequency(const ModelSpec& m) {
    const cplx z = 1e-6 * cplx(1, 1);
    // GARCH needs Re(u) >= 0; eta = z would give Re(u) = -1e-6
    const cplx e = m.get<qv::GarchParams>() ? std::conj(z) : z;
    double w = 0;
    for (double v : {0.05, 0.5})
        for (double tau : {0.5, 3.0}) w = std::max(w, std::abs(qv::fundamental_transform({z, e, v, tau}, m) - 1.0));
    return w;
}

// |H(-conj w, -conj e) - conj H(w, e)| / max(1, |H|)
inline double worst_conjugate_symmetry(const ModelSpec& m) {
    double w = 0;
    for (const auto& p : random_points(30, 2)) {
        const cplx h = qv::fundamental_transform({p.w, p.e, p.v, p.tau}, m);
        const cplx hc = qv::fundamental_transform({-std::conj(p.w), -std::conj(p.e), p.v, p.tau}, m);
        w = std::max(w, std::abs(hc - std::conj(h)) / std::max(1.0, std::abs(h)));
    }
    return w;
}

// finite-difference residual of the transformed PDE relative to |H|
inline double worst_pde_residual(const ModelSpec& m, int n = 50) {
    const cplx I(0, 1);
    double w = 0;
    for (const auto& p : random_points(n, 5)) {
        if (!qv::is_regular({p.w, p.e, p.v, p.tau}, m)) continue;
        const cplx u = p.w * p.w - I * p.w + 2.0 * I * p.e;
        const double hv = 1e-4 * p.v, ht = 1e-4 * p.tau;
        auto H = [&](double v, double t) { return qv::fundamental_transform({p.w, p.e, v, t}, m); };
        const cplx h0 = H(p.v, p.tau);
        const cplx hp = H(p.v + hv, p.tau), hm = H(p.v - hv, p.tau);
        const cplx Hv = (hp - hm) / (2 * hv), Hvv = (hp - 2.0 * h0 + hm) / (hv * hv);
        const cplx Ht = (H(p.v, p.tau + ht) - H(p.v, p.tau - ht)) / (2 * ht);
        const auto c = coeffs(m, p.v);
        const cplx gen = c.a * Hv + 0.5 * c.b2 * Hvv - I * p.w * c.cross * Hv - 0.5 * p.v * u * h0;
        w = std::max(w, std::abs(Ht - gen) / std::abs(h0));
    }
    return w;
}

// tolerances the identities are held to
inline constexpr double kInitialTol = 1e-12, kMartingaleTol = 1e-8, kZeroFreqTol = 1e-4, kConjTol = 1e-8,
                        kPdeTol = 1e-4;

} // namespace qvtest
