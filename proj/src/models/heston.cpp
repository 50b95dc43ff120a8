#include <cmath>

#include "qv/models.hpp"

namespace qv {

namespace {

struct HestonPieces {
    cplx b, d, g, e;
};

HestonPieces pieces(cplx omega, cplx eta, double tau, const HestonParams& m) {
    const cplx I(0, 1);
    const double eps2 = m.epsilon * m.epsilon;
    cplx u = omega * omega - I * omega + 2.0 * I * eta;
    cplx b = m.kappa + I * m.epsilon * m.rho * omega;
    cplx d = std::sqrt(b * b + eps2 * u);  // principal branch
    // g = (b-d)/(b+d); b+d only vanishes together with u, where the
    // other root gives the same (even in d) solution
    if (std::abs(b + d) < 1e-300) d = -d;
    cplx g = (b - d) / (b + d);
    cplx e = std::exp(-d * tau);
    return {b, d, g, e};
}

} // namespace

HestonCD heston_cd(cplx omega, cplx eta, double tau, const HestonParams& m) {
    if (tau == 0.0) return {0.0, 0.0};
    const double eps2 = m.epsilon * m.epsilon;
    auto p = pieces(omega, eta, tau, m);
    // Lord-Kahl style: g = 1/c, so the log argument stays off the cut
    cplx D = (p.b - p.d) / eps2 * (1.0 - p.e) / (1.0 - p.g * p.e);
    cplx C = m.kappa * m.theta / eps2 *
             (tau * (p.b - p.d) - 2.0 * std::log((1.0 - p.g * p.e) / (1.0 - p.g)));
    return {C, D};
}

bool heston_regular(cplx omega, cplx eta, double tau, const HestonParams& m) {
    if (tau == 0.0) return true;
    auto p = pieces(omega, eta, tau, m);
    if (!std::isfinite(std::abs(p.g)) || !std::isfinite(std::abs(p.e))) return false;
    const double tol = 1e-12 * (1.0 + std::abs(p.g));
    return std::abs(1.0 - p.g * p.e) >= tol && std::abs(1.0 - p.g) >= tol;
}

cplx heston_transform(const TransformQuery& q, const HestonParams& m) {
    if (q.tau == 0.0) return 1.0;
    if (!heston_regular(q.omega, q.eta, q.tau, m))
        throw SingularPointError("Heston transform evaluated on its singular set");
    auto cd = heston_cd(q.omega, q.eta, q.tau, m);
    return std::exp(cd.C + q.inst_variance * cd.D);
}

} // namespace qv
