#include <cmath>

#include "qv/models.hpp"
#include "qv/specfun.hpp"

namespace qv {

cplx three_halves_transform(const TransformQuery& q, const ThreeHalvesParams& m) {
    if (q.tau == 0.0) return 1.0;
    const cplx I(0, 1);
    const double eps2 = m.epsilon * m.epsilon;
    const cplx w = q.omega;
    cplx u = w * w - I * w + 2.0 * I * q.eta;
    cplx b = (m.kappa + 0.5 * eps2 + I * w * m.rho * m.epsilon) / eps2;
    cplx c = std::sqrt(b * b + u / eps2);
    cplx alpha = c - b;
    cplx beta = 1.0 + 2.0 * c;
    // X = (2 k th / (eps^2 v)) / (exp(k th tau) - 1), with the k th -> 0 limit
    const double kt = m.kappa * m.theta;
    const double ratio = (kt == 0.0) ? 1.0 / q.tau : kt / std::expm1(kt * q.tau);
    const double X = 2.0 / (eps2 * q.inst_variance) * ratio;
    cplx lg = specfun::log_gamma(beta - alpha) - specfun::log_gamma(beta);
    cplx lf = specfun::log_kummer_1f1(alpha, beta, -X);
    return std::exp(lg + alpha * std::log(X) + lf);
}

} // namespace qv
