#include "qv/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qv::quad {

namespace {
Rule15 build() {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xa = K::abscissa();  // 0, then increasing
    const auto& wa = K::weights();
    const auto& ga = G::weights();   // on the even Kronrod abscissae
    Rule15 r{};
    r.x[7] = 0.0;
    r.wk[7] = wa[0];
    r.wg[7] = ga[0];
    for (int i = 1; i < 8; ++i) {
        r.x[7 + i] = xa[i];
        r.x[7 - i] = -xa[i];
        r.wk[7 + i] = r.wk[7 - i] = wa[i];
        double g = (i % 2 == 0) ? ga[i / 2] : 0.0;
        r.wg[7 + i] = r.wg[7 - i] = g;
    }
    return r;
}
} // namespace

const Rule15& gk15() {
    static const Rule15 r = build();
    return r;
}

} // namespace qv::quad
