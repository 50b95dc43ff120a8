#include <cmath>

#include "qv/models.hpp"

namespace qv {

bool heston_regular(cplx omega, cplx eta, double tau, const HestonParams& m);

cplx fundamental_transform(const TransformQuery& q, const ModelSpec& m) {
    if (!(q.tau >= 0)) throw InvalidArgument("tau must be nonnegative");
    if (!(q.inst_variance > 0)) throw InvalidArgument("inst_variance must be positive");
    if (auto h = m.get<HestonParams>()) return heston_transform(q, *h);
    if (auto t = m.get<ThreeHalvesParams>()) return three_halves_transform(q, *t);
    return garch_transform(q, *m.get<GarchParams>());
}

bool is_regular(const TransformQuery& q, const ModelSpec& m) {
    if (auto h = m.get<HestonParams>()) return heston_regular(q.omega, q.eta, q.tau, *h);
    if (m.get<ThreeHalvesParams>()) return true;
    const auto& g = *m.get<GarchParams>();
    if (2 * g.theta > g.epsilon * g.epsilon) {
        const cplx I(0, 1);
        cplx u = q.omega * q.omega - I * q.omega + 2.0 * I * q.eta;
        return std::abs(u) >= 1e-12;
    }
    return true;
}

Strip model_strip(const ModelSpec& m) {
    // Heston and 3/2 constraints are handled by the runtime regularity
    // probe; GARCH needs Re(u) > 0 along the whole contour, whose bounding
    // box is Im(eta) < 1/8
    if (m.get<GarchParams>()) return Strip{Interval{}, Interval{-inf, 0.125}};
    return whole_plane();
}

bool contour_admissible(const ModelSpec& m, const Contour& c) {
    if (m.get<GarchParams>()) return c.k2 < 0.5 * (c.k1 - c.k1 * c.k1);
    return true;
}

} // namespace qv
