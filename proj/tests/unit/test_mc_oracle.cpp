#include <doctest.h>

#include <cmath>

#include "qv/models.hpp"
#include "qv/montecarlo.hpp"

using namespace qv;

namespace {

// empirical E[exp(-i w Y - i e dI)] from 1e6 paths against the closed form
void check_cf(const ModelSpec& m, cplx w, cplx e, double v, double tau) {
    mc::McConfig cfg;
    cfg.n_paths = 1'000'000;
    const auto s = mc::simulate_terminals(m, {0.0, 0.0}, {100, v, 0, 0}, tau, cfg);
    const auto est = mc::empirical_cf(s, w, e);
    const cplx h = fundamental_transform({w, e, v, tau}, m);
    const double zr = (est.mean.real() - h.real()) / est.se_re, zi = (est.mean.imag() - h.imag()) / est.se_im;
    CAPTURE(m.name());
    CAPTURE(h);
    CAPTURE(est.mean);
    MESSAGE(m.name() << ": z = " << zr << " / " << zi);
    CHECK(std::abs(zr) <= 3.0);
    CHECK(std::abs(zi) <= 3.0);
}

} // namespace

TEST_CASE("transform agrees with simulated characteristic function: heston") {
    check_cf(ModelSpec(HestonParams{0.5, 0.2, 0.3, 0.0}), cplx(0.5, 1.5), cplx(0.3, 0.5), 0.2, 3.0);
}

TEST_CASE("transform agrees with simulated characteristic function: 3/2") {
    check_cf(ModelSpec(ThreeHalvesParams{1.0, 0.2, 0.5, 0.0}), cplx(0.5, 1.5), cplx(0.2, 0.5), 0.2, 1.0);
}

TEST_CASE("transform agrees with simulated characteristic function: garch") {
    // Re(w^2 - i w + 2 i e) >= 0 is required: lognormal variance has no
    // positive exponential moments of I
    check_cf(ModelSpec(GarchParams{0.1, 0.4}), cplx(0.5, 0.3), cplx(0.2, 0.05), 0.2, 1.0);
}
