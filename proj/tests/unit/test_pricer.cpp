#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "qv/pricer.hpp"

using namespace qv;

namespace {

const cplx I(0, 1);

// Gil-Pelaez call price from the Heston log-price characteristic function,
// written independently of the library's transform
double heston_call_reference(const HestonParams& p, double S, double v0, double K, double r, double d, double T) {
    auto cf = [&](cplx u) {
        const double k = p.kappa, th = p.theta, s = p.epsilon, rho = p.rho;
        const cplx b = k - rho * s * I * u;
        const cplx dd = std::sqrt(b * b + s * s * (I * u + u * u));
        const cplx g = (b - dd) / (b + dd);
        const cplx e = std::exp(-dd * T);
        const cplx C = k * th / (s * s) * ((b - dd) * T - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
        const cplx D = (b - dd) / (s * s) * (1.0 - e) / (1.0 - g * e);
        return std::exp(C + D * v0 + I * u * (std::log(S) + (r - d) * T));
    };
    const double lk = std::log(K);
    boost::math::quadrature::exp_sinh<double> q;
    auto P = [&](bool first) {
        auto f = [&](double u) {
            if (u == 0.0) return 0.0;
            const cplx num = first ? cf(cplx(u, -1.0)) / cf(cplx(0.0, -1.0)) : cf(u);
            return (std::exp(-I * u * lk) * num / (I * u)).real();
        };
        return 0.5 + q.integrate(f, 0.0, inf) / pi;
    };
    return S * std::exp(-d * T) * P(true) - K * std::exp(-r * T) * P(false);
}

const HestonParams kH{1.5, 0.04, 0.3, -0.7};
const RatesSpec kRates{0.03, 0.01};
const MarketState kState{100, 0.04, 0.0, 0.0};

} // namespace

TEST_CASE("vanilla Heston prices match an independent Gil-Pelaez inversion") {
    for (double K : {80.0, 95.0, 100.0, 120.0}) {
        for (double T : {0.25, 1.0, 3.0}) {
            CAPTURE(K);
            CAPTURE(T);
            const double ref = heston_call_reference(kH, 100, 0.04, K, 0.03, 0.01, T);
            const auto res = price(ModelSpec(kH), kRates, {VanillaCall{K}, T}, kState);
            CHECK(res.route == Route::Contour1D);
            CHECK(res.value == doctest::Approx(ref).epsilon(1e-6));
        }
    }
}

TEST_CASE("put-call parity") {
    const ModelSpec m(kH);
    const double T = 1.5, K = 105;
    const double c = price(m, kRates, {VanillaCall{K}, T}, kState).value;
    const double p = price(m, kRates, {VanillaPut{K}, T}, kState).value;
    CHECK(c - p == doctest::Approx(100 * std::exp(-0.01 * T) - K * std::exp(-0.03 * T)).epsilon(1e-7));
}

TEST_CASE("contour choice and strip handling") {
    const ModelSpec h(HestonParams{0.5, 0.2, 0.3, 0.0});
    const ContractSpec tvo{TvoCall{0.1, 100}, 3.0};
    const auto c = choose_contour(tvo, h, 3.0);
    CHECK(c.k1 == doctest::Approx(1.5));
    CHECK(c.k2 == doctest::Approx(0.5));
    CHECK(choose_contour({DoubleDigitalCall{100, 0.2}, 1.0}, h, 1.0).k1 == doctest::Approx(0.5));
    CHECK_THROWS_AS(choose_contour(tvo, h, 3.0, Contour{0.5, 0.5}), StripViolation);
    CHECK_THROWS_AS(choose_contour(tvo, h, 3.0, Contour{1.5, -0.5}), StripViolation);
    // GARCH TVO: eta must sit above 0 for the payoff and below (k1 - k1^2)/2 < 0 for the model
    const ModelSpec g(GarchParams{0.1, 0.4});
    CHECK_THROWS_AS(choose_contour(tvo, g, 3.0), EmptyStripError);
    CHECK(plan_route(tvo, g, 3.0).route == Route::Laplace);
    const auto dd = plan_route({DoubleDigitalCall{100, 0.2}, 1.0}, g, 1.0);
    CHECK(dd.route == Route::Contour2D);
    CHECK(contour_admissible(g, dd.contour));
}

TEST_CASE("quadrature config validation") {
    QuadConfig q;
    CHECK_NOTHROW(validate(q));
    q.rel_tol = 0;
    CHECK_THROWS_AS(validate(q), InvalidArgument);
    q = {};
    q.max_refinements = 0;
    CHECK_THROWS_AS(validate(q), InvalidArgument);
}

TEST_CASE("delta and gamma of a vanilla match finite differences") {
    const ModelSpec m(kH);
    const ContractSpec c{VanillaCall{100}, 1.0};
    const auto g = greeks(m, kRates, c, kState);
    const double h = 1e-4 * 100;
    auto at = [&](double S) {
        MarketState s = kState;
        s.spot = S;
        return price(m, kRates, c, s, g.price.contour).value;
    };
    const double up = at(100 + h), dn = at(100 - h), mid = at(100);
    CHECK(g.delta == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-3));
    CHECK(g.gamma == doctest::Approx((up - 2 * mid + dn) / (h * h)).epsilon(1e-2));
    CHECK(delta(m, kRates, c, kState, g.price.contour) == doctest::Approx(g.delta).epsilon(1e-12));
    CHECK(gamma(m, kRates, c, kState, g.price.contour) == doctest::Approx(g.gamma).epsilon(1e-12));
}

TEST_CASE("constant-payoff limit of the double digital has no spot sensitivity") {
    const ModelSpec m(HestonParams{0.5, 0.2, 0.3, 0.2});
    const ContractSpec c{DoubleDigitalCall{1e-6, 1e-9}, 1.0};
    const auto g = greeks(m, {0.05, 0.0}, c, {100, 0.2, 0.0, 0.0});
    CHECK(g.price.value == doctest::Approx(std::exp(-0.05)).epsilon(1e-5));
    CHECK(std::abs(g.delta) <= 1e-4);
    CHECK(std::abs(g.gamma) <= 1e-4);
}

TEST_CASE("parallel and serial pricing agree exactly") {
    const ModelSpec m(HestonParams{0.5, 0.2, 0.3, -0.3});
    const ContractSpec c{VolCappedCall{100, 0.2, 0.4}, 2.0};
    const MarketState s{110, 0.2, 0.0, 0.0};
    const auto a = ContourPricer(m, {0.07, 0}, c, s, {}, std::nullopt, Exec::Parallel).run();
    const auto b = ContourPricer(m, {0.07, 0}, c, s, {}, std::nullopt, Exec::Serial).run();
    CHECK(a.price.value == b.price.value);
    CHECK(a.delta == b.delta);
    CHECK(a.price.nodes_used == b.price.nodes_used);
    CHECK(a.price.imag_residue <= std::max(1e-9, 1e-6 * a.price.value));
}

TEST_CASE("double digital sits below the digital call") {
    const ModelSpec m(HestonParams{0.5, 0.2, 0.3, 0.2});
    const MarketState s{120, 0.2, 0.3, 1.0};
    const RatesSpec r{0.1, 0.01};
    const double dd = price(m, r, {DoubleDigitalCall{100, 0.24}, 2.5}, s).value;
    const double dig = price(m, r, {DigitalCall{100}, 2.5}, s).value;
    CHECK(dd <= dig);
    CHECK(dd > 0.0);
}

TEST_CASE("a tiny refinement budget surfaces as ConvergenceError with an estimate") {
    QuadConfig q;
    q.rel_tol = 1e-14;
    q.abs_tol = 1e-16;
    q.max_refinements = 1;
    try {
        price(ModelSpec(kH), kRates, {VanillaCall{100}, 1.0}, kState, q);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.estimate() == doctest::Approx(heston_call_reference(kH, 100, 0.04, 100, 0.03, 0.01, 1.0)).epsilon(1e-4));
    }
}

TEST_CASE("maturity must lie after the valuation time") {
    MarketState s = kState;
    s.time = 2.0;
    CHECK_THROWS_AS(price(ModelSpec(kH), kRates, {VanillaCall{100}, 1.0}, s), InvalidArgument);
}
