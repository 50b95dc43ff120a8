#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "qv/montecarlo.hpp"
#include "qv/philox.hpp"
#include "qv/pricer.hpp"

using namespace qv;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using C = Philox4x32::ctr_type;
    using K = Philox4x32::key_type;
    CHECK(Philox4x32::eval(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::eval(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::eval(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normals: open-interval uniforms and sane moments") {
    CHECK(u32_to_open01(0) > 0.0);
    CHECK(u32_to_open01(0xffffffffu) < 1.0);
    double s = 0, s2 = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        auto z = normals4(42, std::uint64_t(i), 0);
        for (double x : z) {
            s += x;
            s2 += x * x;
        }
    }
    const double m = s / (4.0 * n), v = s2 / (4.0 * n) - m * m;
    CHECK(std::abs(m) < 4.0 / std::sqrt(4.0 * n));
    CHECK(std::abs(v - 1.0) < 0.02);
    CHECK(normals4(1, 2, 3) == normals4(1, 2, 3));
    CHECK(normals4(1, 2, 3) != normals4(2, 2, 3));
}

TEST_CASE("simulation is bit-identical across thread counts") {
    mc::McConfig cfg;
    cfg.n_paths = 4000;
    cfg.seed = 99;
    const MarketState s{100, 0.2, 0.1, 0.5};
    for (const ModelSpec& m : {ModelSpec(HestonParams{0.5, 0.2, 0.3, -0.5}),
                               ModelSpec(ThreeHalvesParams{2.0, 0.2, 0.8, -0.5}),
                               ModelSpec(GarchParams{0.1, 0.4})}) {
        const auto a = mc::simulate_terminals(m, {0.02, 0.01}, s, 1.5, cfg);
        const auto b = mc::simulate_terminals_serial(m, {0.02, 0.01}, s, 1.5, cfg);
        CHECK(a.spot == b.spot);
        CHECK(a.qv == b.qv);
        CHECK(a.tau == doctest::Approx(1.0));
        CHECK(*std::min_element(a.qv.begin(), a.qv.end()) >= 0.1);
    }
}

TEST_CASE("step count, config errors and floors") {
    mc::McConfig cfg;
    CHECK(mc::resolved_steps(cfg, 1.0) == 250);
    CHECK(mc::resolved_steps(cfg, 0.001) == 1);
    cfg.n_steps = 7;
    CHECK(mc::resolved_steps(cfg, 3.0) == 7);
    const ModelSpec m(HestonParams{0.5, 0.2, 0.3, 0});
    CHECK_THROWS_AS(mc::simulate_terminals(m, {}, {100, 0.2, 0, 1.0}, 1.0, cfg), InvalidArgument);
    cfg.n_paths = 0;
    CHECK_THROWS_AS(mc::simulate_terminals(m, {}, {100, 0.2, 0, 0}, 1.0, cfg), InvalidArgument);
    // reflection keeps every variance path nonnegative as well
    cfg.n_paths = 2000;
    cfg.floor = mc::FloorPolicy::Reflection;
    const auto r = mc::simulate_terminals(ModelSpec(HestonParams{0.5, 0.2, 0.44, 0}), {}, {100, 0.2, 0, 0}, 1.0, cfg);
    CHECK(*std::min_element(r.qv.begin(), r.qv.end()) > 0.0);
}

TEST_CASE("constant payoff prices at the discount factor with zero error") {
    mc::McConfig cfg;
    cfg.n_paths = 10000;
    const auto s = mc::simulate_terminals(ModelSpec(HestonParams{0.5, 0.2, 0.3, 0}), {0.05, 0}, {100, 0.2, 0, 0}, 2.0, cfg);
    const auto e = mc::mc_price({DoubleDigitalCall{0.0, 0.0}, 2.0}, s);
    CHECK(e.mean == doctest::Approx(std::exp(-0.1)).epsilon(1e-14));
    CHECK(e.std_error <= 1e-15);
    CHECK(e.n_paths == 10000);
}

TEST_CASE("Monte Carlo vanilla agrees with the transform price") {
    mc::McConfig cfg;
    cfg.n_paths = 200000;
    const ModelSpec m(HestonParams{1.5, 0.04, 0.3, -0.7});
    const RatesSpec r{0.03, 0.01};
    const MarketState st{100, 0.04, 0, 0};
    const auto s = mc::simulate_terminals(m, r, st, 0.5, cfg);
    const auto e = mc::mc_price({VanillaCall{100}, 0.5}, s);
    const double tf = price(m, r, {VanillaCall{100}, 0.5}, st).value;
    CHECK(std::abs(e.mean - tf) <= 3 * e.std_error);
}

TEST_CASE("seasoned sample sets via accrued offset") {
    mc::McConfig cfg;
    cfg.n_paths = 1000;
    const auto s = mc::simulate_terminals(ModelSpec(GarchParams{0.1, 0.4}), {}, {100, 0.2, 0, 0}, 1.0, cfg);
    const auto t = mc::with_accrued_offset(s, 0.3);
    CHECK(t.start.accrued_qv == doctest::Approx(0.3));
    CHECK(t.qv[17] == doctest::Approx(s.qv[17] + 0.3));
    CHECK(t.spot == s.spot);
    // the increment seen by the characteristic function is unchanged
    const auto a = mc::empirical_cf(s, cplx(0.3, 0.2), cplx(1.0, 0.0));
    const auto b = mc::empirical_cf(t, cplx(0.3, 0.2), cplx(1.0, 0.0));
    CHECK(std::abs(a.mean - b.mean) <= 1e-12);
}

TEST_CASE("TVO payoff is refused when I_T is zero") {
    mc::SampleSet s;
    s.spot = {100, 110};
    s.qv = {0.1, 0.0};
    s.tau = 1.0;
    CHECK_THROWS_WITH_AS(mc::mc_price({TvoCall{0.1, 100}, 1.0}, s), doctest::Contains("1 of 2"), Error);
}

TEST_CASE("empirical characteristic function flags heavy weights") {
    mc::McConfig cfg;
    cfg.n_paths = 20000;
    const auto s = mc::simulate_terminals(ModelSpec(HestonParams{0.5, 0.2, 0.3, 0}), {}, {100, 0.2, 0, 0}, 3.0, cfg);
    // weight exp(8 Y) is dominated by a handful of paths
    CHECK_THROWS_AS(mc::empirical_cf(s, cplx(0, 8.0), 0.0), mc::VarianceExplosion);
    const auto ok = mc::empirical_cf(s, cplx(0.5, 0.0), cplx(0.5, 0.0));
    CHECK(std::abs(ok.mean) <= 1.0);
    CHECK(ok.se_re > 0.0);
}

TEST_CASE("sample dump carries its provenance header") {
    mc::McConfig cfg;
    cfg.n_paths = 3;
    cfg.seed = 5;
    const ModelSpec m(HestonParams{0.5, 0.2, 0.3, 0});
    const auto s = mc::simulate_terminals(m, {}, {100, 0.2, 0, 0}, 1.0, cfg);
    const std::string path = "qv_dump_test.csv";
    mc::write_samples(path, s, m, cfg);
    std::ifstream f(path);
    std::string l1, l2, l3, cols;
    std::getline(f, l1);
    std::getline(f, l2);
    std::getline(f, l3);
    std::getline(f, cols);
    CHECK(l1.rfind("# model=heston", 0) == 0);
    CHECK(l3.find("seed=5") != std::string::npos);
    CHECK(cols == "S_T,I_T");
    int rows = 0;
    for (std::string line; std::getline(f, line);) ++rows;
    CHECK(rows == 3);
    std::remove(path.c_str());
}

TEST_CASE("pairwise summation") {
    std::vector<double> x(1000, 0.1);
    CHECK(mc::pairwise_sum(x.data(), x.size()) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(mc::pairwise_sum(x.data(), 0) == 0.0);
}
