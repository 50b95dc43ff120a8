#include <algorithm>
#include <cmath>
#include <fstream>

#include "qv/montecarlo.hpp"
#include "qv/philox.hpp"

namespace qv::mc {

int resolved_steps(const McConfig& cfg, double tau) {
    if (cfg.n_steps > 0) return cfg.n_steps;
    return std::max(1, int(std::ceil(250.0 * tau - 1e-9)));
}

namespace {

// Variance dynamics. Heston: Euler on v. 3/2: Euler on y = 1/v, which is
// a square-root process dy = (kappa + eps^2 - kappa theta y) dt - eps sqrt(y) dW.
// GARCH: v is lognormal and stepped exactly.
struct VarianceDyn {
    int tag;
    double kappa, theta, eps;
};

VarianceDyn dynamics(const ModelSpec& m) {
    if (auto h = m.get<HestonParams>()) return {0, h->kappa, h->theta, h->epsilon};
    if (auto t = m.get<ThreeHalvesParams>()) return {1, t->kappa, t->theta, t->epsilon};
    auto g = m.get<GarchParams>();
    return {2, 0.0, g->theta, g->epsilon};
}

struct PathSim {
    VarianceDyn dyn;
    double rho, rhoc, mu, dt, sqdt;
    int steps;
    std::uint64_t seed;
    FloorPolicy floor;
    double logS0, v0, I0;

    // square-root Euler step under the floor policy; returns the new raw state
    double sqrt_step(double y, double a, double b, double c, double dw) const {
        const double yp = floor == FloorPolicy::FullTruncation ? std::max(y, 0.0) : y;
        double yn = y + (a - b * yp) * dt + c * std::sqrt(yp) * dw;
        if (floor == FloorPolicy::Reflection) yn = std::abs(yn);
        return yn;
    }
    double floored(double y) const { return floor == FloorPolicy::FullTruncation ? std::max(y, 0.0) : y; }

    void run(std::uint64_t path, double& ST, double& IT) const {
        const double k = dyn.kappa, th = dyn.theta, e = dyn.eps;
        double x = logS0, I = I0;
        // state: v (Heston), 1/v (3/2), log v (GARCH)
        double y = dyn.tag == 0 ? v0 : dyn.tag == 1 ? 1.0 / v0 : std::log(v0);
        auto var = [&](double st) {
            if (dyn.tag == 0) return floored(st);
            if (dyn.tag == 1) return 1.0 / std::max(floored(st), 1e-12);
            return std::exp(st);
        };
        std::array<double, 4> z{};
        for (int i = 0; i < steps; ++i) {
            if ((i & 1) == 0) z = normals4(seed, path, std::uint64_t(i >> 1));
            const double z1 = z[(i & 1) * 2], z2 = z[(i & 1) * 2 + 1];
            const double vp = var(y);
            const double dw1 = sqdt * z1;
            const double dw2 = sqdt * (rho * z1 + rhoc * z2);
            x += (mu - 0.5 * vp) * dt + std::sqrt(vp) * dw1;
            if (dyn.tag == 0)
                y = sqrt_step(y, k * th, k, e, dw2);
            else if (dyn.tag == 1)
                y = sqrt_step(y, k + e * e, k * th, e, -dw2);
            else
                y += (th - 0.5 * e * e) * dt + e * dw2;
            I += 0.5 * (vp + var(y)) * dt;
        }
        ST = std::exp(x);
        IT = I;
    }
};

PathSim setup(const ModelSpec& m, const RatesSpec& r, const MarketState& s, double horizon,
              const McConfig& cfg) {
    validate(s);
    validate(r);
    if (!(horizon > s.time)) throw InvalidArgument("simulation horizon must exceed the start time");
    if (cfg.n_paths < 1) throw InvalidArgument("n_paths must be >= 1");
    const double tau = horizon - s.time;
    const int steps = resolved_steps(cfg, tau);
    const double dt = tau / steps;
    const double rho = m.rho();
    return PathSim{dynamics(m), rho, std::sqrt(std::max(0.0, 1.0 - rho * rho)),
                   r.risk_free - r.dividend_yield, dt, std::sqrt(dt), steps, cfg.seed, cfg.floor,
                   std::log(s.spot), s.inst_variance, s.accrued_qv};
}

SampleSet empty_set(const RatesSpec& r, const MarketState& s, double horizon, std::int64_t n) {
    SampleSet out;
    out.spot.resize(std::size_t(n));
    out.qv.resize(std::size_t(n));
    out.start = s;
    out.rates = r;
    out.tau = horizon - s.time;
    return out;
}

} // namespace

SampleSet simulate_terminals(const ModelSpec& m, const RatesSpec& r, const MarketState& s,
                             double horizon, const McConfig& cfg) {
    const PathSim sim = setup(m, r, s, horizon, cfg);
    SampleSet out = empty_set(r, s, horizon, cfg.n_paths);
    const std::int64_t n = cfg.n_paths;
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) sim.run(std::uint64_t(p), out.spot[p], out.qv[p]);
    return out;
}

SampleSet simulate_terminals_serial(const ModelSpec& m, const RatesSpec& r, const MarketState& s,
                                    double horizon, const McConfig& cfg) {
    const PathSim sim = setup(m, r, s, horizon, cfg);
    SampleSet out = empty_set(r, s, horizon, cfg.n_paths);
    for (std::int64_t p = 0; p < cfg.n_paths; ++p) sim.run(std::uint64_t(p), out.spot[p], out.qv[p]);
    return out;
}

SampleSet with_accrued_offset(const SampleSet& s, double delta) {
    SampleSet out = s;
    for (auto& q : out.qv) q += delta;
    out.start.accrued_qv += delta;
    return out;
}

void write_samples(const std::string& path, const SampleSet& s, const ModelSpec& m,
                   const McConfig& cfg) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open sample dump file " + path);
    f.precision(17);
    f << "# model=" << m.name() << " rho=" << m.rho() << "\n";
    f << "# spot=" << s.start.spot << " v=" << s.start.inst_variance << " I=" << s.start.accrued_qv
      << " t=" << s.start.time << " tau=" << s.tau << " r=" << s.rates.risk_free
      << " d=" << s.rates.dividend_yield << "\n";
    f << "# n_paths=" << cfg.n_paths << " n_steps=" << resolved_steps(cfg, s.tau)
      << " seed=" << cfg.seed
      << " floor=" << (cfg.floor == FloorPolicy::FullTruncation ? "full_truncation" : "reflection")
      << "\n";
    f << "S_T,I_T\n";
    for (std::size_t i = 0; i < s.size(); ++i) f << s.spot[i] << ',' << s.qv[i] << '\n';
}

} // namespace qv::mc
