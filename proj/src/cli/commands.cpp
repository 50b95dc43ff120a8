#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qv/cli.hpp"

namespace qv::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v, int prec = 10) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

double seconds_since(Clock::time_point a) { return std::chrono::duration<double>(Clock::now() - a).count(); }

std::string describe(const ModelSpec& m) {
    std::ostringstream os;
    os << m.name();
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GarchParams>)
                os << " theta=" << p.theta << " epsilon=" << p.epsilon;
            else
                os << " kappa=" << p.kappa << " theta=" << p.theta << " epsilon=" << p.epsilon << " rho=" << p.rho;
        },
        m.params());
    return os.str();
}

std::string describe(const RatesSpec& r, const MarketState& s) {
    std::ostringstream os;
    os << "r=" << r.risk_free << " d=" << r.dividend_yield << " S=" << s.spot << " v=" << s.inst_variance
       << " I=" << s.accrued_qv << " t=" << s.time;
    return os.str();
}

mc::McConfig mc_config(const RunConfig& cfg, const Options& opt) {
    mc::McConfig m = cfg.mc;
    if (opt.mc_paths) m.n_paths = *opt.mc_paths;
    if (opt.seed) m.seed = *opt.seed;
    return m;
}

PriceResult transform_price(const ModelSpec& m, const RunConfig& cfg) {
    return cfg.contour ? price(m, cfg.rates, cfg.contract, cfg.market, *cfg.contour, cfg.quad)
                       : price(m, cfg.rates, cfg.contract, cfg.market, cfg.quad);
}

} // namespace

void Report::write(std::ostream& os) const {
    os << "# qvprice " << command << " | " << volatile_line << "\n";
    for (const auto& m : meta) os << "# " << m << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << "\n";
    }
}

Outcome cmd_price(const RunConfig& cfg, const Options& opt, std::ostream& human) {
    const ModelSpec m(cfg.model);
    const auto t0 = Clock::now();
    Outcome out;
    Report& rep = out.report;
    rep.command = "price";
    rep.meta = {"config=" + cfg.source, "model=" + describe(m), "market=" + describe(cfg.rates, cfg.market),
                "contract=" + contract_name(cfg.contract) + " maturity=" + num(cfg.contract.maturity),
                "method=" + method_name(cfg.method)};
    rep.columns = {"contract", "method",     "value",       "est_error",      "mc_value",
                   "mc_std_error", "mc_paths", "discrepancy_se", "flagged", "route",
                   "k1",       "k2",         "nodes"};

    std::optional<PriceResult> tf;
    std::optional<mc::McEstimate> mce;
    mc::McConfig mcc = mc_config(cfg, opt);
    if (cfg.method != Method::MonteCarlo) tf = transform_price(m, cfg);
    if (cfg.method != Method::Transform) {
        auto samples = mc::simulate_terminals(m, cfg.rates, cfg.market, cfg.contract.maturity, mcc);
        mce = mc::mc_price(cfg.contract, samples);
        rep.meta.push_back("mc seed=" + std::to_string(mcc.seed) + " steps=" +
                           std::to_string(mc::resolved_steps(mcc, cfg.contract.maturity - cfg.market.time)));
    }
    const double nan = std::nan("");
    double z = nan;
    bool flagged = false;
    if (tf && mce) {
        z = mce->std_error > 0 ? (tf->value - mce->mean) / mce->std_error
                               : (tf->value == mce->mean ? 0.0 : std::copysign(INFINITY, tf->value - mce->mean));
        flagged = !(std::abs(z) <= 3.0);
    }
    const double value = tf ? tf->value : mce->mean;
    rep.rows.push_back({contract_name(cfg.contract), method_name(cfg.method), num(value),
                        tf ? num(tf->est_error, 3) : "", mce ? num(mce->mean) : "",
                        mce ? num(mce->std_error, 4) : "", mce ? std::to_string(mce->n_paths) : "",
                        (tf && mce) ? num(z, 4) : "", (tf && mce) ? (flagged ? "true" : "false") : "",
                        tf ? route_name(tf->route) : "", tf ? num(tf->contour.k1, 6) : "",
                        tf ? num(tf->contour.k2, 6) : "", tf ? std::to_string(tf->nodes_used) : ""});
    const double secs = seconds_since(t0);
    rep.volatile_line = "generated " + timestamp() + " | runtime " + num(secs, 4) + " s";
    if (!opt.quiet) {
        human << contract_name(cfg.contract) << " under " << describe(m) << "\n";
        if (tf)
            human << "  transform  " << num(tf->value) << "  (est. error " << num(tf->est_error, 3) << ", "
                  << route_name(tf->route) << " contour k1=" << tf->contour.k1 << " k2=" << tf->contour.k2
                  << ", " << tf->nodes_used << " nodes)\n";
        if (mce)
            human << "  montecarlo " << num(mce->mean) << " +/- " << num(mce->std_error, 4) << "  ("
                  << mce->n_paths << " paths)\n";
        if (tf && mce)
            human << "  discrepancy " << num(z, 3) << " standard errors" << (flagged ? "  ** FLAGGED **" : "")
                  << "\n";
        human << "  runtime " << num(secs, 3) << " s\n";
    }
    return out;
}

Outcome cmd_greeks(const RunConfig& cfg, const Options& opt, std::ostream& human) {
    if (cfg.method == Method::MonteCarlo)
        throw ConfigError("greeks are a transform-only feature; set [run] method to transform or both");
    const ModelSpec m(cfg.model);
    const auto t0 = Clock::now();
    const double S = cfg.market.spot, h = 1e-3 * S;
    // the three spots share one node set, so the differences carry no quadrature noise
    ContourPricer pr(m, cfg.rates, cfg.contract, cfg.market, cfg.quad, cfg.contour);
    auto res = pr.run({S, S - h, S + h});
    for (const auto& r : res)
        if (!r.price.converged)
            throw ConvergenceError("contour integral did not reach tolerance within max_refinements",
                                   r.price.value, r.price.est_error);
    const double V = res[0].price.value, Vm = res[1].price.value, Vp = res[2].price.value;
    const double d_fd = (Vp - Vm) / (2 * h), g_fd = (Vp - 2 * V + Vm) / (h * h);
    const double d = res[0].delta, g = res[0].gamma;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-6); };
    const bool d_ok = rel(d, d_fd) <= 1e-3, g_ok = rel(g, g_fd) <= 1e-2;

    // sensitivity to the instantaneous variance: central difference of two runs
    const double v = cfg.market.inst_variance, hv = 1e-2 * v;
    MarketState up = cfg.market, dn = cfg.market;
    up.inst_variance += hv;
    dn.inst_variance -= hv;
    const double Vu = price(m, cfg.rates, cfg.contract, up, pr.plan().contour, cfg.quad).value;
    const double Vd = price(m, cfg.rates, cfg.contract, dn, pr.plan().contour, cfg.quad).value;
    const double dv = (Vu - Vd) / (2 * hv);

    Outcome out;
    Report& rep = out.report;
    rep.command = "greeks";
    rep.meta = {"config=" + cfg.source, "model=" + describe(m), "market=" + describe(cfg.rates, cfg.market),
                "contract=" + contract_name(cfg.contract) + " maturity=" + num(cfg.contract.maturity),
                "fd spot step=" + num(h) + " variance step=" + num(hv)};
    rep.columns = {"quantity", "contour", "finite_difference", "rel_diff", "tolerance", "flagged"};
    rep.rows.push_back({"price", num(V), "", "", "", ""});
    rep.rows.push_back({"delta", num(d), num(d_fd), num(rel(d, d_fd), 3), "1e-3", d_ok ? "false" : "true"});
    rep.rows.push_back({"gamma", num(g), num(g_fd), num(rel(g, g_fd), 3), "1e-2", g_ok ? "false" : "true"});
    rep.rows.push_back({"dV/dv", "", num(dv), "", "", ""});
    const double secs = seconds_since(t0);
    rep.volatile_line = "generated " + timestamp() + " | runtime " + num(secs, 4) + " s";
    if (!opt.quiet) {
        human << contract_name(cfg.contract) << " under " << describe(m) << "\n"
              << "  price  " << num(V) << "\n"
              << "  delta  " << num(d) << "  (fd " << num(d_fd) << ")" << (d_ok ? "" : "  ** FLAGGED **") << "\n"
              << "  gamma  " << num(g) << "  (fd " << num(g_fd) << ")" << (g_ok ? "" : "  ** FLAGGED **") << "\n"
              << "  dV/dv  " << num(dv) << "  (finite difference)\n"
              << "  runtime " << num(secs, 3) << " s\n";
    }
    return out;
}

Outcome cmd_validate(const RunConfig& cfg, const Options& opt, std::ostream& human) {
    Outcome out;
    Report& rep = out.report;
    rep.command = "validate";
    rep.volatile_line = "generated " + timestamp();
    rep.meta = {"config=" + cfg.source};
    rep.columns = {"check", "status", "detail"};
    const Validation v = validate_model(cfg.model);
    if (!v.ok) throw ModelRejected(v.condition, v.reason);
    const ModelSpec m(cfg.model);
    rep.rows.push_back({"model", "ok", describe(m)});
    const auto b = classify_boundaries(cfg.model);
    rep.rows.push_back({"boundary_zero", std::string(b.zero_attainable ? "attainable" : "unattainable"),
                        "closed form and scale function agree"});
    rep.rows.push_back({"boundary_infinity", std::string(b.infinity_attainable ? "attainable" : "unattainable"),
                        "closed form and scale function agree"});
    const auto plan = plan_route(cfg.contract, m, cfg.contract.maturity - cfg.market.time, cfg.contour);
    rep.rows.push_back({"contour", "ok",
                        std::string(route_name(plan.route)) + " k1=" + num(plan.contour.k1, 6) +
                            " k2=" + num(plan.contour.k2, 6)});
    rep.rows.push_back({"strip", "ok", to_string(strip(cfg.contract))});
    if (!opt.quiet) {
        human << "config " << cfg.source << " is valid\n";
        for (const auto& r : rep.rows) human << "  " << r[0] << ": " << r[1] << " (" << r[2] << ")\n";
    }
    return out;
}

} // namespace qv::cli
