#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include "qv/cli.hpp"

#ifndef QV_DATA_DIR
#define QV_DATA_DIR "data"
#endif

namespace qv::cli {

namespace {

std::string num(double v, int prec = 10) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// one row of a table: everything needed to price it
struct RowSetup {
    ModelSpec model;
    RatesSpec rates;
    MarketState market;
    ContractSpec contract;
};

struct TableDef {
    std::string title;
    double tolerance;
    std::function<RowSetup(double)> row;
    // optional comparison contract priced alongside (digital / vanilla)
    std::function<std::optional<ContractSpec>(const RowSetup&)> comparison;
};

// parameters shared by every printed table
HestonParams heston(double rho) { return {0.5, 0.2, 0.3, rho}; }

TableDef table_def(int id) {
    switch (id) {
    case 1:
        return {"TVO call, strikes", 0.01,
                [](double K) {
                    return RowSetup{ModelSpec(heston(0.0)), {0.0, 0.0}, {100, 0.2, 0.0, 0.0},
                                    {TvoCall{0.1, K}, 3.0}};
                },
                nullptr};
    case 2:
        return {"TVO call, correlation", 0.05,
                [](double rho) {
                    return RowSetup{ModelSpec(heston(rho)), {0.08, 0.0}, {100, 0.2, 0.46, 2.5},
                                    {TvoCall{0.1, 85}, 5.0}};
                },
                nullptr};
    case 3:
        return {"double digital call, accrued variance", 0.005,
                [](double I) {
                    return RowSetup{ModelSpec(heston(0.2)), {0.1, 0.01}, {120, 0.2, I, 1.0},
                                    {DoubleDigitalCall{100, 0.24}, 2.5}};
                },
                [](const RowSetup& r) { return std::optional<ContractSpec>(ContractSpec{DigitalCall{100}, r.contract.maturity}); }};
    case 4:
        return {"vol-capped call, upper vol bound", 0.05,
                [](double K2) {
                    return RowSetup{ModelSpec(heston(-0.3)), {0.07, 0.0}, {110, 0.2, 0.0, 0.0},
                                    {VolCappedCall{100, 0.2, K2}, 2.0}};
                },
                [](const RowSetup& r) { return std::optional<ContractSpec>(ContractSpec{VanillaCall{100}, r.contract.maturity}); }};
    case 5:
        return {"vol-struck call, maturity", 0.05,
                [](double T) {
                    return RowSetup{ModelSpec(heston(-0.5)), {0.05, 0.02}, {50, 0.2, 0.18, 1.0},
                                    {VolStruckCall{150}, T}};
                },
                nullptr};
    default:
        throw ConfigError("table id must be 1..5");
    }
}

} // namespace

std::string reference_path() {
    if (const char* d = std::getenv("QVPRICE_DATA_DIR")) return std::string(d) + "/reference_tables.csv";
    return std::string(QV_DATA_DIR) + "/reference_tables.csv";
}

std::vector<ReferenceRow> reference_rows(int table) {
    std::ifstream f(reference_path());
    if (!f) throw ConfigError("cannot open reference data " + reference_path());
    std::vector<ReferenceRow> out;
    std::string line;
    bool header = false;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        auto c = split_csv(line);
        if (c.size() != 6) throw ConfigError("malformed reference row: " + line);
        ReferenceRow r{std::stoi(c[0]), c[1], std::stod(c[2]), std::stod(c[3]), std::stod(c[4]), std::nullopt};
        if (!c[5].empty()) r.comparison = std::stod(c[5]);
        if (r.table == table) out.push_back(r);
    }
    return out;
}

Outcome cmd_table(int id, const Options& opt, std::ostream& human) {
    if (id < 1 || id > 5) throw ConfigError("table id must be 1..5, got " + std::to_string(id));
    const auto t0 = std::chrono::steady_clock::now();
    const TableDef def = table_def(id);
    const auto refs = reference_rows(id);
    if (refs.empty()) throw ConfigError("no reference rows for table " + std::to_string(id));
    const std::size_t n = refs.size();

    // wide truncation window: short-dated rows decay slowly in eta
    QuadConfig q;
    q.max_halfwidth = 1000.0;

    std::vector<RowSetup> setups;
    for (const auto& r : refs) setups.push_back(def.row(r.value));
    std::vector<PriceResult> tf(n);
    std::vector<double> cmp(n, std::nan(""));
    std::vector<std::exception_ptr> errs(n);
    // rows price concurrently; each pricer runs serially inside
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) {
        try {
            const auto& s = setups[std::size_t(i)];
            ContourPricer p(s.model, s.rates, s.contract, s.market, q, std::nullopt, Exec::Serial);
            auto r = p.run();
            if (!r.price.converged)
                throw ConvergenceError("table row did not converge", r.price.value, r.price.est_error);
            tf[std::size_t(i)] = r.price;
            if (def.comparison) {
                if (auto c = def.comparison(s)) {
                    ContourPricer pc(s.model, s.rates, *c, s.market, q, std::nullopt, Exec::Serial);
                    cmp[std::size_t(i)] = pc.run().price.value;
                }
            }
        } catch (...) {
            errs[std::size_t(i)] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    // Monte Carlo column, reusing paths where the rows share dynamics
    mc::McConfig mcc;
    if (opt.mc_paths) mcc.n_paths = *opt.mc_paths;
    if (opt.seed) mcc.seed = *opt.seed;
    const bool do_mc = mcc.n_paths > 0;
    std::vector<mc::McEstimate> mce(n);
    if (do_mc) {
        std::optional<mc::SampleSet> shared;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = setups[i];
            const bool reuse = id == 1 || id == 3 || id == 4;
            if (!reuse || !shared) {
                shared = mc::simulate_terminals(s.model, s.rates, s.market, s.contract.maturity, mcc);
            }
            const mc::SampleSet* use = &*shared;
            std::optional<mc::SampleSet> shifted;
            if (id == 3 && s.market.accrued_qv != shared->start.accrued_qv) {
                shifted = mc::with_accrued_offset(*shared, s.market.accrued_qv - shared->start.accrued_qv);
                use = &*shifted;
            }
            mce[i] = mc::mc_price(s.contract, *use);
        }
    }

    Outcome out;
    Report& rep = out.report;
    rep.command = "table " + std::to_string(id);
    rep.meta = {"table=" + std::to_string(id) + " " + def.title,
                "reference=" + reference_path(),
                "tolerance=" + num(def.tolerance),
                do_mc ? "mc paths=" + std::to_string(mcc.n_paths) + " seed=" + std::to_string(mcc.seed)
                      : std::string("mc disabled")};
    rep.columns = {"row_param", "row_value", "reference", "transform", "est_error", "abs_dev", "rel_dev",
                   "mc_value",  "mc_std_error", "mc_z", "comparison_reference", "comparison_computed", "pass"};
    bool all = true;
    std::vector<std::string> notes;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = refs[i];
        const double v = tf[i].value, dev = v - r.pde;
        bool pass = std::abs(dev) <= def.tolerance;
        double z = std::nan("");
        if (do_mc) {
            z = (v - mce[i].mean) / mce[i].std_error;
            if (id == 2 && !(std::abs(z) <= 3.0)) pass = false;
        }
        // the contract must not be worth more than its unrestricted counterpart
        if (id == 3 && !(v <= cmp[i] + tf[i].est_error)) pass = false;
        if (id == 4 && r.comparison && !(v <= *r.comparison + tf[i].est_error)) pass = false;
        if ((id == 3 || id == 5) && i > 0 && !(v > tf[i - 1].value)) {
            pass = false;
            notes.push_back("row " + std::to_string(i) + " breaks monotonicity");
        }
        all = all && pass;
        rep.rows.push_back({r.param, num(r.value), num(r.pde), num(v), num(tf[i].est_error, 3), num(dev, 4),
                            num(dev / r.pde, 4), do_mc ? num(mce[i].mean) : "",
                            do_mc ? num(mce[i].std_error, 4) : "", do_mc ? num(z, 3) : "",
                            r.comparison ? num(*r.comparison) : "", num(cmp[i]), pass ? "true" : "false"});
    }
    for (const auto& note : notes) rep.meta.push_back("check " + note);
    out.code = all ? kOk : kToleranceBreach;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::time_t tt = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    rep.volatile_line = std::string("generated ") + buf + " | runtime " + num(secs, 4) + " s";
    if (!opt.quiet) {
        human << "table " << id << ": " << def.title << "\n";
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = rep.rows[i];
            human << "  " << row[0] << "=" << row[1] << "  reference " << row[2] << "  transform " << row[3];
            if (do_mc) human << "  mc " << row[7] << " +/- " << row[8];
            human << (row[12] == "true" ? "  ok" : "  MISS") << "\n";
        }
        human << (all ? "all rows within tolerance" : "tolerance breach") << "\n";
    }
    return out;
}

} // namespace qv::cli
