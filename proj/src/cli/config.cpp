#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qv/cli.hpp"

namespace qv::cli {

namespace pt = boost::property_tree;

namespace {

// reads typed keys from one section and remembers which were consumed
class Section {
public:
    Section(const pt::ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

    bool present() const { return node_ != nullptr; }

    double num(const std::string& key) {
        auto v = opt_num(key);
        if (!v) throw ConfigError("[" + name_ + "] is missing required key '" + key + "'");
        return *v;
    }
    std::optional<double> opt_num(const std::string& key) {
        auto s = opt_str(key);
        if (!s) return std::nullopt;
        try {
            std::size_t pos = 0;
            double v = std::stod(*s, &pos);
            if (pos != s->size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("[" + name_ + "] " + key + " = '" + *s + "' is not a number");
        }
    }
    std::string str(const std::string& key) {
        auto s = opt_str(key);
        if (!s) throw ConfigError("[" + name_ + "] is missing required key '" + key + "'");
        return *s;
    }
    std::optional<std::string> opt_str(const std::string& key) {
        used_.insert(key);
        if (!node_) return std::nullopt;
        auto c = node_->get_child_optional(key);
        if (!c) return std::nullopt;
        return c->data();
    }
    // anything left over is not part of the schema
    void finish() const {
        if (!node_) return;
        for (const auto& kv : *node_)
            if (!used_.count(kv.first))
                throw ConfigError("[" + name_ + "] unknown key '" + kv.first + "'");
    }

private:
    const pt::ptree* node_;
    std::string name_;
    std::set<std::string> used_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
    auto c = root.get_child_optional(name);
    return c ? &*c : nullptr;
}

Section required(const pt::ptree& root, const std::string& name) {
    const pt::ptree* c = child(root, name);
    if (!c) throw ConfigError("missing section [" + name + "]");
    return Section(c, name);
}

ModelParams read_model(Section s) {
    const std::string type = s.str("type");
    ModelParams m;
    if (type == "heston") {
        m = HestonParams{s.num("kappa"), s.num("theta"), s.num("epsilon"), s.num("rho")};
    } else if (type == "three_halves") {
        m = ThreeHalvesParams{s.num("kappa"), s.num("theta"), s.num("epsilon"), s.num("rho")};
    } else if (type == "garch") {
        m = GarchParams{s.num("theta"), s.num("epsilon")};
    } else {
        throw ConfigError("[model] type '" + type + "' is not one of heston, three_halves, garch");
    }
    s.finish();
    return m;
}

ContractSpec read_contract(Section s) {
    const std::string type = s.str("type");
    const double T = s.num("maturity");
    Payoff p;
    if (type == "tvo_call") {
        p = TvoCall{s.num("target_vol"), s.num("strike")};
    } else if (type == "tvo_put") {
        p = TvoPut{s.num("target_vol"), s.num("strike")};
    } else if (type == "double_digital_call") {
        p = DoubleDigitalCall{s.num("asset_strike"), s.num("variance_strike")};
    } else if (type == "vol_capped_call") {
        p = VolCappedCall{s.num("strike"), s.num("vol_lo"), s.num("vol_hi")};
    } else if (type == "vol_struck_call") {
        p = VolStruckCall{s.num("notional")};
    } else if (type == "vanilla_call") {
        p = VanillaCall{s.num("strike")};
    } else if (type == "vanilla_put") {
        p = VanillaPut{s.num("strike")};
    } else if (type == "digital_call") {
        p = DigitalCall{s.num("strike")};
    } else {
        throw ConfigError("[contract] type '" + type + "' is not a known contract");
    }
    s.finish();
    ContractSpec c{p, T};
    try {
        validate(c);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("[contract] ") + e.what());
    }
    return c;
}

int as_int(double v, const std::string& what) {
    if (v != std::floor(v) || v < 0 || v > 2e9) throw ConfigError(what + " must be a nonnegative integer");
    return int(v);
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
    case Method::Transform: return "transform";
    case Method::MonteCarlo: return "montecarlo";
    default: return "both";
    }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> known = {"model",      "rates",      "market", "contract",
                                                "run",        "quadrature", "montecarlo", "output"};
    for (const auto& kv : root) {
        if (!known.count(kv.first)) throw ConfigError("unknown section [" + kv.first + "]");
        if (kv.second.empty() && !kv.second.data().empty())
            throw ConfigError("key '" + kv.first + "' outside any section");
    }

    RunConfig cfg;
    cfg.source = source;
    cfg.model = read_model(required(root, "model"));

    {
        Section s = required(root, "rates");
        cfg.rates = RatesSpec{s.num("risk_free"), s.num("dividend_yield")};
        s.finish();
    }
    {
        Section s = required(root, "market");
        cfg.market = MarketState{s.num("spot"), s.num("variance"), s.num("accrued_qv"), s.num("time")};
        s.finish();
    }
    cfg.contract = read_contract(required(root, "contract"));
    {
        Section s = required(root, "run");
        const std::string m = s.str("method");
        if (m == "transform")
            cfg.method = Method::Transform;
        else if (m == "montecarlo")
            cfg.method = Method::MonteCarlo;
        else if (m == "both")
            cfg.method = Method::Both;
        else
            throw ConfigError("[run] method '" + m + "' is not transform, montecarlo or both");
        s.finish();
    }
    {
        Section s(child(root, "quadrature"), "quadrature");
        if (auto v = s.opt_num("rel_tol")) cfg.quad.rel_tol = *v;
        if (auto v = s.opt_num("abs_tol")) cfg.quad.abs_tol = *v;
        if (auto v = s.opt_num("max_halfwidth")) cfg.quad.max_halfwidth = *v;
        if (auto v = s.opt_num("initial_panels")) cfg.quad.initial_panels = as_int(*v, "initial_panels");
        if (auto v = s.opt_num("max_refinements")) cfg.quad.max_refinements = as_int(*v, "max_refinements");
        auto k1 = s.opt_num("k1"), k2 = s.opt_num("k2");
        if (k1.has_value() != k2.has_value()) throw ConfigError("[quadrature] k1 and k2 go together");
        if (k1) cfg.contour = Contour{*k1, *k2};
        s.finish();
        try {
            validate(cfg.quad);
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("[quadrature] ") + e.what());
        }
    }
    {
        Section s(child(root, "montecarlo"), "montecarlo");
        if (auto v = s.opt_num("paths")) {
            if (!(*v >= 1) || *v != std::floor(*v)) throw ConfigError("[montecarlo] paths must be a positive integer");
            cfg.mc.n_paths = std::int64_t(*v);
        }
        if (auto v = s.opt_num("steps")) cfg.mc.n_steps = as_int(*v, "steps");
        if (auto v = s.opt_str("seed")) {
            try {
                cfg.mc.seed = std::stoull(*v);
            } catch (const std::exception&) {
                throw ConfigError("[montecarlo] seed must be an unsigned integer");
            }
        }
        if (auto v = s.opt_str("floor")) {
            if (*v == "full_truncation")
                cfg.mc.floor = mc::FloorPolicy::FullTruncation;
            else if (*v == "reflection")
                cfg.mc.floor = mc::FloorPolicy::Reflection;
            else
                throw ConfigError("[montecarlo] floor must be full_truncation or reflection");
        }
        s.finish();
    }
    {
        Section s(child(root, "output"), "output");
        if (auto v = s.opt_str("path")) cfg.output = *v;
        s.finish();
    }
    try {
        validate(cfg.market);
        validate(cfg.rates);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.market.time < cfg.contract.maturity))
        throw ConfigError("[market] time must be before the contract maturity");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    return parse_config(f, path);
}

} // namespace qv::cli
