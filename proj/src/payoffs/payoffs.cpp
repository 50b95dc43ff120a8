#include "qv/payoffs.hpp"

#include <cmath>

#include "qv/specfun.hpp"

namespace qv {

namespace {

template <class... Ts> struct overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overload(Ts...) -> overload<Ts...>;

void need(bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
}

const cplx I(0, 1);

// K^{1+iw}/(iw - w^2): the call/put kernel in log-price
cplx call_kernel(double K, cplx w) { return std::exp((1.0 + I * w) * std::log(K)) / (I * w - w * w); }

} // namespace

void validate(const ContractSpec& c) {
    need(c.maturity > 0 && std::isfinite(c.maturity), "maturity must be positive");
    std::visit(overload{
                   [](const TvoCall& p) {
                       need(p.target_vol > 0, "target_vol must be positive");
                       need(p.strike > 0, "strike must be positive");
                   },
                   [](const TvoPut& p) {
                       need(p.target_vol > 0, "target_vol must be positive");
                       need(p.strike > 0, "strike must be positive");
                   },
                   [](const DoubleDigitalCall& p) {
                       // zero strikes give the constant payoff 1 (Monte Carlo only)
                       need(p.asset_strike >= 0, "asset_strike must be nonnegative");
                       need(p.variance_strike >= 0, "variance_strike must be nonnegative");
                   },
                   [](const VolCappedCall& p) {
                       need(p.strike > 0, "strike must be positive");
                       need(p.vol_lo >= 0, "vol_lo must be nonnegative");
                       need(p.vol_hi > 0, "vol_hi must be positive");
                       need(p.vol_lo <= p.vol_hi, "vol_lo must not exceed vol_hi");
                   },
                   [](const VolStruckCall& p) { need(p.notional > 0, "notional must be positive"); },
                   [](const VanillaCall& p) { need(p.strike > 0, "strike must be positive"); },
                   [](const VanillaPut& p) { need(p.strike > 0, "strike must be positive"); },
                   [](const DigitalCall& p) { need(p.strike > 0, "strike must be positive"); },
               },
               c.payoff);
}

std::string contract_name(const ContractSpec& c) {
    static const char* names[] = {"tvo_call",     "tvo_put",      "double_digital_call",
                                  "vol_capped_call", "vol_struck_call", "vanilla_call",
                                  "vanilla_put",  "digital_call"};
    return names[c.payoff.index()];
}

bool depends_on_qv(const ContractSpec& c) {
    return !(c.get<VanillaCall>() || c.get<VanillaPut>() || c.get<DigitalCall>());
}

bool is_call_like(const ContractSpec& c) {
    return c.get<TvoCall>() || c.get<VanillaCall>() || c.get<VolCappedCall>() ||
           c.get<VolStruckCall>();
}

double evaluate(const ContractSpec& c, double S, double I_T) {
    const double T = c.maturity;
    if (!(S > 0)) throw InvalidArgument("terminal spot must be positive");
    if (!(I_T >= 0)) throw InvalidArgument("terminal quadratic variation must be nonnegative");
    return std::visit(
        overload{
            [&](const TvoCall& p) {
                if (I_T <= 0) throw InvalidArgument("TVO payoff undefined at I_T = 0");
                return p.target_vol * std::sqrt(T / I_T) * std::max(S - p.strike, 0.0);
            },
            [&](const TvoPut& p) {
                if (I_T <= 0) throw InvalidArgument("TVO payoff undefined at I_T = 0");
                return p.target_vol * std::sqrt(T / I_T) * std::max(p.strike - S, 0.0);
            },
            [&](const DoubleDigitalCall& p) {
                return (S >= p.asset_strike && I_T / T >= p.variance_strike) ? 1.0 : 0.0;
            },
            [&](const VolCappedCall& p) {
                double vol = std::sqrt(I_T / T);
                bool in = vol >= p.vol_lo && vol <= p.vol_hi;
                return in ? std::max(S - p.strike, 0.0) : 0.0;
            },
            [&](const VolStruckCall& p) {
                return std::max(S - p.notional * std::sqrt(I_T / T), 0.0);
            },
            [&](const VanillaCall& p) { return std::max(S - p.strike, 0.0); },
            [&](const VanillaPut& p) { return std::max(p.strike - S, 0.0); },
            [&](const DigitalCall& p) { return S >= p.strike ? 1.0 : 0.0; },
        },
        c.payoff);
}

Strip strip(const ContractSpec& c) {
    const Interval above1{1.0, inf}, below0{-inf, 0.0}, above0{0.0, inf}, all{};
    return std::visit(overload{
                          [&](const TvoCall&) { return Strip{above1, above0}; },
                          [&](const TvoPut&) { return Strip{below0, above0}; },
                          [&](const DoubleDigitalCall&) { return Strip{above0, above0}; },
                          [&](const VolCappedCall&) { return Strip{above1, above0}; },
                          [&](const VolStruckCall&) { return Strip{Interval{1.0, 3.0}, above0}; },
                          [&](const VanillaCall&) { return Strip{above1, all}; },
                          [&](const VanillaPut&) { return Strip{below0, all}; },
                          [&](const DigitalCall&) { return Strip{above0, all}; },
                      },
                      c.payoff);
}

cplx payoff_transform_unchecked(const ContractSpec& c, cplx w, cplx e) {
    const double T = c.maturity;
    return std::visit(
        overload{
            [&](const TvoCall& p) {
                return p.target_vol * std::sqrt(pi * T) / std::sqrt(-I * e) * call_kernel(p.strike, w);
            },
            [&](const TvoPut& p) {
                return p.target_vol * std::sqrt(pi * T) / std::sqrt(-I * e) * call_kernel(p.strike, w);
            },
            [&](const DoubleDigitalCall& p) {
                return -std::exp(I * w * std::log(p.asset_strike) + I * T * p.variance_strike * e) /
                       (w * e);
            },
            [&](const VolCappedCall& p) {
                cplx gate = std::exp(I * e * (p.vol_lo * p.vol_lo * T)) -
                            std::exp(I * e * (p.vol_hi * p.vol_hi * T));
                return gate * std::exp((1.0 + I * w) * std::log(p.strike)) / ((w + I * w * w) * e);
            },
            [&](const VolStruckCall& p) {
                cplx lead = (1.0 + I * w) * std::log(p.notional / std::sqrt(T));
                cplx lg = specfun::log_gamma((3.0 + I * w) / 2.0);
                cplx tail = (-1.5 - I * w / 2.0) * std::log(-I * e);
                return std::exp(lead + lg + tail) / (I * w - w * w);
            },
            [&](const VanillaCall& p) { return call_kernel(p.strike, w); },
            [&](const VanillaPut& p) { return call_kernel(p.strike, w); },
            [&](const DigitalCall& p) { return -std::exp(I * w * std::log(p.strike)) / (I * w); },
        },
        c.payoff);
}

cplx payoff_transform(const ContractSpec& c, cplx w, cplx e) {
    Strip s = strip(c);
    if (!s.im_omega.contains(w.imag()))
        throw StripViolation(contract_name(c) + " transform: Im(omega) = " +
                             std::to_string(w.imag()) + " outside " + to_string(s));
    if (depends_on_qv(c) && !s.im_eta.contains(e.imag()))
        throw StripViolation(contract_name(c) + " transform: Im(eta) = " +
                             std::to_string(e.imag()) + " outside " + to_string(s));
    return payoff_transform_unchecked(c, w, e);
}

} // namespace qv
