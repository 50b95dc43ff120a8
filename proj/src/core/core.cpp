#include "qv/core.hpp"

#include <cmath>
#include <sstream>

namespace qv {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

Validation reject(std::string cond, std::string why) {
    return Validation{false, std::move(cond), std::move(why)};
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

Validation validate_model(const ModelParams& m) {
    return std::visit(
        [](const auto& p) -> Validation {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, HestonParams>) {
                if (!finite_all({p.kappa, p.theta, p.epsilon, p.rho}))
                    return reject("domain", "Heston parameters must be finite");
                if (p.kappa <= 0 || p.theta <= 0 || p.epsilon <= 0)
                    return reject("domain", "Heston kappa, theta, epsilon must be positive");
                if (p.rho < -1 || p.rho > 1) return reject("domain", "rho must lie in [-1, 1]");
                double lhs = 2 * p.kappa * p.theta, rhs = p.epsilon * p.epsilon;
                if (lhs < rhs)
                    return reject("NB", "(NB) violated: 2*kappa*theta = " + fmt(lhs) +
                                            " < epsilon^2 = " + fmt(rhs) +
                                            ", variance can reach 0");
                return {};
            } else if constexpr (std::is_same_v<T, ThreeHalvesParams>) {
                if (!finite_all({p.kappa, p.theta, p.epsilon, p.rho}))
                    return reject("domain", "3/2 parameters must be finite");
                // kappa may be negative here; (NB) below is the binding check
                if (p.theta <= 0 || p.epsilon <= 0)
                    return reject("domain", "3/2 theta, epsilon must be positive");
                if (p.rho < -1 || p.rho > 1) return reject("domain", "rho must lie in [-1, 1]");
                if (2 * p.kappa < -p.epsilon * p.epsilon)
                    return reject("NB", "(NB) violated: 2*kappa < -epsilon^2, variance explodes");
                return {};
            } else {
                if (!finite_all({p.theta, p.epsilon}))
                    return reject("domain", "GARCH parameters must be finite");
                if (p.epsilon <= 0) return reject("domain", "GARCH epsilon must be positive");
                return {};
            }
        },
        m);
}

ModelSpec::ModelSpec(const ModelParams& p) : p_(p) {
    auto v = validate_model(p);
    if (!v.ok) throw ModelRejected(v.condition, v.reason);
}

double ModelSpec::rho() const noexcept {
    if (auto h = get<HestonParams>()) return h->rho;
    if (auto t = get<ThreeHalvesParams>()) return t->rho;
    return 0.0;
}

std::string ModelSpec::name() const {
    switch (p_.index()) {
    case 0: return "heston";
    case 1: return "three_halves";
    default: return "garch";
    }
}

void validate(const MarketState& s) {
    if (!(s.spot > 0) || !std::isfinite(s.spot)) throw InvalidArgument("spot must be positive");
    if (!(s.inst_variance > 0) || !std::isfinite(s.inst_variance))
        throw InvalidArgument("inst_variance must be positive");
    if (!(s.accrued_qv >= 0) || !std::isfinite(s.accrued_qv))
        throw InvalidArgument("accrued_qv must be nonnegative");
    if (!(s.time >= 0) || !std::isfinite(s.time)) throw InvalidArgument("time must be nonnegative");
}

void validate(const RatesSpec& r) {
    if (!std::isfinite(r.risk_free) || !std::isfinite(r.dividend_yield))
        throw InvalidArgument("rates must be finite");
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    if (!(r.lo < r.hi)) return std::nullopt;
    return r;
}

std::optional<Strip> intersect_strips(const Strip& a, const Strip& b) {
    auto w = intersect(a.im_omega, b.im_omega);
    auto e = intersect(a.im_eta, b.im_eta);
    if (!w || !e) return std::nullopt;
    return Strip{*w, *e};
}

std::string to_string(const Strip& s) {
    auto iv = [](const Interval& i) { return "(" + fmt(i.lo) + ", " + fmt(i.hi) + ")"; };
    return "Im(omega) in " + iv(s.im_omega) + ", Im(eta) in " + iv(s.im_eta);
}

} // namespace qv
