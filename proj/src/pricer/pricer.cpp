#include "qv/pricer.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#include "line.hpp"

namespace qv {

using detail::Multi;
using detail::NodeOut;

void validate(const QuadConfig& q) {
    if (!(q.rel_tol > 0) || !(q.abs_tol > 0) || !(q.max_halfwidth > 0) || q.initial_panels < 1 ||
        q.max_refinements < 1)
        throw InvalidArgument("QuadConfig: tolerances, max_halfwidth, initial_panels must be positive "
                              "and max_refinements >= 1");
}

const char* route_name(Route r) {
    switch (r) {
    case Route::Contour2D: return "contour2d";
    case Route::Contour1D: return "contour1d";
    default: return "laplace";
    }
}

namespace {

const cplx I(0, 1);

bool is_vanilla(const ContractSpec& c) { return c.get<VanillaCall>() || c.get<VanillaPut>(); }
bool is_tvo(const ContractSpec& c) { return c.get<TvoCall>() || c.get<TvoPut>(); }

double pick(const Interval& iv, double fallback) {
    if (iv.bounded()) return 0.5 * (iv.lo + iv.hi);
    if (iv.lo > -inf) return iv.lo + 0.5;
    if (iv.hi < inf) return iv.hi - 0.5;
    return fallback;
}

// omega interval on which the GARCH contour condition can hold for
// some Im(eta) above eta_lo
std::optional<Interval> garch_omega_range(double eta_lo) {
    const double disc = 1.0 - 8.0 * eta_lo;
    if (!(disc > 0)) return std::nullopt;
    const double r = std::sqrt(disc);
    return Interval{0.5 * (1 - r), 0.5 * (1 + r)};
}

// does the line Im(omega)=k1, Im(eta)=k2 avoid the Heston singular set on
// a sample of nodes
bool line_regular(const ModelSpec& m, const Contour& c, double tau, bool qv) {
    if (!m.get<HestonParams>()) return true;
    for (int i = 0; i <= 40; ++i) {
        const double s = 0.25 * i * i;
        for (int j = -20; j <= 20; ++j) {
            const double t = qv ? 0.25 * j * std::abs(j) : 0.0;
            if (!is_regular({cplx(s, c.k1), cplx(t, qv ? c.k2 : 0.0), 0.1, tau}, m)) return false;
            if (!qv) break;
        }
    }
    return true;
}

bool inside(const ContractSpec& c, const ModelSpec& m, const Contour& k) {
    const bool qv = depends_on_qv(c);
    Strip s = strip(c);
    bool ok_omega = s.im_omega.contains(k.k1) || (is_vanilla(c) && k.k1 > 0 && k.k1 < 1);
    bool ok_eta = !qv || s.im_eta.contains(k.k2);
    Contour eff{k.k1, qv ? k.k2 : 0.0};
    bool ok_model = model_strip(m).contains(eff.k1, eff.k2) || !qv;
    return ok_omega && ok_eta && ok_model && contour_admissible(m, eff);
}

} // namespace

Contour choose_contour(const ContractSpec& c, const ModelSpec& m, double tau,
                       std::optional<Contour> override_contour) {
    const bool qv = depends_on_qv(c);
    if (override_contour) {
        if (!inside(c, m, *override_contour))
            throw StripViolation("contour (" + std::to_string(override_contour->k1) + ", " +
                                 std::to_string(override_contour->k2) +
                                 ") is outside the admissible strip for " + contract_name(c) +
                                 " under " + m.name());
        Contour k = *override_contour;
        if (!qv) k.k2 = 0.0;
        if (!line_regular(m, k, tau, qv))
            throw SingularPointError("contour passes through the transform's singular set");
        return k;
    }
    Strip ps = strip(c);
    Contour k;
    if (!qv) {
        Interval om = ps.im_omega;
        if (m.get<GarchParams>()) {
            // eta = 0 needs 0 < k1 < 1; vanillas get there through the residue terms
            auto w = is_vanilla(c) ? std::optional<Interval>(Interval{0.0, 1.0})
                                   : intersect(om, Interval{0.0, 1.0});
            if (!w) throw EmptyStripError("no admissible omega line for " + contract_name(c) + " under garch");
            om = *w;
        }
        k = Contour{pick(om, 0.5), 0.0};
    } else {
        auto both = intersect_strips(ps, model_strip(m));
        if (!both)
            throw EmptyStripError("payoff strip " + to_string(ps) + " and model strip " +
                                  to_string(model_strip(m)) + " do not intersect");
        Interval om = both->im_omega, et = both->im_eta;
        if (m.get<GarchParams>()) {
            auto g = garch_omega_range(et.lo);
            auto w = g ? intersect(om, *g) : std::nullopt;
            if (!w)
                throw EmptyStripError("no contour with Re(omega^2 - i omega + 2 i eta) > 0 inside " +
                                      to_string(*both) + " for " + contract_name(c));
            om = *w;
            k.k1 = pick(om, 0.5);
            auto e2 = intersect(et, Interval{-inf, 0.5 * (k.k1 - k.k1 * k.k1)});
            if (!e2) throw EmptyStripError("empty eta range for garch contour");
            et = *e2;
        } else {
            k.k1 = pick(om, 0.5);
        }
        k.k2 = pick(et, 0.5);
    }
    // nudge off the Heston singular set if the default line touches it
    for (int tries = 0; tries < 8 && !line_regular(m, k, tau, qv); ++tries) k.k1 += 0.013;
    if (!line_regular(m, k, tau, qv))
        throw SingularPointError("could not find a regular contour near the default");
    return k;
}

RoutePlan plan_route(const ContractSpec& c, const ModelSpec& m, double tau,
                     std::optional<Contour> override_contour) {
    if (!depends_on_qv(c)) return {Route::Contour1D, choose_contour(c, m, tau, override_contour)};
    try {
        return {Route::Contour2D, choose_contour(c, m, tau, override_contour)};
    } catch (const EmptyStripError&) {
        if (!is_tvo(c)) throw;
    } catch (const StripViolation&) {
        // an override (k1 in (0,1), k2 = 0) names the Laplace route's line
        if (!is_tvo(c) || !override_contour || !(override_contour->k1 > 0 && override_contour->k1 < 1) ||
            override_contour->k2 != 0.0)
            throw;
    }
    double k1 = 0.5;
    if (override_contour && override_contour->k1 > 0 && override_contour->k1 < 1) k1 = override_contour->k1;
    return {Route::Laplace, Contour{k1, 0.0}};
}

namespace {

// transform evaluator with the singular-node policy and a cached GARCH kernel
struct Transform {
    ModelSpec model;
    double v, tau;
    std::shared_ptr<const garch::Kernel> kernel;

    Transform(const ModelSpec& m, double v_, double tau_) : model(m), v(v_), tau(tau_) {
        if (auto g = m.get<GarchParams>(); g && tau > 0) kernel = garch::kernel_for(*g, tau);
    }
    cplx raw(cplx w, cplx e) const {
        if (kernel) return kernel->eval_u(w * w - I * w + 2.0 * I * e, v).value;
        return fundamental_transform({w, e, v, tau}, model);
    }
    // a node on the singular set is replaced by two half-shifted nodes
    cplx operator()(cplx w, cplx e) const {
        // GARCH: u = 0 is removable, the transform is E[1] = 1 there
        if (kernel && std::abs(w * w - I * w + 2.0 * I * e) < 1e-12) return 1.0;
        if (is_regular({w, e, v, tau}, model)) return raw(w, e);
        const double h = 1e-4 * (1.0 + std::abs(w.real()));
        return 0.5 * (raw(w - h, e) + raw(w + h, e));
    }
};

struct Spots {
    int n;
    std::array<double, 3> S, xt;  // spot and log S + (r-d) tau
};

// value and Greek weights at one omega for every spot
inline void spread(Multi& out, const Spots& sp, cplx w, cplx base) {
    const cplx wd = -I * w, wg = I * w - w * w;
    for (int j = 0; j < sp.n; ++j) {
        const cplx e = std::exp(-I * w * sp.xt[j]) * base;
        out.v[3 * j] = e;
        out.v[3 * j + 1] = e * wd / sp.S[j];
        out.v[3 * j + 2] = e * wg / (sp.S[j] * sp.S[j]);
    }
}

void run_batch(const std::vector<double>& xs, std::vector<NodeOut>& out, Exec exec,
               const std::function<NodeOut(double)>& f) {
    const std::ptrdiff_t n = std::ptrdiff_t(xs.size());
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(xs[i]);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
#pragma omp parallel for schedule(dynamic, 2)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = f(xs[i]);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

detail::Batch serial_batch(std::function<NodeOut(double)> f) {
    return [f](const std::vector<double>& xs, std::vector<NodeOut>& out) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    };
}

} // namespace

ContourPricer::ContourPricer(ModelSpec m, RatesSpec r, ContractSpec c, MarketState s, QuadConfig q,
                             std::optional<Contour> contour, Exec exec)
    : model_(std::move(m)), rates_(r), contract_(std::move(c)), state_(s), quad_(q), exec_(exec) {
    validate(state_);
    validate(rates_);
    validate(contract_);
    validate(quad_);
    if (!(state_.time < contract_.maturity))
        throw InvalidArgument("valuation time must be before maturity");
    tau_ = contract_.maturity - state_.time;
    if (auto dd = contract_.get<DoubleDigitalCall>(); dd && !(dd->asset_strike > 0 && dd->variance_strike > 0))
        throw InvalidArgument("transform pricing needs positive double-digital strikes");
    plan_ = plan_route(contract_, model_, tau_, contour);
}

std::vector<Sensitivities> ContourPricer::run(const std::vector<double>& spots) const {
    if (spots.empty() || spots.size() > 3) throw InvalidArgument("ContourPricer::run takes 1 to 3 spots");
    Spots sp{int(spots.size()), {}, {}};
    for (int j = 0; j < sp.n; ++j) {
        if (!(spots[j] > 0)) throw InvalidArgument("spot must be positive");
        sp.S[j] = spots[j];
        sp.xt[j] = std::log(spots[j]) + (rates_.risk_free - rates_.dividend_yield) * tau_;
    }
    const double disc = std::exp(-rates_.risk_free * tau_);
    const double Iacc = state_.accrued_qv;
    const Contour k = plan_.contour;
    const Transform H(model_, state_.inst_variance, tau_);
    const ContractSpec& c = contract_;

    detail::LineSpec inner;
    inner.half = true;
    inner.w0 = 16.0;
    inner.n0 = quad_.initial_panels;
    inner.max_w = quad_.max_halfwidth;
    inner.max_refinements = quad_.max_refinements;
    detail::LineSpec outer = inner;
    // inner lines are smooth and short-lived: start coarse, let bisection refine
    inner.n0 = std::max(4, quad_.initial_panels / 8);

    // scale of the raw integral relative to the price
    double pref = 0.0;
    detail::LineResult res;
    std::array<cplx, 9> residue{};  // added after the integral, per output slot
    double truncation_eta = 0.0;

    if (plan_.route == Route::Contour2D) {
        pref = 2.0 * disc / (4 * pi * pi);
        inner.rel_tol = 0.1 * quad_.rel_tol;
        inner.abs_tol = 0.01 * quad_.abs_tol / pref;
        outer.half = false;
        outer.rel_tol = quad_.rel_tol;
        outer.abs_tol = quad_.abs_tol / pref;
        auto node = [&](double t) -> NodeOut {
            const cplx eta(t, k.k2);
            const cplx ie = std::exp(-I * eta * Iacc);
            auto f = [&](double s) -> NodeOut {
                const cplx w(s, k.k1);
                NodeOut o;
                spread(o.v, sp, w, H(w, eta) * payoff_transform_unchecked(c, w, eta) * ie);
                return o;
            };
            auto r = detail::integrate_line(serial_batch(f), inner);
            return NodeOut{r.value, r.error, r.nodes, r.converged};
        };
        res = detail::integrate_line(
            [&](const std::vector<double>& xs, std::vector<NodeOut>& out) { run_batch(xs, out, exec_, node); },
            outer);
        truncation_eta = res.truncation;
    } else if (plan_.route == Route::Contour1D) {
        pref = 2.0 * disc / (2 * pi);
        inner.rel_tol = quad_.rel_tol;
        inner.abs_tol = quad_.abs_tol / pref;
        auto f = [&](double s) -> NodeOut {
            const cplx w(s, k.k1);
            NodeOut o;
            spread(o.v, sp, w, H(w, 0.0) * payoff_transform_unchecked(c, w, 0.0));
            return o;
        };
        res = detail::integrate_line(
            [&](const std::vector<double>& xs, std::vector<NodeOut>& out) { run_batch(xs, out, exec_, f); },
            inner);
        // poles crossed when a vanilla line sits in 0 < k1 < 1
        const bool mid = is_vanilla(c) && k.k1 > 0 && k.k1 < 1;
        if (mid) {
            Multi r;
            if (c.get<VanillaCall>()) {
                spread(r, sp, cplx(0, 1), H(cplx(0, 1), 0.0));
            } else {
                spread(r, sp, cplx(0, 0), c.get<VanillaPut>()->strike * H(0.0, 0.0));
            }
            for (int i = 0; i < 9; ++i) residue[i] = disc * r.v[i];
        }
    } else {
        // Laplace route for TVOs:
        //   V = sbar sqrt(T) (2/sqrt(pi)) int_0^inf exp(-mu^2 I_t) C(mu^2) dmu
        // with C(lambda) the discounted call/put under the weight exp(-lambda dI),
        // priced on a line 0 < k1 < 1 plus the residue of the crossed pole
        const double sbar = c.get<TvoCall>() ? c.get<TvoCall>()->target_vol : c.get<TvoPut>()->target_vol;
        const double K = c.get<TvoCall>() ? c.get<TvoCall>()->strike : c.get<TvoPut>()->strike;
        const bool call = c.get<TvoCall>() != nullptr;
        const ContractSpec vanilla{call ? Payoff{VanillaCall{K}} : Payoff{VanillaPut{K}}, c.maturity};
        const double outer_pref = sbar * std::sqrt(c.maturity) * 2.0 / std::sqrt(pi);
        pref = outer_pref;
        inner.rel_tol = 0.1 * quad_.rel_tol;
        inner.abs_tol = 0.01 * quad_.abs_tol / (outer_pref * disc / pi);
        outer.half = true;
        outer.w0 = 8.0;
        outer.rel_tol = quad_.rel_tol;
        outer.abs_tol = quad_.abs_tol / outer_pref;
        auto node = [&](double mu) -> NodeOut {
            const double lam = mu * mu;
            const cplx eta(0.0, -lam);
            auto f = [&](double s) -> NodeOut {
                const cplx w(s, k.k1);
                NodeOut o;
                spread(o.v, sp, w, H(w, eta) * payoff_transform_unchecked(vanilla, w, 0.0));
                return o;
            };
            auto r = detail::integrate_line(serial_batch(f), inner);
            Multi pole;
            if (call)
                spread(pole, sp, cplx(0, 1), H(cplx(0, 1), eta));
            else
                spread(pole, sp, cplx(0, 0), K * H(0.0, eta));
            const double damp = std::exp(-lam * Iacc);
            NodeOut o;
            for (int i = 0; i < 9; ++i)
                o.v.v[i] = damp * disc * (pole.v[i].real() + r.value.v[i].real() / pi);
            o.err = damp * disc * r.error / pi;
            o.nodes = r.nodes;
            o.ok = r.converged;
            return o;
        };
        res = detail::integrate_line(
            [&](const std::vector<double>& xs, std::vector<NodeOut>& out) { run_batch(xs, out, exec_, node); },
            outer);
        truncation_eta = res.truncation;
        pref = outer_pref;
    }

    // symmetry probe: f(-s,-t) must equal conj f(s,t)
    double asym = 0.0, fmax = 0.0;
    if (plan_.route != Route::Laplace) {
        const bool two = plan_.route == Route::Contour2D;
        const double ss[] = {0.37, 1.9, 4.3, 8.1};
        const double ts[] = {0.7, -3.1, 9.7};
        for (double s : ss) {
            for (double t : ts) {
                const double tt = two ? t : 0.0;
                const cplx w1(s, k.k1), w2(-s, k.k1);
                const cplx e1(tt, two ? k.k2 : 0.0), e2(-tt, two ? k.k2 : 0.0);
                const cplx f1 = std::exp(-I * w1 * sp.xt[0]) * H(w1, e1) *
                                payoff_transform_unchecked(c, w1, e1) * std::exp(-I * e1 * Iacc);
                const cplx f2 = std::exp(-I * w2 * sp.xt[0]) * H(w2, e2) *
                                payoff_transform_unchecked(c, w2, e2) * std::exp(-I * e2 * Iacc);
                asym = std::max(asym, std::abs(f2 - std::conj(f1)));
                fmax = std::max(fmax, std::abs(f1));
                if (!two) break;
            }
        }
    }
    const double asym_ratio = fmax > 0 ? asym / fmax : 0.0;

    std::vector<Sensitivities> out(std::size_t(sp.n));
    for (int j = 0; j < sp.n; ++j) {
        auto& o = out[std::size_t(j)];
        auto comp = [&](int slot) {
            return pref * res.value.v[slot].real() + residue[slot].real();
        };
        o.price.value = comp(3 * j);
        o.delta = comp(3 * j + 1);
        o.gamma = comp(3 * j + 2);
        o.price.est_error = pref * res.error;
        o.price.nodes_used = res.nodes;
        o.price.truncation_omega = plan_.route == Route::Contour1D ? res.truncation : inner.max_w;
        o.price.truncation_eta = truncation_eta;
        o.price.contour = k;
        o.price.route = plan_.route;
        o.price.imag_residue = asym_ratio * std::abs(o.price.value);
        o.price.converged = res.converged;
    }
    const double v0 = out[0].price.value;
    if (out[0].price.imag_residue > std::max(quad_.abs_tol, quad_.rel_tol * std::abs(v0)) &&
        asym_ratio > 1e-9)
        throw Error("imaginary residue " + std::to_string(out[0].price.imag_residue) +
                    " exceeds tolerance: conjugate symmetry of the integrand is broken");
    return out;
}

namespace {

Sensitivities checked(const ContourPricer& p) {
    auto r = p.run();
    if (!r.price.converged)
        throw ConvergenceError("contour integral did not reach tolerance within max_refinements",
                               r.price.value, r.price.est_error);
    return r;
}

} // namespace

PriceResult price(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
                  const Contour& contour, const QuadConfig& q) {
    return checked(ContourPricer(m, r, c, s, q, contour)).price;
}

PriceResult price(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
                  const QuadConfig& q) {
    return checked(ContourPricer(m, r, c, s, q)).price;
}

double delta(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
             const Contour& contour, const QuadConfig& q) {
    return checked(ContourPricer(m, r, c, s, q, contour)).delta;
}

double gamma(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
             const Contour& contour, const QuadConfig& q) {
    return checked(ContourPricer(m, r, c, s, q, contour)).gamma;
}

Sensitivities greeks(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
                     const QuadConfig& q, std::optional<Contour> contour) {
    return checked(ContourPricer(m, r, c, s, q, contour));
}

} // namespace qv
