#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "qv/models.hpp"

namespace qv {

namespace {

using LogDensity = std::function<double(double)>;

double log_add(double a, double b) {
    if (a == -inf) return b;
    if (b == -inf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log of int_{x0}^{x1} exp(f) dx for f linear between the end values;
// exact for power laws, and unbiased where f moves by many units per step
double log_step(double h, double f0, double f1) {
    if (f0 == -inf && f1 == -inf) return -inf;
    const double hi = std::max(f0, f1), d = std::abs(f1 - f0);
    if (d < 1e-8) return std::log(h) + hi;
    // h (e^hi - e^lo) / d = h e^hi (1 - e^-d) / d
    return std::log(h) + hi + std::log(-std::expm1(-d)) - std::log(d);
}

// Feller test for one end. Accumulates, decade by decade in log y,
//   int s'(y) | int_1^y m(z) dz | dy
// towards 0 (dir = -1) or +infinity (dir = +1), in log space.
// Returns per-decade log increments. Stops early once the log densities
// are so large that their sum has no digits left.
std::vector<double> decade_increments(const LogDensity& log_sp, const LogDensity& log_m, int dir,
                                      int decades = 40, int per_decade = 400) {
    const double L = std::log(10.0);
    const double hx = L / per_decade;
    double logM = -inf;  // log |int_1^y m|
    std::vector<double> inc;
    double prev_m = log_m(1.0);  // log(m(e^x) e^x) at x = 0
    double prev_out = -inf;
    for (int k = 0; k < decades; ++k) {
        double acc = -inf;
        bool lost = false;
        for (int i = 1; i <= per_decade; ++i) {
            const double x = dir * (k * per_decade + i) * hx;
            const double y = std::exp(x);
            const double ls = log_sp(y);
            const double lm = log_m(y) + x;
            if (std::abs(ls) > 1e9 || std::abs(lm) > 1e9) {
                lost = true;
                break;
            }
            logM = log_add(logM, log_step(hx, prev_m, lm));
            prev_m = lm;
            const double lo = ls + logM + x;
            acc = log_add(acc, log_step(hx, prev_out, lo));
            prev_out = lo;
        }
        if (lost) break;
        inc.push_back(acc);
        if (!(acc < 700.0)) break;  // already astronomically large
    }
    return inc;
}

// convergent iff the tail increments shrink geometrically
bool converges(const std::vector<double>& inc, std::string& why) {
    std::ostringstream os;
    if (inc.empty() || !(inc.back() < 700.0) || std::isnan(inc.back())) {
        os << "integral exceeds e^700";
        why = os.str();
        return false;
    }
    const std::size_t n = inc.size();
    if (inc[n - 1] == -inf) {
        why = "increments vanish";
        return true;
    }
    if (n < 3) {
        why = "too few resolvable decades";
        return false;
    }
    // average log-ratio over the last 5 decades
    const std::size_t w = std::min<std::size_t>(5, n - 1);
    const double lr = (inc[n - 1] - inc[n - 1 - w]) / double(w);
    const double r = std::exp(lr);
    os << "tail ratio per decade " << r;
    why = os.str();
    return r < 0.95;
}

struct Densities {
    LogDensity log_sp, log_m;
};

Densities densities(const ModelParams& p) {
    return std::visit(
        [](const auto& m) -> Densities {
            using T = std::decay_t<decltype(m)>;
            const double e2 = m.epsilon * m.epsilon;
            if constexpr (std::is_same_v<T, HestonParams>) {
                const double a = 2 * m.kappa * m.theta / e2, k = 2 * m.kappa / e2;
                return {[=](double u) { return -a * std::log(u) + k * (u - 1); },
                        [=](double z) { return std::log(2 / e2) + (a - 1) * std::log(z) - k * (z - 1); }};
            } else if constexpr (std::is_same_v<T, ThreeHalvesParams>) {
                const double a = 2 * m.kappa / e2, c = 2 * m.kappa * m.theta / e2;
                return {[=](double u) { return a * std::log(u) + c * (1 / u - 1); },
                        [=](double z) {
                            return std::log(2 / e2) + (-3 - a) * std::log(z) - c * (1 / z - 1);
                        }};
            } else {
                const double c = 2 * m.theta / e2;
                return {[=](double u) { return -c * std::log(u); },
                        [=](double z) { return std::log(2 / e2) + (c - 2) * std::log(z); }};
            }
        },
        p);
}

} // namespace

BoundaryReport classify_boundaries_closed_form(const ModelParams& p) {
    BoundaryReport r;
    r.method = BoundaryMethod::ClosedForm;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            const double e2 = m.epsilon * m.epsilon;
            if constexpr (std::is_same_v<T, HestonParams>) {
                r.zero_attainable = 2 * m.kappa * m.theta < e2;
                r.detail = "Heston: 0 attainable iff 2 kappa theta < epsilon^2; infinity never";
            } else if constexpr (std::is_same_v<T, ThreeHalvesParams>) {
                r.infinity_attainable = 2 * m.kappa < -e2;
                r.detail = "3/2: 0 never; infinity attainable iff 2 kappa < -epsilon^2";
            } else {
                r.detail = "GARCH: neither boundary attainable";
            }
        },
        p);
    return r;
}

BoundaryReport classify_boundaries_numeric(const ModelParams& p) {
    auto d = densities(p);
    BoundaryReport r;
    r.method = BoundaryMethod::NumericScaleFunction;
    std::string w0, winf;
    r.zero_attainable = converges(decade_increments(d.log_sp, d.log_m, -1), w0);
    r.infinity_attainable = converges(decade_increments(d.log_sp, d.log_m, +1), winf);
    r.detail = "p(0): " + w0 + "; p(inf): " + winf;
    return r;
}

BoundaryReport classify_boundaries(const ModelParams& p) {
    auto cf = classify_boundaries_closed_form(p);
    auto nm = classify_boundaries_numeric(p);
    BoundaryClassification both{cf, nm};
    if (!both.agree())
        throw Error("boundary classification: closed form (" + cf.detail +
                    ") disagrees with the scale-function integrals (" + nm.detail + ")");
    cf.detail += " [numeric check: " + nm.detail + "]";
    return cf;
}

} // namespace qv
