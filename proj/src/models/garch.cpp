#include <algorithm>
#include <array>
#include <cmath>
#include <list>
#include <mutex>
#include <string>
#include <tuple>

#include "qv/models.hpp"
#include "qv/quadrature.hpp"
#include "qv/specfun.hpp"

namespace qv::garch {

namespace {

constexpr int kBins = 32;          // |arg d| quantized in steps of pi/64
constexpr double kMargin = 0.01;   // kept between sigma + |arg d| and pi/2
constexpr double kSPanel = 0.05;
constexpr double kSMax = 30.0;
constexpr double kZPanel = 0.25;

double bin_sigma(int k) { return std::max(0.0, 0.5 * pi - (k + 1) * pi / 64.0 - kMargin); }

// log of h(z) = |Gamma((beta+iz)/2)|^2 z sinh(pi z) exp(-(beta^2+z^2) S/2) / (4 pi^2)
double log_h(double z, double beta, double S) {
    const double lsinh = (pi * z > 20.0) ? pi * z - std::log(2.0) + std::log1p(-std::exp(-2 * pi * z))
                                          : std::log(std::sinh(pi * z));
    return specfun::log_abs_gamma_sq(cplx(beta, z) / 2.0) + std::log(z) + lsinh -
           0.5 * (beta * beta + z * z) * S - std::log(4 * pi * pi);
}

// s nodes shared by every bin: GK15 panels of a fixed width over [-kSMax, kSMax]
struct SGrid {
    double panel;
    int panels;
    std::vector<double> s, w, ch, sh;
    explicit SGrid(double width) : panel(width), panels(int(2 * kSMax / width + 0.5)) {
        const auto& r = quad::gk15();
        for (int p = 0; p < panels; ++p) {
            const double a = -kSMax + p * panel, c = a + 0.5 * panel, h = 0.5 * panel;
            for (int i = 0; i < 15; ++i) {
                const double x = c + h * r.x[i];
                s.push_back(x);
                w.push_back(h * r.wk[i]);
                ch.push_back(std::cosh(x));
                sh.push_back(std::sinh(x));
            }
        }
    }
};

// coarse grid first; the fine one takes over for strongly oscillating d
const SGrid& sgrid(int which) {
    static const SGrid fine(kSPanel), coarse(4 * kSPanel);
    return which == 0 ? coarse : fine;
}

} // namespace

struct Kernel::Bin {
    std::once_flag once;
    double sigma = 0.0;
    double log_scale = 0.0;  // G values are stored divided by exp(log_scale)
    double mass = 0.0;       // int |h| e^{-z sigma} dz / exp(log_scale)
    std::array<std::vector<cplx>, 2> G;  // per s node, coarse and fine grids
};

Kernel::Kernel(const GarchParams& m, double tau)
    : beta_(2 * m.theta / (m.epsilon * m.epsilon) - 1), S_(m.epsilon * m.epsilon * tau / 4), m_(m),
      bins_(new Bin[kBins]) {
    if (!(tau > 0)) throw InvalidArgument("garch::Kernel needs tau > 0");
}

Kernel::~Kernel() = default;

const Kernel::Bin& Kernel::bin(int k) const {
    Bin& b = bins_[k];
    std::call_once(b.once, [&] {
        b.sigma = bin_sigma(k);
        // envelope scan for the z range
        double lmax = -inf, z = 0.125, zend = 0.0;
        double last = -inf;
        for (int i = 0; i < 400000; ++i, z += kZPanel) {
            double l = log_h(z, beta_, S_) - b.sigma * z;
            lmax = std::max(lmax, l);
            if (l < lmax - 37.0 && l < last) {
                zend = z;
                break;
            }
            last = l;
        }
        if (zend == 0.0) throw ConvergenceError("GARCH kernel: z envelope did not decay");
        const int nz = int(std::ceil(zend / kZPanel));
        const auto& r = quad::gk15();
        // weighted, scaled h at the z nodes, panel-major
        std::vector<double> hz(std::size_t(nz) * 15);
        double mass = 0.0;
        for (int p = 0; p < nz; ++p) {
            const double c = (p + 0.5) * kZPanel, h = 0.5 * kZPanel;
            for (int i = 0; i < 15; ++i) {
                const double zz = c + h * r.x[i];
                const double v = h * r.wk[i] * std::exp(log_h(zz, beta_, S_) - b.sigma * zz - lmax);
                hz[std::size_t(p) * 15 + i] = v;
                mass += v;
            }
        }
        b.log_scale = lmax;
        b.mass = mass;
        const cplx I(0, 1);
        const int jmax = beta_ < 0 ? int(std::floor(-beta_ / 2)) : -1;
        double fmax = 0.0;
        for (int which = 0; which < 2; ++which) {
            const auto& g = sgrid(which);
            auto& G = b.G[std::size_t(which)];
            G.resize(g.s.size());
            for (std::size_t j = 0; j < g.s.size(); ++j) {
                const double s = g.s[j];
                std::array<cplx, 15> base;
                for (int i = 0; i < 15; ++i) base[i] = std::exp(-I * s * (0.5 * kZPanel * (1.0 + r.x[i])));
                const cplx step = std::exp(-I * s * kZPanel);
                cplx phase = 1.0, acc = 0.0;
                for (int p = 0; p < nz; ++p) {
                    cplx part = 0.0;
                    const double* hp = &hz[std::size_t(p) * 15];
                    for (int i = 0; i < 15; ++i) part += hp[i] * base[i];
                    acc += phase * part;
                    phase *= step;
                }
                // beta < 0: the finite Bessel sum sum_j c_j K_{nu_j}(d) shares the
                // shifted contour, K_nu(d) = 1/2 int exp(-d cosh(s - i sigma)) cosh(nu (s - i sigma)) ds,
                // so its cosh weights are folded into the table
                cplx f = 0.0;
                for (int jj = 0; jj <= jmax; ++jj) {
                    const double order = -beta_ - 2.0 * jj;
                    if (order == 0.0) continue;  // coefficient vanishes
                    const double lc = std::log(order) - std::lgamma(jj + 1.0) - std::lgamma(1.0 - beta_ - jj) +
                                      (beta_ * jj + double(jj) * jj) * 2.0 * S_ - lmax;
                    f += std::exp(lc) * std::cosh(order * cplx(s, -b.sigma));
                }
                fmax = std::max(fmax, std::abs(f));
                G[j] = acc + f;
            }
        }
        b.mass += fmax;
    });
    return b;
}

Kernel::Result Kernel::eval_u(cplx u, double v) const {
    if (u == 0.0) return {1.0, 0.0};
    const double eps = m_.epsilon;
    const cplx d = 2.0 * std::sqrt(u * v) / eps;
    if (!(d.real() > 0)) throw InvalidArgument("GARCH transform needs Re(u) > 0 off the origin");
    const double phi = std::arg(d);
    const int k0 = std::min(kBins - 1, int(std::abs(phi) / (pi / 64.0)));
    const cplx lpref = (beta_ + 1) * std::log(2.0) - beta_ * std::log(d);
    const auto& r = quad::gk15();

    Result best{0.0, inf};
    // a bin a few steps below the largest admissible sigma is usually the
    // sweet spot between contour decay and cancellation in G
    const int cands[] = {k0 + 4, k0 + 8, k0, k0 + 16};
    for (int k : cands) {
        if (k >= kBins) continue;
        const Bin& b = bin(k);
        const double cs = std::cos(b.sigma), sn = std::sin(b.sigma);
        for (int which = 0; which < 2; ++which) {
            const auto& g = sgrid(which);
            const auto& G = b.G[std::size_t(which)];
            // exponent -d cosh(s - i sigma) at panel centres to find the live range
            double emax = -inf;
            std::vector<double> ec(std::size_t(g.panels));
            for (int p = 0; p < g.panels; ++p) {
                const std::size_t j = std::size_t(p) * 15 + 7;
                ec[std::size_t(p)] = -(d * cplx(g.ch[j] * cs, -g.sh[j] * sn)).real();
                emax = std::max(emax, ec[std::size_t(p)]);
            }
            cplx sum = 0.0;
            double disc = 0.0, l1 = 0.0;
            for (int p = 0; p < g.panels; ++p) {
                if (ec[std::size_t(p)] < emax - 45.0) continue;
                cplx pk = 0.0, pg = 0.0;
                for (int i = 0; i < 15; ++i) {
                    const std::size_t j = std::size_t(p) * 15 + i;
                    const cplx e = std::exp(-d * cplx(g.ch[j] * cs, -g.sh[j] * sn));
                    const cplx f = e * G[j];
                    pk += g.w[j] * f;
                    pg += (0.5 * g.panel) * r.wg[i] * f;
                    l1 += g.w[j] * std::abs(e);
                }
                sum += pk;
                disc += std::abs(pk - pg);
            }
            // value = pref * 1/2 e^L sum
            const double scale = std::abs(std::exp(lpref)) * 0.5 * std::exp(b.log_scale);
            const cplx val = std::exp(lpref) * 0.5 * sum * std::exp(b.log_scale);
            const double err = scale * (disc + 4e-15 * l1 * b.mass);
            if (std::isfinite(err) && err < best.error) best = {val, err};
            if (best.error <= 1e-9 * std::max(1.0, std::abs(best.value))) return best;
        }
    }
    if (!(best.error <= 1e-7 * std::max(1.0, std::abs(best.value))))
        throw ConvergenceError("GARCH transform: precision loss in the z-integral at u = (" +
                                   std::to_string(u.real()) + ", " + std::to_string(u.imag()) + ")",
                               best.value.real(),
                               best.error);
    return best;
}

std::shared_ptr<const Kernel> kernel_for(const GarchParams& m, double tau) {
    using Key = std::tuple<double, double, double>;
    static std::mutex mu;
    static std::list<std::pair<Key, std::shared_ptr<const Kernel>>> cache;
    const Key key{m.theta, m.epsilon, tau};
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = cache.begin(); it != cache.end(); ++it) {
        if (it->first == key) {
            cache.splice(cache.begin(), cache, it);
            return cache.front().second;
        }
    }
    auto k = std::make_shared<const Kernel>(m, tau);
    cache.emplace_front(key, k);
    if (cache.size() > 8) cache.pop_back();
    return k;
}

cplx transform_direct(const TransformQuery& q, const GarchParams& m) {
    if (q.tau == 0.0) return 1.0;
    const cplx I(0, 1);
    const cplx u = q.omega * q.omega - I * q.omega + 2.0 * I * q.eta;
    if (u == 0.0) return 1.0;
    const double eps2 = m.epsilon * m.epsilon;
    const double beta = 2 * m.theta / eps2 - 1, S = eps2 * q.tau / 4;
    const cplx d = 2.0 * std::sqrt(u * q.inst_variance) / m.epsilon;
    cplx finite = 0.0;
    if (beta < 0) {
        for (int j = 0; j <= int(std::floor(-beta / 2)); ++j) {
            const double order = -beta - 2.0 * j;
            if (order == 0.0) continue;
            finite += order / (std::tgamma(j + 1.0) * std::tgamma(1.0 - beta - j)) *
                      specfun::bessel_k(order, d) * std::exp((beta * j + double(j) * j) * 2.0 * S);
        }
    }
    // z range from the envelope h(z) K_{iz}(d) ~ h(z) e^{-pi z/2}
    double lmax = -inf, zend = 0.0, last = -inf;
    for (double z = 0.125; z < 1e5; z += 0.25) {
        const double l = log_h(z, beta, S) - 0.5 * pi * z;
        lmax = std::max(lmax, l);
        if (l < lmax - 37.0 && l < last) {
            zend = z;
            break;
        }
        last = l;
    }
    auto f = [&](double z) -> cplx {
        if (z <= 0.0) return 0.0;
        auto K = specfun::bessel_k_scaled(cplx(0, z), d, 1e-13);
        return K.mantissa * std::exp(log_h(z, beta, S) + K.log_scale);
    };
    // tolerance on H itself, not on the unscaled integral
    const cplx pref = std::exp((beta + 1) * std::log(2.0) - beta * std::log(d));
    const double tol = 1e-12 / std::abs(pref);
    auto res = quad::integrate<cplx>(f, 0.0, zend, tol, int(std::ceil(zend / 0.5)), 12);
    if (!res.converged)
        throw ConvergenceError("GARCH direct transform: z-integral did not converge",
                               std::abs(pref * (finite + res.value)), std::abs(pref) * res.error);
    return pref * (finite + res.value);
}

} // namespace qv::garch

namespace qv {

cplx garch_transform(const TransformQuery& q, const GarchParams& m) {
    if (q.tau == 0.0) return 1.0;
    const cplx I(0, 1);
    const cplx u = q.omega * q.omega - I * q.omega + 2.0 * I * q.eta;
    // H = E[exp(-u dI / 2)] and lognormal v has no positive exponential moments
    if (u.real() < 0.0)
        throw StripViolation("GARCH transform needs Re(omega^2 - i omega + 2 i eta) >= 0, got " +
                             std::to_string(u.real()));
    return garch::kernel_for(m, q.tau)->eval_u(u, q.inst_variance).value;
}

} // namespace qv
