#include "line.hpp"

#include <algorithm>
#include <cmath>

#include "qv/quadrature.hpp"

namespace qv::detail {

namespace {

struct Panel {
    double a, b;
    Multi k;              // Kronrod sum
    double err = 0.0;     // |K - G| on the driving component
    double l1 = 0.0;      // sum w |f0|
    double inner = 0.0;   // accumulated node errors
    long nodes = 0;
    bool ok = true;
};

// evaluate a set of panels with one batch call
void evaluate(const Batch& batch, std::vector<Panel>& ps) {
    const auto& r = quad::gk15();
    std::vector<double> xs;
    xs.reserve(ps.size() * 15);
    for (const auto& p : ps) {
        const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
        for (int i = 0; i < 15; ++i) xs.push_back(c + h * r.x[i]);
    }
    std::vector<NodeOut> out(xs.size());
    batch(xs, out);
    for (std::size_t j = 0; j < ps.size(); ++j) {
        auto& p = ps[j];
        const double h = 0.5 * (p.b - p.a);
        Multi k;
        cplx g = 0.0;
        double l1 = 0.0, inner = 0.0;
        long nodes = 0;
        bool ok = true;
        for (int i = 0; i < 15; ++i) {
            const auto& o = out[j * 15 + i];
            k += o.v * (r.wk[i] * h);
            g += o.v.v[0] * (r.wg[i] * h);
            l1 += r.wk[i] * h * std::abs(o.v.v[0]);
            inner += r.wk[i] * h * o.err;
            nodes += o.nodes;
            ok = ok && o.ok;
        }
        p.k = k;
        p.err = std::abs(k.v[0] - g);
        p.l1 = l1;
        p.inner = inner;
        p.nodes = nodes;
        p.ok = ok;
    }
}

std::vector<Panel> split(double a, double b, int n) {
    std::vector<Panel> ps;
    ps.reserve(std::size_t(n));
    const double w = (b - a) / n;
    for (int i = 0; i < n; ++i) ps.push_back(Panel{a + i * w, (i + 1 == n) ? b : a + (i + 1) * w, {}});
    return ps;
}

Multi total(const std::vector<Panel>& ps) {
    Multi s;
    for (const auto& p : ps) s += p.k;  // fixed order
    return s;
}

} // namespace

LineResult integrate_line(const Batch& batch, const LineSpec& spec) {
    std::vector<Panel> panels;
    double W = std::min(spec.w0, spec.max_w);
    {
        auto ps = spec.half ? split(0.0, W, spec.n0) : split(-W, W, spec.n0);
        evaluate(batch, ps);
        panels = std::move(ps);
    }
    auto tol_for = [&](const Multi& m) { return std::max(spec.abs_tol, spec.rel_tol * std::abs(m.v[0])); };

    // truncation: grow geometrically until the tail beyond W is negligible.
    // The tail is extrapolated from the last two extensions (ratio q of
    // their L1 masses gives l1 q/(1-q)); with no history the last mass counts.
    double trunc_err = 0.0, prev_l1 = -1.0;
    bool trunc_ok = false;
    const int n_ext = std::max(4, spec.n0 / 2);
    auto tail = [&](double l1) {
        if (prev_l1 <= 0.0) return l1;
        const double q = l1 / prev_l1;
        return q < 0.5 ? l1 * q / (1.0 - q) : l1;
    };
    while (true) {
        if (W >= spec.max_w) break;
        const double W2 = std::min(2.0 * W, spec.max_w);
        std::vector<Panel> ext = split(W, W2, n_ext);
        if (!spec.half) {
            auto neg = split(-W2, -W, n_ext);
            ext.insert(ext.begin(), neg.begin(), neg.end());
        }
        evaluate(batch, ext);
        double l1 = 0.0;
        for (const auto& p : ext) l1 += p.l1;
        // keep panels ordered by position for a fixed summation order
        if (spec.half) {
            panels.insert(panels.end(), ext.begin(), ext.end());
        } else {
            std::vector<Panel> merged(ext.begin(), ext.begin() + n_ext);
            merged.insert(merged.end(), panels.begin(), panels.end());
            merged.insert(merged.end(), ext.begin() + n_ext, ext.end());
            panels = std::move(merged);
        }
        W = W2;
        trunc_err = tail(l1);
        prev_l1 = l1;
        if (trunc_err <= 0.1 * tol_for(total(panels))) {
            trunc_ok = true;
            break;
        }
    }
    // reached max_w: accept if the extrapolated tail is within tolerance
    if (!trunc_ok) trunc_ok = trunc_err <= tol_for(total(panels));

    // refinement by bisection
    bool ok = false;
    for (int round = 0; round <= spec.max_refinements; ++round) {
        const Multi tot = total(panels);
        double e = 0.0;
        for (const auto& p : panels) e += p.err;
        const double tol = tol_for(tot);
        if (e <= tol) {
            ok = true;
            break;
        }
        if (round == spec.max_refinements) break;
        const double share = tol / double(panels.size());
        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i < panels.size(); ++i)
            if (panels[i].err > share) bad.push_back(i);
        std::vector<Panel> fresh;
        for (auto i : bad) {
            const double m = 0.5 * (panels[i].a + panels[i].b);
            fresh.push_back(Panel{panels[i].a, m, {}});
            fresh.push_back(Panel{m, panels[i].b, {}});
        }
        evaluate(batch, fresh);
        std::vector<Panel> next;
        next.reserve(panels.size() + bad.size());
        std::size_t bi = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            if (bi < bad.size() && bad[bi] == i) {
                next.push_back(fresh[2 * bi]);
                next.push_back(fresh[2 * bi + 1]);
                ++bi;
            } else {
                next.push_back(panels[i]);
            }
        }
        panels = std::move(next);
    }

    LineResult res;
    res.value = total(panels);
    double e = 0.0, inner = 0.0;
    bool inner_ok = true;
    for (const auto& p : panels) {
        inner_ok = inner_ok && p.ok;
        e += p.err;
        inner += p.inner;
        res.nodes += p.nodes;
    }
    res.error = e + inner + trunc_err;
    res.truncation = W;
    res.converged = ok && trunc_ok && inner_ok;
    return res;
}

} // namespace qv::detail
