#pragma once

// Adaptive panel integration along one contour line, shared by the
// inner (omega) and outer (eta / mu) integrals.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace qv::detail {

using cplx = std::complex<double>;

constexpr int kMaxOut = 9;  // 3 spots x {price, delta, gamma}

struct Multi {
    std::array<cplx, kMaxOut> v{};
    Multi& operator+=(const Multi& o) {
        for (int i = 0; i < kMaxOut; ++i) v[i] += o.v[i];
        return *this;
    }
    Multi operator*(double w) const {
        Multi r;
        for (int i = 0; i < kMaxOut; ++i) r.v[i] = v[i] * w;
        return r;
    }
};

struct NodeOut {
    Multi v;
    double err = 0.0;  // error already present in the node value (inner integrals)
    long nodes = 1;
    bool ok = true;
};

// Evaluate all abscissae xs into out (same size). May run in parallel but
// must write out[i] from xs[i] only.
using Batch = std::function<void(const std::vector<double>& xs, std::vector<NodeOut>& out)>;

struct LineSpec {
    bool half = true;         // [0, W) instead of (-W, W)
    double w0 = 16.0;         // initial half-width
    int n0 = 64;              // panels over the initial window
    double max_w = 200.0;
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    int max_refinements = 12;
};

struct LineResult {
    Multi value;
    double error = 0.0;
    long nodes = 0;
    double truncation = 0.0;
    bool converged = true;
};

LineResult integrate_line(const Batch& batch, const LineSpec& spec);

} // namespace qv::detail
