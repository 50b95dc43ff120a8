#pragma once

#include <memory>
#include <string>

#include "qv/core.hpp"

namespace qv {

struct TransformQuery {
    cplx omega;
    cplx eta;
    double inst_variance;
    double tau;
};

// Heston exponent pieces: H = exp(C + v D).
struct HestonCD {
    cplx C;
    cplx D;
};

HestonCD heston_cd(cplx omega, cplx eta, double tau, const HestonParams& m);

// H(omega, eta, v, tau) = E[exp(-i omega Y - i eta dI)] where
// Y = log(S_T/S_t) - (r-d) tau and dI = I_T - I_t.
cplx heston_transform(const TransformQuery& q, const HestonParams& m);
cplx three_halves_transform(const TransformQuery& q, const ThreeHalvesParams& m);
cplx garch_transform(const TransformQuery& q, const GarchParams& m);

// dispatch on the model tag
cplx fundamental_transform(const TransformQuery& q, const ModelSpec& m);

bool is_regular(const TransformQuery& q, const ModelSpec& m);

// Axis-aligned bounds of the model's holomorphy region. GARCH adds a
// non-rectangular condition checked by contour_admissible.
Strip model_strip(const ModelSpec& m);
bool contour_admissible(const ModelSpec& m, const Contour& c);

namespace garch {

// Evaluator for fixed (theta, epsilon, tau). Holds lazily built tables of
//   G_sigma(s) = int_0^inf h(z) exp(-z sigma - i z s) dz
// so that the z-integral against K_{iz}(d) becomes one s-integral.
class Kernel {
public:
    Kernel(const GarchParams& m, double tau);
    ~Kernel();
    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    struct Result {
        cplx value;
        double error;  // absolute, includes a rounding bound
    };
    // u = omega^2 - i omega + 2 i eta
    Result eval_u(cplx u, double v) const;

    double beta() const noexcept { return beta_; }
    double S() const noexcept { return S_; }

private:
    struct Bin;
    const Bin& bin(int k) const;
    double beta_, S_;
    GarchParams m_;
    std::unique_ptr<Bin[]> bins_;
};

// process-wide cache of kernels keyed by (theta, epsilon, tau)
std::shared_ptr<const Kernel> kernel_for(const GarchParams& m, double tau);

// Reference path: z-integral with bessel_k at every node. Slow; used to
// cross-check the table route.
cplx transform_direct(const TransformQuery& q, const GarchParams& m);

} // namespace garch

enum class BoundaryMethod { ClosedForm, NumericScaleFunction };

struct BoundaryReport {
    bool zero_attainable = false;
    bool infinity_attainable = false;
    BoundaryMethod method = BoundaryMethod::ClosedForm;
    std::string detail;
};

struct BoundaryClassification {
    BoundaryReport closed_form;
    BoundaryReport numeric;
    bool agree() const {
        return closed_form.zero_attainable == numeric.zero_attainable &&
               closed_form.infinity_attainable == numeric.infinity_attainable;
    }
};

// Works on raw parameters, including ones validate_model rejects.
BoundaryReport classify_boundaries_closed_form(const ModelParams& m);
BoundaryReport classify_boundaries_numeric(const ModelParams& m);

// Both methods; throws qv::Error when they disagree.
BoundaryReport classify_boundaries(const ModelParams& m);

} // namespace qv
