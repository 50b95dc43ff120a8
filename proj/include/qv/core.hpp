#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "qv/errors.hpp"

namespace qv {

using cplx = std::complex<double>;

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double pi = 3.14159265358979323846;

struct MarketState {
    double spot = 100.0;
    double inst_variance = 0.04;
    double accrued_qv = 0.0;  // I_t
    double time = 0.0;
};

struct RatesSpec {
    double risk_free = 0.0;
    double dividend_yield = 0.0;
};

struct HestonParams {
    double kappa, theta, epsilon, rho;
};

struct ThreeHalvesParams {
    double kappa, theta, epsilon, rho;
};

// rho is fixed to zero for this model.
struct GarchParams {
    double theta, epsilon;
};

using ModelParams = std::variant<HestonParams, ThreeHalvesParams, GarchParams>;

struct Validation {
    bool ok = true;
    std::string condition;  // e.g. "NB"
    std::string reason;
};

// Total function: never throws.
Validation validate_model(const ModelParams& m);

// Validated model. Construction throws ModelRejected when the
// natural-boundary inequality fails.
class ModelSpec {
public:
    ModelSpec(const ModelParams& p);  // NOLINT implicit on purpose
    const ModelParams& params() const noexcept { return p_; }
    double rho() const noexcept;
    std::string name() const;

    template <class T> const T* get() const noexcept { return std::get_if<T>(&p_); }

private:
    ModelParams p_;
};

void validate(const MarketState& s);
void validate(const RatesSpec& r);

// Open interval, ends may be infinite.
struct Interval {
    double lo = -inf;
    double hi = inf;
    bool contains(double x) const noexcept { return x > lo && x < hi; }
    bool bounded() const noexcept { return lo > -inf && hi < inf; }
    bool operator==(const Interval&) const = default;
};

std::optional<Interval> intersect(const Interval& a, const Interval& b);

struct Strip {
    Interval im_omega;
    Interval im_eta;
    bool operator==(const Strip&) const = default;
    bool contains(double k1, double k2) const noexcept {
        return im_omega.contains(k1) && im_eta.contains(k2);
    }
};

inline Strip whole_plane() { return Strip{}; }

// Empty optional when no valid contour exists.
std::optional<Strip> intersect_strips(const Strip& a, const Strip& b);

struct Contour {
    double k1 = 0.0;
    double k2 = 0.0;
};

std::string to_string(const Strip& s);

} // namespace qv
