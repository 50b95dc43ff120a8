#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qv/core.hpp"
#include "qv/models.hpp"
#include "qv/payoffs.hpp"

namespace qv {

struct QuadConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double max_halfwidth = 200.0;
    int initial_panels = 64;
    int max_refinements = 12;
};

void validate(const QuadConfig& q);

enum class Route {
    Contour2D,  // double integral over the (omega, eta) multi-line
    Contour1D,  // payoff ignores I_T: single omega line with eta = 0
    Laplace     // TVO via 1/sqrt(I) = (2/sqrt(pi)) int exp(-mu^2 I) dmu
};

const char* route_name(Route r);

enum class Exec { Parallel, Serial };

struct PriceResult {
    double value = 0.0;
    double est_error = 0.0;
    long nodes_used = 0;
    double truncation_omega = 0.0;
    double truncation_eta = 0.0;
    Contour contour;
    Route route = Route::Contour2D;
    double imag_residue = 0.0;
    bool converged = true;
};

struct Sensitivities {
    PriceResult price;
    double delta = 0.0;
    double gamma = 0.0;
};

struct RoutePlan {
    Route route;
    Contour contour;
};

// Default contour: midpoint of a bounded omega strip, otherwise strip edge
// +/- 0.5; k2 = 0.5. Under GARCH the contour must also satisfy
// k2 < (k1 - k1^2)/2. Throws EmptyStripError when no line exists and
// StripViolation for an override outside the strip.
Contour choose_contour(const ContractSpec& c, const ModelSpec& m, double tau,
                       std::optional<Contour> override_contour = std::nullopt);

// Like choose_contour but falls back to the Laplace route for TVOs whose
// 2D strip is empty. A TVO override with 0 < k1 < 1 and k2 = 0 selects the
// Laplace route directly.
RoutePlan plan_route(const ContractSpec& c, const ModelSpec& m, double tau,
                     std::optional<Contour> override_contour = std::nullopt);

// One adaptive pass. Node placement is driven by the price integrand at
// spots[0]; every spot in the list is evaluated on the same nodes, which
// keeps finite differences across spots free of quadrature noise.
// At most 3 spots.
class ContourPricer {
public:
    ContourPricer(ModelSpec m, RatesSpec r, ContractSpec c, MarketState s, QuadConfig q = {},
                  std::optional<Contour> contour = std::nullopt, Exec exec = Exec::Parallel);

    std::vector<Sensitivities> run(const std::vector<double>& spots) const;
    Sensitivities run() const { return run({state_.spot}).front(); }

    const RoutePlan& plan() const noexcept { return plan_; }
    double tau() const noexcept { return tau_; }

private:
    ModelSpec model_;
    RatesSpec rates_;
    ContractSpec contract_;
    MarketState state_;
    QuadConfig quad_;
    Exec exec_;
    double tau_;
    RoutePlan plan_;
};

// Throws ConvergenceError (carrying the best estimate) when the adaptive
// controller runs out of refinements.
PriceResult price(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c,
                  const MarketState& s, const Contour& contour, const QuadConfig& q = {});
PriceResult price(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c,
                  const MarketState& s, const QuadConfig& q = {});
double delta(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
             const Contour& contour, const QuadConfig& q = {});
double gamma(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c, const MarketState& s,
             const Contour& contour, const QuadConfig& q = {});
Sensitivities greeks(const ModelSpec& m, const RatesSpec& r, const ContractSpec& c,
                     const MarketState& s, const QuadConfig& q = {},
                     std::optional<Contour> contour = std::nullopt);

} // namespace qv
