#pragma once

#include <string>
#include <variant>

#include "qv/core.hpp"

namespace qv {

struct TvoCall {
    double target_vol, strike;
};
struct TvoPut {
    double target_vol, strike;
};
// pays 1{S_T >= K1} 1{I_T/T >= K2}; K2 is an annualized variance
struct DoubleDigitalCall {
    double asset_strike, variance_strike;
};
// (S_T - K)^+ while realized vol sqrt(I_T/T) sits in [vol_lo, vol_hi]
struct VolCappedCall {
    double strike, vol_lo, vol_hi;
};
// (S_T - N sqrt(I_T/T))^+
struct VolStruckCall {
    double notional;
};
struct VanillaCall {
    double strike;
};
struct VanillaPut {
    double strike;
};
// 1{S_T >= K}; used for the double-digital dominance bound
struct DigitalCall {
    double strike;
};

using Payoff = std::variant<TvoCall, TvoPut, DoubleDigitalCall, VolCappedCall, VolStruckCall,
                            VanillaCall, VanillaPut, DigitalCall>;

struct ContractSpec {
    Payoff payoff;
    double maturity;

    template <class T> const T* get() const noexcept { return std::get_if<T>(&payoff); }
};

// throws InvalidArgument on bad fields
void validate(const ContractSpec& c);

std::string contract_name(const ContractSpec& c);

// true when the payoff depends on I_T (needs the eta integral)
bool depends_on_qv(const ContractSpec& c);

// true for payoffs whose pole set in omega is {0, i} (call/put kernels)
bool is_call_like(const ContractSpec& c);

double evaluate(const ContractSpec& c, double terminal_spot, double terminal_qv);

// holomorphy strip of the payoff transform
Strip strip(const ContractSpec& c);

// Closed-form transform  int int exp(i w x + i e y) F(e^x, y) dx dy.
// Throws StripViolation outside strip(c). For payoffs that ignore I_T the
// eta argument is unused and this is the 1D transform in omega.
cplx payoff_transform(const ContractSpec& c, cplx omega, cplx eta);

// same, without the strip check (hot path inside the pricer)
cplx payoff_transform_unchecked(const ContractSpec& c, cplx omega, cplx eta);

} // namespace qv
