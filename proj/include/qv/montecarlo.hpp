#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qv/core.hpp"
#include "qv/payoffs.hpp"

namespace qv::mc {

enum class FloorPolicy { FullTruncation, Reflection };

struct McConfig {
    std::int64_t n_paths = 1'000'000;
    int n_steps = 0;  // 0: 250 per year of horizon
    std::uint64_t seed = 20240607;
    FloorPolicy floor = FloorPolicy::FullTruncation;
};

int resolved_steps(const McConfig& cfg, double tau);

// Terminal pairs (S_T, I_T) for one horizon.
struct SampleSet {
    std::vector<double> spot;
    std::vector<double> qv;
    MarketState start;
    RatesSpec rates;
    double tau = 0.0;
    std::size_t size() const { return spot.size(); }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
};

// Log-Euler for S; Euler for v (Heston) or for 1/v (3/2), exact lognormal
// steps for GARCH variance; trapezoid for I on the floored v.
// Deterministic in (seed, path) regardless of thread count.
SampleSet simulate_terminals(const ModelSpec& m, const RatesSpec& r, const MarketState& s,
                             double horizon, const McConfig& cfg);
// single-threaded reference; bit-identical to simulate_terminals
SampleSet simulate_terminals_serial(const ModelSpec& m, const RatesSpec& r, const MarketState& s,
                                    double horizon, const McConfig& cfg);

// Shift the accrued variance of an existing sample set (I_T -> I_T + delta).
// Lets one simulation serve several seasoned starting points.
SampleSet with_accrued_offset(const SampleSet& s, double delta);

// Discounted payoff mean. Throws qv::Error naming the number of paths on
// which the payoff is undefined (e.g. I_T = 0 for a TVO).
McEstimate mc_price(const ContractSpec& c, const SampleSet& samples, double r, double tau);
McEstimate mc_price(const ContractSpec& c, const SampleSet& samples);

struct CfEstimate {
    cplx mean;
    double se_re = 0.0;
    double se_im = 0.0;
    double top_weight_share = 0.0;  // share of sum |w| carried by the top 1% of paths
};

class VarianceExplosion : public Error {
public:
    using Error::Error;
};

// Sample mean of exp(-i w Y - i e dI), Y = log(S_T/S_t) - (r-d) tau,
// dI = I_T - I_t; the sign convention matches fundamental_transform.
// Throws VarianceExplosion when the top 1% of weights carries > 50%.
CfEstimate empirical_cf(const SampleSet& samples, cplx omega, cplx eta);

// pairwise summation, fixed split order
double pairwise_sum(const double* x, std::size_t n);

// text dump with a '#' header (model, config, seed)
void write_samples(const std::string& path, const SampleSet& s, const ModelSpec& m,
                   const McConfig& cfg);

} // namespace qv::mc
