#include <algorithm>
#include <cmath>

#include "qv/montecarlo.hpp"

namespace qv::mc {

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

McEstimate summarize(std::vector<double>& vals) {
    const std::size_t n = vals.size();
    const double mean = pairwise_sum(vals.data(), n) / double(n);
    for (auto& v : vals) v = (v - mean) * (v - mean);
    const double var = n > 1 ? pairwise_sum(vals.data(), n) / double(n - 1) : 0.0;
    return McEstimate{mean, std::sqrt(var / double(n)), std::int64_t(n)};
}

} // namespace

McEstimate mc_price(const ContractSpec& c, const SampleSet& s, double r, double tau) {
    if (s.size() == 0) throw InvalidArgument("mc_price: empty sample set");
    const double disc = std::exp(-r * tau);
    std::vector<double> vals(s.size());
    std::int64_t bad = 0;
    const bool needs_qv = c.get<TvoCall>() || c.get<TvoPut>();
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (needs_qv && !(s.qv[i] > 0)) {
            ++bad;
            continue;
        }
        vals[i] = disc * evaluate(c, s.spot[i], s.qv[i]);
    }
    if (bad > 0)
        throw Error("mc_price: payoff undefined (I_T = 0) on " + std::to_string(bad) + " of " +
                    std::to_string(s.size()) + " paths");
    return summarize(vals);
}

McEstimate mc_price(const ContractSpec& c, const SampleSet& s) {
    return mc_price(c, s, s.rates.risk_free, s.tau);
}

CfEstimate empirical_cf(const SampleSet& s, cplx omega, cplx eta) {
    const std::size_t n = s.size();
    if (n == 0) throw InvalidArgument("empirical_cf: empty sample set");
    const cplx I(0, 1);
    const double drift = (s.rates.risk_free - s.rates.dividend_yield) * s.tau;
    const double logS0 = std::log(s.start.spot);
    std::vector<double> re(n), im(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double Y = std::log(s.spot[i]) - logS0 - drift;
        const double dI = s.qv[i] - s.start.accrued_qv;
        cplx z = std::exp(-I * omega * Y - I * eta * dI);
        re[i] = z.real();
        im[i] = z.imag();
        w[i] = std::abs(z);
    }
    CfEstimate out;
    const double total = pairwise_sum(w.data(), n);
    const std::size_t top = std::max<std::size_t>(1, n / 100);
    std::nth_element(w.begin(), w.begin() + std::ptrdiff_t(top), w.end(), std::greater<>());
    out.top_weight_share = total > 0 ? pairwise_sum(w.data(), top) / total : 0.0;
    auto mr = summarize(re), mi = summarize(im);
    out.mean = cplx(mr.mean, mi.mean);
    out.se_re = mr.std_error;
    out.se_im = mi.std_error;
    if (out.top_weight_share > 0.5 && n >= 100)
        throw VarianceExplosion("empirical_cf: top 1% of paths carry " +
                                std::to_string(100 * out.top_weight_share) +
                                "% of the weight; the estimator variance is not trustworthy");
    return out;
}

} // namespace qv::mc
