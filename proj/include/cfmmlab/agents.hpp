#pragma once

#include <vector>

#include "cfmmlab/amm_pool.hpp"
#include "cfmmlab/rng.hpp"

namespace cfmm {

struct ArbParams {
    double edge_bps = 0.0;  // minimum profit, as bps of trade notional

    void validate() const {
        if (!(edge_bps >= 0.0)) throw std::invalid_argument("edge_bps must be >= 0");
    }
};

struct NT1Params {
    double lambda = 0.0;       // arrivals per day
    double sigma_delta = 0.0;  // stddev of the idiosyncratic offset delta

    void validate() const {
        if (!(lambda >= 0.0)) throw std::invalid_argument("nt1 lambda must be >= 0");
        if (!(sigma_delta >= 0.0)) throw std::invalid_argument("sigma_delta must be >= 0");
    }
};

struct NT2Params {
    double rate = 0.0;        // arrivals per day
    double size_scale = 1.0;  // mean trade notional in numeraire units

    void validate() const {
        if (!(rate >= 0.0)) throw std::invalid_argument("nt2 rate must be >= 0");
        if (!(size_scale > 0.0)) throw std::invalid_argument("nt2 size_scale must be > 0");
    }
};

// Numeraire notional of the fee-bearing (agent-paid) leg, marked at p.
double fill_notional(const Fill& fill, double p);

// Optimal trade against the reference price, gated by a profit threshold:
// trades only when p * u_x + u_y >= edge_bps * 1e-4 * notional.
Fill arb_fill(const PoolState& state, double p, const FeeParams& fees, const ArbParams& arb);

// p * (1 + delta) with 1 + delta lognormal and E[delta] = 0:
// log(1 + delta) ~ N(m, s^2), s chosen so stddev(delta) = sigma_delta.
double nt1_tilde_price(double p, double sigma_delta, Rng& rng);

Fill nt1_fill(const PoolState& state, double p, const NT1Params& params, const FeeParams& fees,
              Rng& rng);

// Fair-coin direction, Exponential(mean = size_scale) numeraire notional routed
// through the fee-adjusted curve. Sizes are capped at 25% of the paid-into
// reserve to keep the trade feasible.
Fill nt2_fill(const PoolState& state, const NT2Params& params, const FeeParams& fees, Rng& rng);

// Poisson process event times on [0, horizon], strictly increasing.
std::vector<double> sample_arrivals(double rate, double horizon, Rng& rng);

}  // namespace cfmm
