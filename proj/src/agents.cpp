#include "cfmmlab/agents.hpp"

#include <algorithm>
#include <cmath>

namespace cfmm {

double fill_notional(const Fill& fill, double p) {
    if (fill.is_zero()) return 0.0;
    return fill.u_y < 0.0 ? -fill.u_y : -fill.u_x * p;
}

Fill arb_fill(const PoolState& state, double p, const FeeParams& fees, const ArbParams& arb) {
    const Fill fill = optimal_trade(state, p, fees);
    if (fill.is_zero() || arb.edge_bps == 0.0) return fill;
    const double profit = p * fill.u_x + fill.u_y;
    if (profit >= arb.edge_bps * 1e-4 * fill_notional(fill, p)) return fill;
    return {};
}

double nt1_tilde_price(double p, double sigma_delta, Rng& rng) {
    if (sigma_delta == 0.0) return p;
    // 1 + delta lognormal with E[delta] = 0, stddev(delta) = sigma_delta.
    const double s2 = std::log1p(sigma_delta * sigma_delta);
    const double s = std::sqrt(s2);
    return p * std::exp(-0.5 * s2 + s * normal01(rng));
}

Fill nt1_fill(const PoolState& state, double p, const NT1Params& params, const FeeParams& fees,
              Rng& rng) {
    return optimal_trade(state, nt1_tilde_price(p, params.sigma_delta, rng), fees);
}

Fill nt2_fill(const PoolState& state, const NT2Params& params, const FeeParams& fees, Rng& rng) {
    params.validate();
    const bool buy_risky = uniform01(rng) < 0.5;
    double notional = std::exponential_distribution<double>(1.0 / params.size_scale)(rng);
    notional = std::min(notional, 0.25 * state.y);
    if (notional <= 0.0) return {};

    const double g = fees.gamma;
    Fill fill;
    if (buy_risky) {
        // Pays notional in numeraire: (y - g u_y)(x - u_x) = x y with u_y = -n.
        fill.u_y = -notional;
        fill.u_x = state.x - state.x * state.y / (state.y + g * notional);
    } else {
        // Receives notional in numeraire: (y - u_y)(x - g u_x) = x y with u_y = +n.
        fill.u_y = notional;
        fill.u_x = -state.x * notional / (g * (state.y - notional));
    }
    return fill;
}

std::vector<double> sample_arrivals(double rate, double horizon, Rng& rng) {
    if (!(rate >= 0.0)) throw std::invalid_argument("arrival rate must be >= 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
    std::vector<double> times;
    if (rate == 0.0) return times;
    std::exponential_distribution<double> gap(rate);
    double t = gap(rng);
    while (t <= horizon) {
        times.push_back(t);
        t += gap(rng);
    }
    return times;
}

}  // namespace cfmm
