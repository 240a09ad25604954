#include "cfmmlab/amm_pool.hpp"

#include <cmath>

namespace cfmm {

double pool_implied_price(const PoolState& state) {
    state.validate();
    return state.y / state.x;
}

PriceBand no_trade_band(const PoolState& state, const FeeParams& fees) {
    const double p_hat = pool_implied_price(state);
    return {fees.gamma * p_hat, p_hat / fees.gamma};
}

Fill optimal_trade(const PoolState& state, double p_tilde, const FeeParams& fees) {
    if (!(p_tilde > 0.0)) throw std::invalid_argument("private price must be positive");
    fees.validate();
    const double x = state.x;
    const double y = state.y;
    const double g = fees.gamma;
    const PriceBand band = no_trade_band(state, fees);
    if (band.contains(p_tilde)) return {};

    Fill fill;
    if (p_tilde < band.lo) {
        // Agent sells risky (u_x <= 0), receives numeraire.
        fill.u_y = y - std::sqrt(p_tilde * x * y / g);
        fill.u_x = x / g - std::sqrt(y * x / (g * p_tilde));
    } else {
        // Agent buys risky (u_y <= 0), pays numeraire.
        fill.u_y = y / g - std::sqrt(p_tilde * x * y / g);
        fill.u_x = x - std::sqrt(y * x / (g * p_tilde));
    }
    return fill;
}

PoolState apply_trade(const PoolState& state, const Fill& fill) {
    PoolState next{state.x - fill.u_x, state.y - fill.u_y};
    if (!(next.x > 0.0) || !(next.y > 0.0))
        throw std::domain_error("infeasible trade: reserves must stay positive");
    return next;
}

double pool_value(const PoolState& state, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("price must be positive");
    return state.x * p + state.y;
}

double impermanent_loss(const PoolState& initial, const PoolState& current, double p) {
    return pool_value(initial, p) - pool_value(current, p);
}

double invert_trade(const PoolState& pre_state, const Fill& fill, const FeeParams& fees) {
    if (fill.is_zero()) throw std::invalid_argument("zero fill has no unique inversion");
    pre_state.validate();
    fees.validate();
    const double x = pre_state.x;
    const double y = pre_state.y;
    const double g = fees.gamma;
    if (fill.u_x <= 0.0) {
        // Sell-risky branch: x - g u_x = sqrt(g x y / p_tilde).
        const double r = x - g * fill.u_x;
        return g * x * y / (r * r);
    }
    // Buy-risky branch: x - u_x = sqrt(x y / (g p_tilde)).
    const double r = x - fill.u_x;
    return x * y / (g * r * r);
}

}  // namespace cfmm
