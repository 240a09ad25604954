#pragma once

#include <stdexcept>

namespace cfmm {

// Constant-product pool reserves. x = risky asset, y = numeraire.
struct PoolState {
    double x = 0.0;
    double y = 0.0;

    void validate() const {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("pool reserves must be strictly positive");
    }
};

// gamma = fee retention factor; 0.997 for a 30bp fee. Fees enter the reserves.
struct FeeParams {
    double gamma = 0.997;

    void validate() const {
        if (!(gamma > 0.0) || !(gamma <= 1.0))
            throw std::invalid_argument("fee gamma must be in (0, 1]");
    }
    double fee() const { return 1.0 - gamma; }
};

// A signed trade. Positive legs are received by the agent (pool reserves
// decrease); the agent pays the nonpositive leg. (0, 0) means no trade.
struct Fill {
    double u_x = 0.0;
    double u_y = 0.0;

    bool is_zero() const { return u_x == 0.0 && u_y == 0.0; }
};

struct PriceBand {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double p) const { return p >= lo && p <= hi; }
};

// Pool-implied price: y / x.
double pool_implied_price(const PoolState& state);

// [gamma * y/x, y/(gamma * x)]; private values inside it produce no trade.
PriceBand no_trade_band(const PoolState& state, const FeeParams& fees);

// Closed-form maximizer of p_tilde * u_x + u_y over the fee-adjusted
// constant-product trade set. Zero fill when p_tilde is inside the band
// (boundary inclusive).
Fill optimal_trade(const PoolState& state, double p_tilde, const FeeParams& fees);

// Pool update (x - u_x, y - u_y). Throws if the fill exhausts a reserve.
PoolState apply_trade(const PoolState& state, const Fill& fill);

// V = x p + y.
double pool_value(const PoolState& state, double p);

// Value of holding the initial reserves minus value of the current pool, both
// marked at p.
double impermanent_loss(const PoolState& initial, const PoolState& current, double p);

// Unique private price p_tilde that would have produced this nonzero fill as an
// optimal trade against pre_state. The fill's signs select the branch.
double invert_trade(const PoolState& pre_state, const Fill& fill, const FeeParams& fees);

}  // namespace cfmm
