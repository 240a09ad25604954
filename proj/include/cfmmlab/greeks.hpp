#pragma once

#include <map>
#include <string>

#include "cfmmlab/engine.hpp"

namespace cfmm {

struct Estimate {
    double value = 0.0;
    double stderr_value = 0.0;
};

// Normalized gamma p^2 V''(p) / V(p) for V(p) = 2 sqrt(k p): exactly -1/4.
double analytic_gamma_constant_product();

// Monte Carlo gamma from an arbs-only, fee-free configuration: regress per-trial
// hedged PnL on the accumulated squared relative repricing moves. Throws when
// the configuration produces no identifying variation.
Estimate estimate_gamma(const SimConfig& config);

// LVR = variance/8 * pool_value * dt.
double lvr(double variance_per_day, double pool_value, double dt);

struct PnLDecomposition {
    double fee_term = 0.0;      // bps/day
    double gamma_term = 0.0;    // bps/day
    double higher_order = 0.0;  // bps/day (total minus the first two)
    double total = 0.0;         // bps/day
};

// E(PnL) = fee income + 0.5 * gamma * E[squared relative move] + higher order.
PnLDecomposition pnl_decomposition(const SimConfig& config);

enum class SensitivityParam { Fee, ArbEdge, Nt2Rate, Nt2Size };

// Central finite difference of mean PnL (bps/day) with common random numbers
// on both legs. Fee and ArbEdge bumps are absolute (bps); Nt2Rate and Nt2Size
// bumps are relative fractions. The returned derivative is per 1bp or per 1%.
Estimate sensitivity(const SimConfig& config, SensitivityParam param, double bump);

// Finite difference of hedged PnL (bps/day) with respect to a relative bump of
// the initial price level; zero by scale invariance.
Estimate delta_check(const SimConfig& config, double bump = 0.01);

struct SensitivityEntry {
    double value = 0.0;
    double stderr_value = 0.0;
    double bump = 0.0;
    std::string units;
};

struct GreeksReport {
    Estimate delta;
    Estimate gamma;
    double theta_analogue_bps_per_day = 0.0;  // fee income rate
    std::map<std::string, SensitivityEntry> sensitivities;
};

GreeksReport greeks_report(const SimConfig& config);

}  // namespace cfmm
