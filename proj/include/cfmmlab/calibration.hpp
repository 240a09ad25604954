#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cfmmlab/amm_pool.hpp"
#include "cfmmlab/engine.hpp"
#include "cfmmlab/price_process.hpp"

namespace cfmm {

// Uniformly sampled log returns.
struct ReturnSeries {
    double dt = 0.0;  // days
    std::vector<double> returns;

    void validate() const;
};

// An observed pool trade with pre-trade reserves.
struct TradeRecord {
    double timestamp = 0.0;  // days
    double u_x = 0.0;
    double u_y = 0.0;
    double x = 0.0;  // pre-trade reserves
    double y = 0.0;
};

struct MleOptions {
    int n_max = 3;       // maximum jumps per interval in the mixture
    int starts = 8;      // multi-start count
    int max_iter = 400;  // Nelder-Mead iterations per start
    double tol = 1e-10;  // simplex spread tolerance on the objective
    std::uint64_t seed = 7;
};

struct MleFit {
    MJDParams params;
    double loglik = 0.0;
    bool converged = false;
    int evaluations = 0;
};

struct CalibrationResult {
    MJDParams mjd;
    NT1Params nt1;
    NT2Params nt2;
    double loglik = 0.0;
    bool mjd_converged = false;
    double observed_trades_per_day = 0.0;
    std::size_t delta_samples = 0;
    std::size_t skipped_trades = 0;
};

// Mixture log-likelihood: sum_t log sum_{k=0..n_max}
// Poisson(k; lambda dt) * NormalPdf(r_t; mu_D dt + k mu_J, sigma_D^2 dt + k sigma_J^2).
double mjd_log_likelihood(const ReturnSeries& series, const MJDParams& params, int n_max);

// MLE over (sigma_D, lambda_J, sigma_J) with mu_D = mu_J = 0, multi-start
// Nelder-Mead in log-parameter space.
MleFit fit_mjd(const ReturnSeries& series, const MleOptions& options = {});

// For each trade, interpolate the reference price (log-linear), invert the
// trade to its implied private price, return delta = p_tilde / p - 1. Trades
// outside the reference coverage are skipped and counted.
std::vector<double> extract_delta_samples(const std::vector<TradeRecord>& trades,
                                          const PricePath& refs, const FeeParams& fees,
                                          std::size_t* skipped = nullptr);

// Bisect the arrival rate lambda until simulated_rate(lambda) matches
// observed_rate within rel_tol. simulated_rate must be nondecreasing.
double calibrate_arrival_rate(double observed_rate,
                              const std::function<double(double)>& simulated_rate,
                              double lambda_lo, double lambda_hi, double rel_tol = 0.02);

// Nonzero NT1 trade rate (per day) simulated at the given arrival rate, for use
// as the bisection target above.
double simulated_nt1_trade_rate(const SimConfig& base, double lambda);

// size_scale = mean absolute numeraire notional of non-arb trades; rate =
// trades per day of observation span. Trades with |delta| below
// arb_delta_threshold are attributed to arbitrage and excluded from the size
// fit.
NT2Params fit_nt2(const std::vector<TradeRecord>& trades, const PricePath& refs,
                  const FeeParams& fees, double arb_delta_threshold = 1e-4);

}  // namespace cfmm
