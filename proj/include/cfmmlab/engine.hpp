#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfmmlab/agents.hpp"
#include "cfmmlab/amm_pool.hpp"
#include "cfmmlab/price_process.hpp"

namespace cfmm {

enum class AgentKind { Arb, NT1, NT2 };

struct SimConfig {
    double horizon_days = 1.0 / 24.0;           // one-hour trading runs
    int trials = 1000;
    double block_interval = 15.0 / 86400.0;     // one Ethereum block
    std::uint64_t seed = 1;
    MJDParams mjd;
    FeeParams fees;
    std::optional<ArbParams> arb;
    std::optional<NT1Params> nt1;
    std::optional<NT2Params> nt2;
    double initial_price = 1816.7237;
    double initial_pool_value = 2.847760e8;
    double initial_log_ratio = 0.0;             // log(p_hat / p) at t = 0
    // When nonempty, each trial bootstraps its initial log ratio from these.
    std::vector<double> equilibrium_samples;
    int threads = 1;

    void validate() const;
    // Pool with implied price initial_price * exp(log_ratio) and the configured
    // value marked at initial_price.
    PoolState initial_pool(double log_ratio) const;
};

struct TradeLogEntry {
    double time = 0.0;
    AgentKind kind = AgentKind::Arb;
    Fill fill;
    PoolState pre_state;
    double ref_price = 0.0;
};

struct TrialResult {
    double pnl = 0.0;              // sum over trades of V_{t+} - V_{t-}
    double volume = 0.0;           // numeraire notional of fee-bearing legs
    double fee_income = 0.0;       // (1 - gamma) * volume, accumulated per trade
    double sum_sq_rel_move = 0.0;  // sum of (p / p_hat_pre - 1)^2 over trades
    std::int64_t arb_trades = 0;
    std::int64_t noise_trades = 0;
    double final_log_ratio = 0.0;
};

struct BatchStats {
    double mean_pnl_bps_per_day = 0.0;
    double stderr_bps_per_day = 0.0;
    double mean_fee_bps_per_day = 0.0;
    double mean_volume = 0.0;           // per trial
    double arb_trades_per_day = 0.0;
    double noise_trades_per_day = 0.0;
    double mean_sum_sq_rel_move = 0.0;  // per trial
    int trials = 0;
    double horizon_days = 0.0;
    double initial_pool_value = 0.0;
};

TrialResult run_trial(const SimConfig& config, int trial_index);
TrialResult run_trial(const SimConfig& config, int trial_index, std::vector<TradeLogEntry>* log);

std::vector<TrialResult> run_trials(const SimConfig& config);
BatchStats summarize(const std::vector<TrialResult>& results, const SimConfig& config);
BatchStats run_batch(const SimConfig& config);

// Per-trade fee income: sum of (1 - gamma) * fee-leg notional.
double fee_income(const TrialResult& trial);

// Equilibrium distribution of z = log(p_hat / p) for arbs-only pools.
enum class ArbCadence { Instantaneous, Poisson };

struct EquilibriumDensity {
    double halfwidth = 0.0;  // flat on [-w, w]
    double decay = 0.0;      // exponential tail rate; 0 = hard cutoff
    double level = 0.0;      // density on the flat section

    double operator()(double z) const;
};

// Instantaneous arbs: uniform on [-w, w]. Poisson arbs at the given rate:
// flat on [-w, w] with exponential tails of rate sqrt(2 * rate) / sigma.
EquilibriumDensity analytic_equilibrium_density(ArbCadence cadence, double fee_halfwidth,
                                                double arb_rate_per_day = 0.0,
                                                double sigma_per_sqrt_day = 0.0);

struct EquilibriumConfig {
    ArbCadence cadence = ArbCadence::Instantaneous;
    double arb_rate_per_day = 5760.0;      // Poisson mode only
    double substep_days = 0.1 / 86400.0;   // price-evolution resolution
    double sample_interval_days = 30.0 / 86400.0;
    std::size_t samples = 100000;
    double burn_in_fraction = 0.1;
};

// Simulate an arbs-only pool and record z = log(p_hat / p) at fixed intervals
// after burn-in. Uses config.mjd / config.fees / config.seed.
std::vector<double> sample_equilibrium(const SimConfig& config, const EquilibriumConfig& eq);

// Uniform draw from an empirical sample set.
double bootstrap_equilibrium(const std::vector<double>& samples, Rng& rng);

// One long generating run of the full agent configuration, recording
// z = log(p_hat / p) at every block tick after the burn-in fraction. Feeds
// SimConfig::equilibrium_samples.
std::vector<double> generate_equilibrium_samples(const SimConfig& config, std::size_t n_samples,
                                                 double burn_in_fraction = 0.1);

}  // namespace cfmm
