#pragma once

#include <string>
#include <vector>

#include "cfmmlab/calibration.hpp"
#include "cfmmlab/engine.hpp"
#include "cfmmlab/greeks.hpp"

namespace cfmm {

// Raised for malformed inputs and invalid configurations (CLI exit code 1).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV `timestamp,price`, UNIX seconds, strictly increasing, positive prices.
PricePath read_price_csv(const std::string& path);

// CSV `timestamp,u_x,u_y,reserve_x,reserve_y`; signs per the Fill convention.
std::vector<TradeRecord> read_trade_csv(const std::string& path);

// JSON run configuration mirroring SimConfig; collects every violation before
// rejecting.
struct RunConfig {
    SimConfig sim;
    bool equilibrium_bootstrap = false;
    // equilibrium subcommand settings
    EquilibriumConfig equilibrium;
    std::string config_hash;
};

RunConfig load_run_config(const std::string& path);

void write_batch_stats_json(const BatchStats& stats, const RunConfig& config,
                            const std::string& path);
void write_trials_csv(const std::vector<TrialResult>& results, const std::string& path);
void write_calibration_json(const CalibrationResult& result, const std::string& path);
void write_greeks_json(const GreeksReport& report, const RunConfig& config,
                       const std::string& path);
void write_equilibrium_samples_csv(const std::vector<double>& samples, const std::string& path);
void write_density_csv(const EquilibriumDensity& density, double z_max, std::size_t points,
                       const std::string& path);

}  // namespace cfmm
