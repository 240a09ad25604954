// cfmm-lab command line: calibrate agent/price models from CSV data, run
// Monte Carlo valuation batches, estimate greeks, and export equilibrium
// distributions.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfmmlab/cli_io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<double> horizon_days;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "Run configuration (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", flags.out_path, "Output path")->required();
    cmd->add_option("--seed", flags.seed, "Override the config seed");
    cmd->add_option("--trials", flags.trials, "Override the trial count");
    cmd->add_option("--horizon-days", flags.horizon_days, "Override the horizon");
    cmd->add_option("--threads", flags.threads, "Worker thread count");
}

int default_threads() {
    if (const char* env = std::getenv("CFMM_LAB_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 0;  // keep the config value
}

cfmm::RunConfig load_config(const CommonFlags& flags) {
    cfmm::RunConfig config = cfmm::load_run_config(flags.config_path);
    if (flags.seed) config.sim.seed = *flags.seed;
    if (flags.trials) config.sim.trials = *flags.trials;
    if (flags.horizon_days) config.sim.horizon_days = *flags.horizon_days;
    if (flags.threads)
        config.sim.threads = *flags.threads;
    else if (const int n = default_threads(); n >= 1)
        config.sim.threads = n;
    config.sim.validate();
    return config;
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
    const auto dot = out.find_last_of('.');
    return (dot == std::string::npos ? out : out.substr(0, dot)) + suffix;
}

int cmd_calibrate(const std::string& prices_path, const std::string& trades_path,
                  const std::string& out_path, double fee_gamma, int n_max,
                  std::uint64_t seed) {
    const cfmm::PricePath refs = cfmm::read_price_csv(prices_path);
    const auto trades = cfmm::read_trade_csv(trades_path);
    if (trades.empty()) throw cfmm::ValidationError(trades_path + ": no trades");
    const cfmm::FeeParams fees{fee_gamma};
    fees.validate();

    cfmm::ReturnSeries series;
    series.dt = (refs.times.back() - refs.times.front()) /
                static_cast<double>(refs.times.size() - 1);
    series.returns.reserve(refs.prices.size() - 1);
    for (std::size_t i = 1; i < refs.prices.size(); ++i)
        series.returns.push_back(std::log(refs.prices[i] / refs.prices[i - 1]));

    cfmm::CalibrationResult result;
    cfmm::MleOptions mle;
    mle.n_max = n_max;
    mle.seed = seed;
    const cfmm::MleFit fit = cfmm::fit_mjd(series, mle);
    result.mjd = fit.params;
    result.loglik = fit.loglik;
    result.mjd_converged = fit.converged;

    const auto deltas = cfmm::extract_delta_samples(trades, refs, fees, &result.skipped_trades);
    result.delta_samples = deltas.size();
    const double span_days = refs.times.back() - refs.times.front();
    result.observed_trades_per_day = static_cast<double>(trades.size()) / span_days;

    double mean = 0.0, var = 0.0;
    for (double d : deltas) mean += d;
    mean /= std::max<double>(1.0, static_cast<double>(deltas.size()));
    for (double d : deltas) var += (d - mean) * (d - mean);
    if (deltas.size() > 1) var /= static_cast<double>(deltas.size() - 1);
    result.nt1.sigma_delta = std::sqrt(var);

    // Arrival rate such that the censored NT1 trade rate matches observation.
    cfmm::SimConfig censor;
    censor.mjd = result.mjd;
    censor.fees = fees;
    censor.arb = cfmm::ArbParams{};
    censor.nt1 = result.nt1;
    censor.horizon_days = 2.0;
    censor.trials = 8;
    censor.seed = seed;
    try {
        result.nt1.lambda = cfmm::calibrate_arrival_rate(
            result.observed_trades_per_day,
            [&](double lambda) { return cfmm::simulated_nt1_trade_rate(censor, lambda); },
            result.observed_trades_per_day * 0.5, result.observed_trades_per_day * 64.0);
    } catch (const std::runtime_error& e) {
        std::cerr << "warning: NT1 arrival-rate calibration failed: " << e.what() << "\n";
        result.nt1.lambda = 0.0;
    }

    result.nt2 = cfmm::fit_nt2(trades, refs, fees);
    cfmm::write_calibration_json(result, out_path);
    std::cout << "calibration written to " << out_path << "\n";
    return 0;
}

int cmd_simulate(const CommonFlags& flags) {
    cfmm::RunConfig config = load_config(flags);
    if (config.equilibrium_bootstrap)
        config.sim.equilibrium_samples = cfmm::generate_equilibrium_samples(config.sim, 4096);
    const auto results = cfmm::run_trials(config.sim);
    const cfmm::BatchStats stats = cfmm::summarize(results, config.sim);
    cfmm::write_batch_stats_json(stats, config, flags.out_path);
    cfmm::write_trials_csv(results, sibling_path(flags.out_path, "_trials.csv"));
    std::cout << "mean PnL " << stats.mean_pnl_bps_per_day << " bps/day (stderr "
              << stats.stderr_bps_per_day << ") over " << stats.trials << " trials\n";
    return 0;
}

int cmd_greeks(const CommonFlags& flags) {
    cfmm::RunConfig config = load_config(flags);
    if (config.equilibrium_bootstrap)
        config.sim.equilibrium_samples = cfmm::generate_equilibrium_samples(config.sim, 4096);
    const cfmm::GreeksReport report = cfmm::greeks_report(config.sim);
    cfmm::write_greeks_json(report, config, flags.out_path);
    std::cout << "gamma " << report.gamma.value << " +- " << report.gamma.stderr_value
              << ", delta " << report.delta.value << " +- " << report.delta.stderr_value << "\n";
    return 0;
}

int cmd_equilibrium(const CommonFlags& flags) {
    cfmm::RunConfig config = load_config(flags);
    const auto samples = cfmm::sample_equilibrium(config.sim, config.equilibrium);
    cfmm::write_equilibrium_samples_csv(samples, flags.out_path);

    const double w = -std::log(config.sim.fees.gamma);
    const cfmm::EquilibriumDensity density =
        (config.equilibrium.cadence == cfmm::ArbCadence::Instantaneous)
            ? cfmm::analytic_equilibrium_density(cfmm::ArbCadence::Instantaneous, w)
            : cfmm::analytic_equilibrium_density(cfmm::ArbCadence::Poisson, w,
                                                 config.equilibrium.arb_rate_per_day,
                                                 config.sim.mjd.diffusion.sigma);
    cfmm::write_density_csv(density, 3.0 * w, 601, sibling_path(flags.out_path, "_density.csv"));
    std::cout << samples.size() << " equilibrium samples written to " << flags.out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LP valuation lab for constant-product market makers"};
    app.require_subcommand(1);

    // calibrate
    std::string prices_path, trades_path, calib_out;
    double fee_gamma = 0.997;
    int n_max = 3;
    std::uint64_t calib_seed = 7;
    auto* calibrate = app.add_subcommand("calibrate", "Fit price and agent models from CSV data");
    calibrate->add_option("--prices", prices_path, "Reference price CSV (timestamp,price)")
        ->required();
    calibrate
        ->add_option("--trades", trades_path,
                     "Pool trade CSV (timestamp,u_x,u_y,reserve_x,reserve_y)")
        ->required();
    calibrate->add_option("--out", calib_out, "Output JSON path")->required();
    calibrate->add_option("--fee-gamma", fee_gamma, "Fee retention factor");
    calibrate->add_option("--n-max", n_max, "Maximum jumps in the MLE mixture");
    calibrate->add_option("--seed", calib_seed, "Seed for optimizer starts and censoring sims");

    CommonFlags sim_flags, greeks_flags, eq_flags;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo valuation batch");
    add_common(simulate, sim_flags);
    auto* greeks = app.add_subcommand("greeks", "Estimate greeks and fee sensitivities");
    add_common(greeks, greeks_flags);
    auto* equilibrium =
        app.add_subcommand("equilibrium", "Sample the equilibrium log-price-ratio distribution");
    add_common(equilibrium, eq_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate->parsed())
            return cmd_calibrate(prices_path, trades_path, calib_out, fee_gamma, n_max,
                                 calib_seed);
        if (simulate->parsed()) return cmd_simulate(sim_flags);
        if (greeks->parsed()) return cmd_greeks(greeks_flags);
        if (equilibrium->parsed()) return cmd_equilibrium(eq_flags);
    } catch (const cfmm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
