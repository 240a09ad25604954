#include "cfmmlab/greeks.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmm {

double analytic_gamma_constant_product() { return -0.25; }

Estimate estimate_gamma(const SimConfig& config) {
    config.validate();
    if (!(config.mjd.diffusion.sigma > 0.0 || config.mjd.jumps.lambda > 0.0))
        throw std::invalid_argument("estimate_gamma: configuration has no price variation");
    if (config.trials < 2) throw std::invalid_argument("estimate_gamma: need trials >= 2");

    const auto results = run_trials(config);
    const double n = static_cast<double>(results.size());
    const double v0 = config.initial_pool_value;
    double mean_q = 0.0, mean_g = 0.0;
    for (const auto& r : results) {
        mean_q += r.sum_sq_rel_move;
        mean_g += 2.0 * (r.pnl - r.fee_income) / v0;
    }
    mean_q /= n;
    mean_g /= n;
    if (!(mean_q > 0.0))
        throw std::invalid_argument("estimate_gamma: no trades, nothing to regress on");

    // Ratio estimator gamma = 2 E[PnL] / (V0 E[Q]); stderr by the delta method
    // on the per-trial influence values.
    const double gamma = mean_g / mean_q;
    double ss = 0.0;
    for (const auto& r : results) {
        const double resid = 2.0 * (r.pnl - r.fee_income) / v0 - gamma * r.sum_sq_rel_move;
        ss += resid * resid;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    return {gamma, sd / (mean_q * std::sqrt(n))};
}

double lvr(double variance_per_day, double pool_value, double dt) {
    if (!(variance_per_day >= 0.0)) throw std::invalid_argument("variance must be >= 0");
    return variance_per_day / 8.0 * pool_value * dt;
}

PnLDecomposition pnl_decomposition(const SimConfig& config) {
    const BatchStats stats = run_batch(config);
    PnLDecomposition out;
    out.total = stats.mean_pnl_bps_per_day;
    out.fee_term = stats.mean_fee_bps_per_day;
    out.gamma_term = 0.5 * analytic_gamma_constant_product() * stats.mean_sum_sq_rel_move * 1e4 /
                     config.horizon_days;
    out.higher_order = out.total - out.fee_term - out.gamma_term;
    return out;
}

namespace {

// Paired per-trial finite difference with common random numbers.
Estimate paired_difference(const SimConfig& up, const SimConfig& down, double denom) {
    const auto r_up = run_trials(up);
    const auto r_down = run_trials(down);
    const double n = static_cast<double>(r_up.size());
    const double to_bps = 1e4 / (up.initial_pool_value * up.horizon_days);
    double mean = 0.0;
    std::vector<double> diffs(r_up.size());
    for (std::size_t i = 0; i < r_up.size(); ++i) {
        diffs[i] = (r_up[i].pnl - r_down[i].pnl) * to_bps / denom;
        mean += diffs[i];
    }
    mean /= n;
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!std::isfinite(mean)) throw std::runtime_error("non-finite finite-difference estimate");
    return {mean, sd / std::sqrt(n)};
}

}  // namespace

Estimate sensitivity(const SimConfig& config, SensitivityParam param, double bump) {
    config.validate();
    if (!(bump > 0.0)) throw std::invalid_argument("bump must be > 0");
    SimConfig up = config;
    SimConfig down = config;
    double denom = 0.0;
    switch (param) {
        case SensitivityParam::Fee: {
            // bump in bps of fee; gamma moves opposite to the fee
            const double h = bump * 1e-4;
            up.fees.gamma = config.fees.gamma - h;
            down.fees.gamma = config.fees.gamma + h;
            if (!(up.fees.gamma > 0.0) || !(down.fees.gamma <= 1.0))
                throw std::invalid_argument("fee bump leaves (0,1]");
            denom = 2.0 * bump;  // per 1bp of fee
            break;
        }
        case SensitivityParam::ArbEdge: {
            if (!config.arb) throw std::invalid_argument("no arb agent configured");
            up.arb->edge_bps = config.arb->edge_bps + bump;
            down.arb->edge_bps = std::max(config.arb->edge_bps - bump, 0.0);
            denom = up.arb->edge_bps - down.arb->edge_bps;  // per 1bp of edge
            break;
        }
        case SensitivityParam::Nt2Rate: {
            if (!config.nt2) throw std::invalid_argument("no NT2 agent configured");
            up.nt2->rate = config.nt2->rate * (1.0 + bump);
            down.nt2->rate = config.nt2->rate * (1.0 - bump);
            denom = 2.0 * bump * 100.0;  // per 1% of rate
            break;
        }
        case SensitivityParam::Nt2Size: {
            if (!config.nt2) throw std::invalid_argument("no NT2 agent configured");
            up.nt2->size_scale = config.nt2->size_scale * (1.0 + bump);
            down.nt2->size_scale = config.nt2->size_scale * (1.0 - bump);
            denom = 2.0 * bump * 100.0;  // per 1% of size
            break;
        }
    }
    return paired_difference(up, down, denom);
}

Estimate delta_check(const SimConfig& config, double bump) {
    config.validate();
    SimConfig up = config;
    SimConfig down = config;
    up.initial_price = config.initial_price * (1.0 + bump);
    down.initial_price = config.initial_price * (1.0 - bump);
    return paired_difference(up, down, 2.0 * bump);
}

GreeksReport greeks_report(const SimConfig& config) {
    GreeksReport report;
    report.delta = delta_check(config);

    SimConfig gamma_config = config;
    gamma_config.fees.gamma = 1.0;
    gamma_config.nt1.reset();
    gamma_config.nt2.reset();
    if (!gamma_config.arb) gamma_config.arb = ArbParams{};
    gamma_config.equilibrium_samples.clear();
    report.gamma = estimate_gamma(gamma_config);

    const BatchStats stats = run_batch(config);
    report.theta_analogue_bps_per_day = stats.mean_fee_bps_per_day;

    struct Row {
        const char* name;
        SensitivityParam param;
        double bump;
        const char* units;
        bool available;
    };
    const Row rows[] = {
        {"fee", SensitivityParam::Fee, 1.0, "bps/day per 1bp of fee", true},
        {"arb_edge", SensitivityParam::ArbEdge, 1.0, "bps/day per 1bp of edge",
         config.arb.has_value()},
        {"nt2_rate", SensitivityParam::Nt2Rate, 0.01, "bps/day per 1% of rate",
         config.nt2.has_value()},
        {"nt2_size", SensitivityParam::Nt2Size, 0.01, "bps/day per 1% of size",
         config.nt2.has_value()},
    };
    for (const auto& row : rows) {
        if (!row.available) continue;
        const Estimate est = sensitivity(config, row.param, row.bump);
        report.sensitivities[row.name] = {est.value, est.stderr_value, row.bump, row.units};
    }
    return report;
}

}  // namespace cfmm
