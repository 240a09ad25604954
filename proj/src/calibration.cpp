#include "cfmmlab/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cfmm {

void ReturnSeries::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("return series: dt must be > 0");
    if (returns.empty()) throw std::invalid_argument("return series: empty");
    for (double r : returns)
        if (!std::isfinite(r)) throw std::invalid_argument("return series: non-finite return");
}

double mjd_log_likelihood(const ReturnSeries& series, const MJDParams& params, int n_max) {
    series.validate();
    params.validate();
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    const double dt = series.dt;
    const auto& d = params.diffusion;
    const auto& j = params.jumps;
    const double var0 = d.sigma * d.sigma * dt;
    if (!(var0 > 0.0)) throw std::domain_error("mixture variance at k=0 must be positive");

    const double mean_rate = j.lambda * dt;
    const int k_top = (j.lambda > 0.0) ? n_max : 0;
    std::array<double, 64> weight{}, inv2var{}, norm{};
    if (k_top >= static_cast<int>(weight.size())) throw std::invalid_argument("n_max too large");
    double log_fact = 0.0;
    for (int k = 0; k <= k_top; ++k) {
        if (k > 0) log_fact += std::log(static_cast<double>(k));
        const double var = var0 + k * j.sigma * j.sigma;
        const double lw = (k > 0 ? k * std::log(mean_rate) : 0.0) - mean_rate - log_fact;
        weight[static_cast<std::size_t>(k)] = std::exp(lw);
        inv2var[static_cast<std::size_t>(k)] = 0.5 / var;
        norm[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(2.0 * M_PI * var);
    }

    const double base_mean = d.mu * dt;
    double loglik = 0.0;
    for (double r : series.returns) {
        double density = 0.0;
        for (int k = 0; k <= k_top; ++k) {
            const auto ki = static_cast<std::size_t>(k);
            const double dev = r - (base_mean + k * j.mu);
            density += weight[ki] * norm[ki] * std::exp(-dev * dev * inv2var[ki]);
        }
        loglik += std::log(std::max(density, std::numeric_limits<double>::min()));
    }
    return loglik;
}

namespace {

// Minimal Nelder-Mead on R^n; returns best point, fills iterations/evals.
struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    int evaluations = 0;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                          std::vector<double> x0, double step, int max_iter, double tol) {
    const std::size_t n = x0.size();
    std::vector<std::pair<double, std::vector<double>>> simplex;
    simplex.reserve(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return fn(x);
    };
    simplex.emplace_back(eval(x0), x0);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = x0;
        x[i] += step;
        simplex.emplace_back(eval(x), x);
    }

    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        const double spread = std::abs(simplex.back().first - simplex.front().first);
        if (spread <= tol * (1.0 + std::abs(simplex.front().first))) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t v = 0; v < n; ++v) centroid[v] += simplex[i].second[v];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t v = 0; v < n; ++v)
                x[v] = centroid[v] + coef * (simplex.back().second[v] - centroid[v]);
            return x;
        };
        auto reflected = blend(-1.0);
        const double fr = eval(reflected);
        if (fr < simplex.front().first) {
            auto expanded = blend(-2.0);
            const double fe = eval(expanded);
            if (fe < fr)
                simplex.back() = {fe, expanded};
            else
                simplex.back() = {fr, reflected};
        } else if (fr < simplex[n - 1].first) {
            simplex.back() = {fr, reflected};
        } else {
            const bool outside = fr < simplex.back().first;
            auto contracted = blend(outside ? -0.5 : 0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, simplex.back().first)) {
                simplex.back() = {fc, contracted};
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t v = 0; v < n; ++v)
                        simplex[i].second[v] =
                            0.5 * (simplex[i].second[v] + simplex.front().second[v]);
                    simplex[i].first = eval(simplex[i].second);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return {simplex.front().second, simplex.front().first, converged, evals};
}

}  // namespace

MleFit fit_mjd(const ReturnSeries& series, const MleOptions& options) {
    series.validate();
    if (options.starts < 1) throw std::invalid_argument("starts must be >= 1");

    const double dt = series.dt;
    const double n = static_cast<double>(series.returns.size());
    double mean = std::accumulate(series.returns.begin(), series.returns.end(), 0.0) / n;
    double var = 0.0;
    for (double r : series.returns) var += (r - mean) * (r - mean);
    var /= std::max(n - 1.0, 1.0);
    const double total_var_per_day = std::max(var / dt, 1e-12);

    // Parameters in log space: (log sigma_D, log lambda_J, log sigma_J).
    auto objective = [&](const std::vector<double>& v) {
        MJDParams p = MJDParams::risk_neutral(std::exp(v[0]), std::exp(v[1]), std::exp(v[2]));
        // Reject non-physical regions: per-jump log-return sd above 2 or daily
        // diffusion vol above 1000% correspond to price moves that overflow any
        // downstream simulation, and are never plausible fits to market data.
        if (p.diffusion.sigma > 10.0 || p.jumps.lambda > 1e4 || p.jumps.sigma > 2.0)
            return std::numeric_limits<double>::max();
        return -mjd_log_likelihood(series, p, options.n_max);
    };

    Rng rng = make_substream(options.seed, 0xCA11B8u);
    MleFit best;
    best.loglik = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < options.starts; ++s) {
        double diff_frac, lambda0;
        if (s == 0) {
            diff_frac = 0.7;
            lambda0 = 1.0;
        } else {
            diff_frac = 0.2 + 0.75 * uniform01(rng);
            lambda0 = std::exp(std::log(0.05) + uniform01(rng) * std::log(20.0 / 0.05));
        }
        const double sigma_d0 = std::sqrt(diff_frac * total_var_per_day);
        const double sigma_j0 =
            std::sqrt(std::max((1.0 - diff_frac) * total_var_per_day / lambda0, 1e-12));
        std::vector<double> x0 = {std::log(sigma_d0), std::log(lambda0), std::log(sigma_j0)};
        auto run = nelder_mead(objective, x0, 0.5, options.max_iter, options.tol);
        const double ll = -run.f;
        if (ll > best.loglik) {
            best.params =
                MJDParams::risk_neutral(std::exp(run.x[0]), std::exp(run.x[1]), std::exp(run.x[2]));
            best.loglik = ll;
            best.converged = run.converged;
        }
        best.evaluations += run.evaluations;
    }
    return best;
}

std::vector<double> extract_delta_samples(const std::vector<TradeRecord>& trades,
                                          const PricePath& refs, const FeeParams& fees,
                                          std::size_t* skipped) {
    refs.validate();
    std::vector<double> deltas;
    deltas.reserve(trades.size());
    std::size_t skip_count = 0;
    for (const auto& trade : trades) {
        if (!refs.covers(trade.timestamp)) {
            ++skip_count;
            continue;
        }
        const double p = refs.interpolate(trade.timestamp);
        const double p_tilde =
            invert_trade(PoolState{trade.x, trade.y}, Fill{trade.u_x, trade.u_y}, fees);
        deltas.push_back(p_tilde / p - 1.0);
    }
    if (skipped) *skipped = skip_count;
    return deltas;
}

double calibrate_arrival_rate(double observed_rate,
                              const std::function<double(double)>& simulated_rate,
                              double lambda_lo, double lambda_hi, double rel_tol) {
    if (!(observed_rate > 0.0)) throw std::invalid_argument("observed rate must be > 0");
    if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
        throw std::invalid_argument("invalid arrival-rate bracket");

    double f_lo = simulated_rate(lambda_lo);
    double f_hi = simulated_rate(lambda_hi);
    if (f_lo > observed_rate || f_hi < observed_rate)
        throw std::runtime_error("arrival-rate target unreachable: simulated rate in [" +
                                 std::to_string(f_lo) + ", " + std::to_string(f_hi) +
                                 "] for lambda in [" + std::to_string(lambda_lo) + ", " +
                                 std::to_string(lambda_hi) + "]");

    double lo = lambda_lo, hi = lambda_hi;
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 60; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f = simulated_rate(mid);
        if (std::abs(f - observed_rate) <= rel_tol * observed_rate) return mid;
        if (f < observed_rate)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

double simulated_nt1_trade_rate(const SimConfig& base, double lambda) {
    if (!base.nt1) throw std::invalid_argument("base config must define NT1 parameters");
    SimConfig config = base;
    config.nt1->lambda = lambda;
    const auto results = run_trials(config);
    double trades = 0.0;
    for (const auto& r : results) trades += static_cast<double>(r.noise_trades);
    return trades / static_cast<double>(results.size()) / config.horizon_days;
}

NT2Params fit_nt2(const std::vector<TradeRecord>& trades, const PricePath& refs,
                  const FeeParams& fees, double arb_delta_threshold) {
    if (trades.empty()) throw std::invalid_argument("fit_nt2: no trades");
    refs.validate();
    const double span_days = refs.times.back() - refs.times.front();
    if (!(span_days > 0.0)) throw std::invalid_argument("fit_nt2: degenerate reference span");

    double notional_sum = 0.0;
    std::size_t count = 0;
    for (const auto& trade : trades) {
        if (!refs.covers(trade.timestamp)) continue;
        const double p = refs.interpolate(trade.timestamp);
        const double p_tilde =
            invert_trade(PoolState{trade.x, trade.y}, Fill{trade.u_x, trade.u_y}, fees);
        if (std::abs(p_tilde / p - 1.0) <= arb_delta_threshold) continue;  // arb-attributed
        notional_sum += std::abs(trade.u_y);
        ++count;
    }
    if (count == 0) throw std::runtime_error("fit_nt2: every trade was attributed to arbitrage");
    return NT2Params{static_cast<double>(count) / span_days, notional_sum / static_cast<double>(count)};
}

}  // namespace cfmm
