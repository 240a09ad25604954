#include "cfmmlab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cfmm {

void SimConfig::validate() const {
    if (!(horizon_days > 0.0)) throw std::invalid_argument("horizon_days must be > 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!(block_interval > 0.0)) throw std::invalid_argument("block_interval must be > 0");
    if (!(initial_price > 0.0)) throw std::invalid_argument("initial_price must be > 0");
    if (!(initial_pool_value > 0.0)) throw std::invalid_argument("initial_pool_value must be > 0");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    mjd.validate();
    fees.validate();
    if (arb) arb->validate();
    if (nt1) nt1->validate();
    if (nt2) nt2->validate();
}

PoolState SimConfig::initial_pool(double log_ratio) const {
    const double p_hat = initial_price * std::exp(log_ratio);
    const double x = initial_pool_value / (initial_price + p_hat);
    return PoolState{x, x * p_hat};
}

namespace {

struct Event {
    double time;
    AgentKind kind;
};

// Noise trades execute before the arb check at coincident timestamps.
int kind_priority(AgentKind k) { return k == AgentKind::Arb ? 1 : 0; }

}  // namespace

TrialResult run_trial(const SimConfig& config, int trial_index) {
    return run_trial(config, trial_index, nullptr);
}

TrialResult run_trial(const SimConfig& config, int trial_index, std::vector<TradeLogEntry>* log) {
    Rng rng = make_substream(config.seed, static_cast<std::uint64_t>(trial_index));

    double z0 = config.initial_log_ratio;
    if (!config.equilibrium_samples.empty())
        z0 = bootstrap_equilibrium(config.equilibrium_samples, rng);
    PoolState pool = config.initial_pool(z0);

    std::vector<Event> events;
    if (config.arb) {
        const auto blocks = static_cast<std::size_t>(config.horizon_days / config.block_interval);
        events.reserve(blocks);
        for (std::size_t k = 1; k <= blocks; ++k)
            events.push_back({static_cast<double>(k) * config.block_interval, AgentKind::Arb});
    }
    if (config.nt1)
        for (double t : sample_arrivals(config.nt1->lambda, config.horizon_days, rng))
            events.push_back({t, AgentKind::NT1});
    if (config.nt2)
        for (double t : sample_arrivals(config.nt2->rate, config.horizon_days, rng))
            events.push_back({t, AgentKind::NT2});
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        return kind_priority(a.kind) < kind_priority(b.kind);
    });

    TrialResult result;
    double p = config.initial_price;
    double t = 0.0;
    for (const Event& ev : events) {
        if (ev.time > t) {
            p = step_price(p, config.mjd, ev.time - t, rng);
            t = ev.time;
        }
        Fill fill;
        switch (ev.kind) {
            case AgentKind::Arb: fill = arb_fill(pool, p, config.fees, *config.arb); break;
            case AgentKind::NT1: fill = nt1_fill(pool, p, *config.nt1, config.fees, rng); break;
            case AgentKind::NT2: fill = nt2_fill(pool, *config.nt2, config.fees, rng); break;
        }
        if (fill.is_zero()) continue;

        if (log) log->push_back({ev.time, ev.kind, fill, pool, p});
        const double rel = p / pool_implied_price(pool) - 1.0;
        const double value_before = pool_value(pool, p);
        pool = apply_trade(pool, fill);
        result.pnl += pool_value(pool, p) - value_before;
        const double notional = fill_notional(fill, p);
        result.volume += notional;
        result.fee_income += config.fees.fee() * notional;
        result.sum_sq_rel_move += rel * rel;
        if (ev.kind == AgentKind::Arb)
            ++result.arb_trades;
        else
            ++result.noise_trades;
    }
    if (config.horizon_days > t) p = step_price(p, config.mjd, config.horizon_days - t, rng);
    result.final_log_ratio = std::log(pool_implied_price(pool) / p);
    return result;
}

std::vector<TrialResult> run_trials(const SimConfig& config) {
    config.validate();
    std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
    const int n_threads = std::min(config.threads, config.trials);
    if (n_threads <= 1) {
        for (int i = 0; i < config.trials; ++i) results[static_cast<std::size_t>(i)] = run_trial(config, i);
        return results;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= config.trials) return;
            results[static_cast<std::size_t>(i)] = run_trial(config, i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return results;
}

BatchStats summarize(const std::vector<TrialResult>& results, const SimConfig& config) {
    if (results.size() < 1) throw std::invalid_argument("no trial results");
    const double n = static_cast<double>(results.size());
    const double to_bps = 1e4 / (config.initial_pool_value * config.horizon_days);

    BatchStats stats;
    stats.trials = static_cast<int>(results.size());
    stats.horizon_days = config.horizon_days;
    stats.initial_pool_value = config.initial_pool_value;

    double sum_pnl = 0.0, sum_fee = 0.0, sum_vol = 0.0, sum_q = 0.0;
    double arb_count = 0.0, noise_count = 0.0;
    for (const auto& r : results) {
        sum_pnl += r.pnl;
        sum_fee += r.fee_income;
        sum_vol += r.volume;
        sum_q += r.sum_sq_rel_move;
        arb_count += static_cast<double>(r.arb_trades);
        noise_count += static_cast<double>(r.noise_trades);
    }
    const double mean_pnl = sum_pnl / n;
    stats.mean_pnl_bps_per_day = mean_pnl * to_bps;
    stats.mean_fee_bps_per_day = sum_fee / n * to_bps;
    stats.mean_volume = sum_vol / n;
    stats.mean_sum_sq_rel_move = sum_q / n;
    stats.arb_trades_per_day = arb_count / n / config.horizon_days;
    stats.noise_trades_per_day = noise_count / n / config.horizon_days;

    if (results.size() >= 2) {
        double ss = 0.0;
        for (const auto& r : results) ss += (r.pnl - mean_pnl) * (r.pnl - mean_pnl);
        const double sd = std::sqrt(ss / (n - 1.0));
        stats.stderr_bps_per_day = sd / std::sqrt(n) * to_bps;
    }
    return stats;
}

BatchStats run_batch(const SimConfig& config) {
    if (config.trials < 2) throw std::invalid_argument("run_batch requires trials >= 2");
    return summarize(run_trials(config), config);
}

double fee_income(const TrialResult& trial) { return trial.fee_income; }

double EquilibriumDensity::operator()(double z) const {
    const double a = std::abs(z);
    if (a <= halfwidth) return level;
    if (decay <= 0.0) return 0.0;
    return level * std::exp(-decay * (a - halfwidth));
}

EquilibriumDensity analytic_equilibrium_density(ArbCadence cadence, double fee_halfwidth,
                                                double arb_rate_per_day,
                                                double sigma_per_sqrt_day) {
    if (!(fee_halfwidth > 0.0)) throw std::invalid_argument("fee_halfwidth must be > 0");
    EquilibriumDensity d;
    d.halfwidth = fee_halfwidth;
    if (cadence == ArbCadence::Instantaneous) {
        d.decay = 0.0;
        d.level = 1.0 / (2.0 * fee_halfwidth);
        return d;
    }
    if (!(arb_rate_per_day > 0.0) || !(sigma_per_sqrt_day > 0.0))
        throw std::invalid_argument("poisson mode needs arb rate and sigma");
    d.decay = std::sqrt(2.0 * arb_rate_per_day) / sigma_per_sqrt_day;
    d.level = 1.0 / (2.0 * fee_halfwidth + 2.0 / d.decay);
    return d;
}

std::vector<double> sample_equilibrium(const SimConfig& config, const EquilibriumConfig& eq) {
    config.validate();
    if (eq.samples == 0) throw std::invalid_argument("sample count must be > 0");
    Rng rng = make_substream(config.seed, 0xE9u);

    // z = log(p_hat / p) diffuses with the log-price increments; an arb trade
    // resets it to the nearer band edge +-log(gamma).
    const double w = -std::log(config.fees.gamma);
    const double total_days =
        static_cast<double>(eq.samples) * eq.sample_interval_days / (1.0 - eq.burn_in_fraction);
    const double burn_in_days = total_days * eq.burn_in_fraction;

    std::vector<double> samples;
    samples.reserve(eq.samples);
    double z = 0.0;
    double t = 0.0;
    double next_sample = burn_in_days;
    double next_arb = (eq.cadence == ArbCadence::Poisson)
                          ? std::exponential_distribution<double>(eq.arb_rate_per_day)(rng)
                          : 0.0;
    while (samples.size() < eq.samples) {
        z -= sample_log_return(config.mjd, eq.substep_days, rng);
        t += eq.substep_days;
        bool arb_now = false;
        if (eq.cadence == ArbCadence::Instantaneous) {
            arb_now = true;
        } else if (t >= next_arb) {
            arb_now = true;
            while (next_arb <= t)
                next_arb += std::exponential_distribution<double>(eq.arb_rate_per_day)(rng);
        }
        if (arb_now) z = std::clamp(z, -w, w);
        if (t >= next_sample) {
            samples.push_back(z);
            next_sample += eq.sample_interval_days;
        }
    }
    return samples;
}

std::vector<double> generate_equilibrium_samples(const SimConfig& config,
                                                 std::size_t n_samples,
                                                 double burn_in_fraction) {
    config.validate();
    if (n_samples == 0) throw std::invalid_argument("sample count must be > 0");
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw std::invalid_argument("burn_in_fraction must be in [0, 1)");

    SimConfig generating = config;
    generating.equilibrium_samples.clear();
    const auto total_blocks =
        static_cast<std::size_t>(std::ceil(static_cast<double>(n_samples) / (1.0 - burn_in_fraction)));
    const auto burn_in_blocks = total_blocks - n_samples;
    generating.horizon_days = static_cast<double>(total_blocks + 1) * generating.block_interval;
    generating.nt1 = config.nt1;
    generating.nt2 = config.nt2;
    if (!generating.arb) generating.arb = ArbParams{};

    Rng rng = make_substream(config.seed, 0xB007u);
    PoolState pool = generating.initial_pool(generating.initial_log_ratio);
    double p = generating.initial_price;
    double t = 0.0;

    std::vector<Event> events;
    if (generating.nt1)
        for (double at : sample_arrivals(generating.nt1->lambda, generating.horizon_days, rng))
            events.push_back({at, AgentKind::NT1});
    if (generating.nt2)
        for (double at : sample_arrivals(generating.nt2->rate, generating.horizon_days, rng))
            events.push_back({at, AgentKind::NT2});
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.time < b.time; });

    std::vector<double> samples;
    samples.reserve(n_samples);
    std::size_t next_event = 0;
    for (std::size_t block = 1; block <= total_blocks && samples.size() < n_samples; ++block) {
        const double block_time = static_cast<double>(block) * generating.block_interval;
        while (next_event < events.size() && events[next_event].time <= block_time) {
            const Event& ev = events[next_event++];
            if (ev.time > t) {
                p = step_price(p, generating.mjd, ev.time - t, rng);
                t = ev.time;
            }
            Fill fill = (ev.kind == AgentKind::NT1)
                            ? nt1_fill(pool, p, *generating.nt1, generating.fees, rng)
                            : nt2_fill(pool, *generating.nt2, generating.fees, rng);
            if (!fill.is_zero()) pool = apply_trade(pool, fill);
        }
        if (block_time > t) {
            p = step_price(p, generating.mjd, block_time - t, rng);
            t = block_time;
        }
        const Fill fill = arb_fill(pool, p, generating.fees, *generating.arb);
        if (!fill.is_zero()) pool = apply_trade(pool, fill);
        if (block > burn_in_blocks) samples.push_back(std::log(pool_implied_price(pool) / p));
    }
    return samples;
}

double bootstrap_equilibrium(const std::vector<double>& samples, Rng& rng) {
    if (samples.empty()) throw std::invalid_argument("empty equilibrium sample set");
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    return samples[pick(rng)];
}

}  // namespace cfmm
