#include <doctest.h>

#include <cmath>

#include "cfmmlab/calibration.hpp"
#include "test_helpers.hpp"

using namespace cfmm;

namespace {

ReturnSeries synthetic_series(const MJDParams& params, double dt, int n, std::uint64_t seed) {
    ReturnSeries series;
    series.dt = dt;
    series.returns.reserve(static_cast<std::size_t>(n));
    Rng rng = make_substream(seed, 1);
    for (int i = 0; i < n; ++i) series.returns.push_back(sample_log_return(params, dt, rng));
    return series;
}

double gaussian_loglik(const std::vector<double>& returns, double mean, double var) {
    double ll = 0.0;
    for (double r : returns)
        ll += -0.5 * std::log(2.0 * M_PI * var) - (r - mean) * (r - mean) / (2.0 * var);
    return ll;
}

}  // namespace

TEST_CASE("mjd log likelihood") {
    const double dt = 15.0 / 86400.0;
    SUBCASE("lambda=0 collapses to the Gaussian log-likelihood") {
        const MJDParams gbm = MJDParams::risk_neutral(0.08, 0.0, 0.0);
        const ReturnSeries series = synthetic_series(gbm, dt, 5000, 5);
        const double mixture = mjd_log_likelihood(series, gbm, 3);
        const double gaussian = gaussian_loglik(series.returns, 0.0, 0.08 * 0.08 * dt);
        CHECK(mixture == doctest::Approx(gaussian).epsilon(1e-10));
    }
    SUBCASE("single return at the mode") {
        ReturnSeries series{1.0, {0.02 * 1.0}};
        MJDParams p;
        p.diffusion = {0.02, 0.1};
        const double ll = mjd_log_likelihood(series, p, 0);
        CHECK(ll == doctest::Approx(-0.5 * std::log(2.0 * M_PI * 0.01)).epsilon(1e-12));
    }
    SUBCASE("errors") {
        ReturnSeries empty{dt, {}};
        CHECK_THROWS_AS(mjd_log_likelihood(empty, MJDParams::risk_neutral(0.1, 0, 0), 3),
                        std::invalid_argument);
        ReturnSeries ok{dt, {0.0}};
        CHECK_THROWS_AS(mjd_log_likelihood(ok, MJDParams::risk_neutral(0.0, 1.0, 0.01), 3),
                        std::domain_error);
    }
    SUBCASE("true parameters dominate perturbed sigma_d on synthetic data") {
        const MJDParams truth = MJDParams::risk_neutral(0.080128, 1.070119, 0.013545);
        const ReturnSeries series = synthetic_series(truth, dt, 120000, 6);
        const double at_truth = mjd_log_likelihood(series, truth, 3);
        for (double bump : {0.8, 1.2}) {
            MJDParams off = truth;
            off.diffusion.sigma *= bump;
            CHECK(at_truth > mjd_log_likelihood(series, off, 3));
        }
    }
}

TEST_CASE("fit_mjd recovers synthetic generating parameters") {
    const double dt = 15.0 / 86400.0;
    MleOptions options;
    options.starts = 4;
    options.max_iter = 250;
    SUBCASE("pure GBM data") {
        const MJDParams truth = MJDParams::risk_neutral(0.08, 0.0, 0.0);
        const ReturnSeries series = synthetic_series(truth, dt, 60000, 21);
        const MleFit fit = fit_mjd(series, options);
        CHECK(std::abs(fit.params.diffusion.sigma - 0.08) / 0.08 < 0.05);
        // no jumps to find: the jump component is either tiny in variance or
        // so rare it is expected to fire less than once per hundred samples
        const double jump_var = fit.params.jumps.lambda *
                                fit.params.jumps.sigma * fit.params.jumps.sigma;
        const double expected_jumps = fit.params.jumps.lambda * dt * 60000;
        CHECK((jump_var < 0.1 * 0.08 * 0.08 || expected_jumps < 0.01));
        // The fitted jump size must stay physically plausible even when the
        // likelihood has a spurious-spike direction; downstream simulations
        // consume these parameters and cannot survive e^{hundreds} price moves.
        CHECK(fit.params.jumps.sigma <= 2.0);
        CHECK(fit.params.diffusion.sigma <= 10.0);
    }
    SUBCASE("jump diffusion data, two weeks of 15-second bars") {
        const MJDParams truth = MJDParams::risk_neutral(0.080128, 8.0, 0.013545);
        const ReturnSeries series = synthetic_series(truth, dt, 14 * 5760, 22);
        const MleFit fit = fit_mjd(series, options);
        CHECK(std::abs(fit.params.diffusion.sigma - truth.diffusion.sigma) /
                  truth.diffusion.sigma < 0.10);
        CHECK(std::abs(fit.params.jumps.lambda - truth.jumps.lambda) / truth.jumps.lambda < 0.25);
        CHECK(std::abs(fit.params.jumps.sigma - truth.jumps.sigma) / truth.jumps.sigma < 0.15);
        CHECK(fit.converged);
    }
}

TEST_CASE("delta extraction") {
    const FeeParams fees{0.997};
    SUBCASE("closed loop at known sigma_delta") {
        // generate NT1 trades against a static pool, then recover delta
        Rng rng = make_substream(31, 0);
        const double sigma_delta = 0.02;
        PoolState pool{7.837622e4, 1.423880e8};
        PricePath refs;
        std::vector<TradeRecord> trades;
        std::vector<double> truth;
        const double p = pool_implied_price(pool);
        double t = 0.0;
        refs.times.push_back(t);
        refs.prices.push_back(p);
        for (int i = 0; i < 20000; ++i) {
            t += 1e-4;
            const double p_tilde = nt1_tilde_price(p, sigma_delta, rng);
            const Fill fill = optimal_trade(pool, p_tilde, fees);
            if (!fill.is_zero()) {
                trades.push_back({t, fill.u_x, fill.u_y, pool.x, pool.y});
                truth.push_back(p_tilde / p - 1.0);
            }
        }
        refs.times.push_back(t + 1e-4);
        refs.prices.push_back(p);
        REQUIRE(trades.size() > 1000);
        std::size_t skipped = 99;
        const auto deltas = extract_delta_samples(trades, refs, fees, &skipped);
        CHECK(skipped == 0);
        REQUIRE(deltas.size() == trades.size());
        for (std::size_t i = 0; i < deltas.size(); ++i)
            CHECK(deltas[i] == doctest::Approx(truth[i]).epsilon(1e-9));
        // censored stddev undershoots sigma_delta but stays the same order
        const double sd = std::sqrt(testutil::sample_variance(deltas));
        CHECK(sd > 0.5 * sigma_delta);
        CHECK(sd < 1.5 * sigma_delta);
    }
    SUBCASE("fee-free trade at the reference price implies delta zero") {
        PoolState pool{10.0, 10000.0};
        const FeeParams no_fee{1.0};
        const Fill fill = optimal_trade(pool, 1010.0, no_fee);
        PricePath refs{{0.0, 1.0}, {1010.0, 1010.0}};
        const auto deltas = extract_delta_samples({{0.5, fill.u_x, fill.u_y, pool.x, pool.y}},
                                                  refs, no_fee);
        REQUIRE(deltas.size() == 1);
        CHECK(deltas[0] == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("trades outside coverage are skipped and counted") {
        PricePath refs{{0.0, 1.0}, {100.0, 100.0}};
        std::size_t skipped = 0;
        const auto deltas = extract_delta_samples({{5.0, -1.0, 90.0, 10.0, 1000.0}}, refs,
                                                  fees, &skipped);
        CHECK(deltas.empty());
        CHECK(skipped == 1);
    }
    SUBCASE("arb-generated deltas concentrate just outside the fee band") {
        Rng rng = make_substream(32, 0);
        const MJDParams mjd = MJDParams::risk_neutral(0.080128, 0.0, 0.0);
        PoolState pool{7.837622e4, 1.423880e8};
        PricePath refs;
        std::vector<TradeRecord> trades;
        double p = pool_implied_price(pool);
        const double dt = 15.0 / 86400.0;
        refs.times.push_back(0.0);
        refs.prices.push_back(p);
        for (int i = 1; i <= 50000; ++i) {
            p = step_price(p, mjd, dt, rng);
            refs.times.push_back(i * dt);
            refs.prices.push_back(p);
            const Fill fill = optimal_trade(pool, p, fees);
            if (fill.is_zero()) continue;
            trades.push_back({i * dt, fill.u_x, fill.u_y, pool.x, pool.y});
            pool = apply_trade(pool, fill);
        }
        REQUIRE(trades.size() > 500);
        const auto deltas = extract_delta_samples(trades, refs, fees, nullptr);
        const double band = -std::log(fees.gamma);
        for (std::size_t i = 0; i < trades.size(); ++i) {
            // relative to the reference price the arb's implied delta is ~0,
            // which is what the 1bp arb-attribution threshold keys on
            CHECK(std::abs(deltas[i]) < 1e-6);
            // relative to the pre-trade pool price the deviation sits outside
            // the fee band: censoring geometry of executed trades
            const PoolState pre{trades[i].x, trades[i].y};
            const double p_tilde = invert_trade(pre, {trades[i].u_x, trades[i].u_y}, fees);
            CHECK(std::abs(std::log(p_tilde / pool_implied_price(pre))) > 0.999 * band);
        }
    }
}

TEST_CASE("arrival rate calibration") {
    SUBCASE("bisection against a deterministic censoring curve") {
        auto simulated = [](double lambda) { return 0.4 * lambda; };
        const double lambda = calibrate_arrival_rate(1000.0, simulated, 1.0, 1e5, 0.001);
        CHECK(lambda == doctest::Approx(2500.0).epsilon(0.01));
    }
    SUBCASE("unreachable target reports the bracket") {
        auto simulated = [](double lambda) { return 0.01 * lambda; };
        CHECK_THROWS_AS(calibrate_arrival_rate(1000.0, simulated, 1.0, 10.0, 0.02),
                        std::runtime_error);
    }
    SUBCASE("censoring-free model needs lambda close to the observed rate") {
        SimConfig base;
        base.mjd = MJDParams::risk_neutral(0.080128, 0.0, 0.0);
        base.fees = FeeParams{0.997};
        base.arb = ArbParams{};
        base.nt1 = NT1Params{0.0, 0.5};  // sigma_delta >> band: almost no censoring
        base.trials = 4;
        base.horizon_days = 1.0;
        base.seed = 40;
        const double observed = 2000.0;
        const double lambda = calibrate_arrival_rate(
            observed, [&](double l) { return simulated_nt1_trade_rate(base, l); }, 100.0, 20000.0);
        CHECK(lambda == doctest::Approx(observed).epsilon(0.10));
    }
    SUBCASE("table (c) parameters are heavily censored") {
        SimConfig base;
        base.mjd = MJDParams::risk_neutral(0.080128, 1.070119, 0.013545);
        base.fees = FeeParams{0.997};
        base.arb = ArbParams{};
        base.nt1 = NT1Params{955.552632, 0.004034};
        base.trials = 8;
        base.horizon_days = 1.0;
        base.seed = 41;
        const double rate = simulated_nt1_trade_rate(base, base.nt1->lambda);
        CHECK(rate < base.nt1->lambda);
        CHECK(rate > 0.0);
    }
}

TEST_CASE("nt2 fit") {
    const FeeParams fees{0.997};
    SUBCASE("single trade over one day") {
        PricePath refs{{0.0, 1.0}, {1000.0, 1000.0}};
        PoolState pool{10.0, 10000.0};
        Rng rng = make_substream(50, 0);
        // a noise trade of 100 numeraire
        NT2Params one{1.0, 1.0};
        Fill fill;
        fill.u_y = -100.0;
        fill.u_x = pool.x - pool.x * pool.y / (pool.y + fees.gamma * 100.0);
        const NT2Params fit =
            fit_nt2({{0.5, fill.u_x, fill.u_y, pool.x, pool.y}}, refs, fees);
        CHECK(fit.size_scale == doctest::Approx(100.0));
        CHECK(fit.rate == doctest::Approx(1.0));
    }
    SUBCASE("closed loop on a synthetic NT2 stream") {
        Rng rng = make_substream(51, 0);
        const NT2Params truth{2000.0, 14096.0};
        PoolState pool{7.837622e4, 1.423880e8};
        const double p = pool_implied_price(pool);
        PricePath refs{{0.0, 5.0}, {p, p}};
        std::vector<TradeRecord> trades;
        for (double t : sample_arrivals(truth.rate, 5.0, rng)) {
            const Fill fill = nt2_fill(pool, truth, fees, rng);
            trades.push_back({t, fill.u_x, fill.u_y, pool.x, pool.y});
        }
        const NT2Params fit = fit_nt2(trades, refs, fees);
        CHECK(std::abs(fit.size_scale - truth.size_scale) / truth.size_scale < 0.05);
        CHECK(std::abs(fit.rate - truth.rate) / truth.rate < 0.05);
    }
    SUBCASE("empty input is an error") {
        PricePath refs{{0.0, 1.0}, {1.0, 1.0}};
        CHECK_THROWS_AS(fit_nt2({}, refs, fees), std::invalid_argument);
    }
}
