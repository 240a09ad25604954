#include "cfmmlab/price_process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfmm {

void MJDParams::validate() const {
    if (!(diffusion.sigma >= 0.0)) throw std::invalid_argument("sigma_d must be >= 0");
    if (!(jumps.lambda >= 0.0)) throw std::invalid_argument("lambda_j must be >= 0");
    if (!(jumps.sigma >= 0.0)) throw std::invalid_argument("sigma_j must be >= 0");
    if (!std::isfinite(diffusion.mu) || !std::isfinite(jumps.mu))
        throw std::invalid_argument("drift parameters must be finite");
}

void PricePath::validate() const {
    if (times.size() != prices.size())
        throw std::invalid_argument("price path: times/prices length mismatch");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(prices[i] > 0.0)) throw std::invalid_argument("price path: nonpositive price");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("price path: times not strictly increasing");
    }
}

double PricePath::interpolate(double t) const {
    if (!covers(t)) throw std::out_of_range("price path: time outside coverage");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi == 0) return prices.front();
    if (times[hi] == t) return prices[hi];
    std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return std::exp((1.0 - w) * std::log(prices[lo]) + w * std::log(prices[hi]));
}

double jump_compensator(const JumpParams& jumps) {
    return std::expm1(jumps.mu + 0.5 * jumps.sigma * jumps.sigma);
}

double sample_log_return(const MJDParams& params, double dt, Rng& rng) {
    const auto& d = params.diffusion;
    const auto& j = params.jumps;
    const double k = jump_compensator(j);
    const int n = sample_poisson(j.lambda * dt, rng);
    const double var = d.sigma * d.sigma * dt + n * j.sigma * j.sigma;
    const double drift = (d.mu - 0.5 * d.sigma * d.sigma - j.lambda * k) * dt + n * j.mu;
    if (var == 0.0) return drift;  // degenerate: no draw consumed
    return drift + std::sqrt(var) * normal01(rng);
}

double step_price(double p, const MJDParams& params, double dt, Rng& rng) {
    return p * std::exp(sample_log_return(params, dt, rng));
}

double log_return_variance(const MJDParams& params, double dt) {
    const auto& d = params.diffusion;
    const auto& j = params.jumps;
    return (d.sigma * d.sigma + j.lambda * (j.mu * j.mu + j.sigma * j.sigma)) * dt;
}

}  // namespace cfmm
