#pragma once

#include <cstddef>
#include <vector>

#include "cfmmlab/rng.hpp"

namespace cfmm {

// All rates and times are denominated in days; a 15-second block is 15/86400.

struct DiffusionParams {
    double mu = 0.0;     // drift per day
    double sigma = 0.0;  // volatility per sqrt(day)
};

struct JumpParams {
    double lambda = 0.0;  // expected jumps per day
    double mu = 0.0;      // mean log jump size
    double sigma = 0.0;   // stddev of log jump size
};

struct MJDParams {
    DiffusionParams diffusion;
    JumpParams jumps;

    // Risk-neutral variant: drift terms pinned to zero.
    static MJDParams risk_neutral(double sigma_d, double lambda_j, double sigma_j) {
        return MJDParams{{0.0, sigma_d}, {lambda_j, 0.0, sigma_j}};
    }

    void validate() const;
};

// Reference price series; times strictly increasing, prices strictly positive.
struct PricePath {
    std::vector<double> times;   // days
    std::vector<double> prices;

    void validate() const;
    bool covers(double t) const {
        return !times.empty() && t >= times.front() && t <= times.back();
    }
    // Interpolate log-linearly in price at time t (t must be covered).
    double interpolate(double t) const;
};

// k = E[y - 1] = exp(mu_J + sigma_J^2 / 2) - 1
double jump_compensator(const JumpParams& jumps);

// One log return over dt: (mu_D - sigma_D^2/2 - lambda k) dt + N mu_J
// + sqrt(sigma_D^2 dt + N sigma_J^2) Z, with N ~ Poisson(lambda dt).
double sample_log_return(const MJDParams& params, double dt, Rng& rng);

// p * exp(log return); strictly positive for p > 0.
double step_price(double p, const MJDParams& params, double dt, Rng& rng);

// Var(log return) = (sigma_D^2 + lambda (mu_J^2 + sigma_J^2)) dt
double log_return_variance(const MJDParams& params, double dt);

}  // namespace cfmm
