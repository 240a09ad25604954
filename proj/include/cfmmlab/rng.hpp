#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cfmm {

using Rng = std::mt19937_64;

namespace detail {
// splitmix64; used only to decorrelate substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Per-trial substream: (master seed, stream index) -> independent generator.
// Trials are reproducible regardless of execution order or thread count.
inline Rng make_substream(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t s = master_seed;
    std::uint64_t a = detail::splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL + stream * 0xd1342543de82ef95ULL;
    std::uint64_t b = detail::splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double normal01(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

// Exact Poisson sampling by CDF inversion. Intended for small means (block-scale
// intensities are << 1); falls back to std::poisson_distribution above 30.
// mean == 0 returns 0 without consuming randomness, so lambda = 0 paths draw the
// same uniforms as a jump-free stepper.
inline int sample_poisson(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) return std::poisson_distribution<int>(mean)(rng);
    const double u = uniform01(rng);
    double p = std::exp(-mean);
    double cum = p;
    int k = 0;
    while (u > cum && k < 1024) {
        ++k;
        p *= mean / k;
        cum += p;
    }
    return k;
}

}  // namespace cfmm
