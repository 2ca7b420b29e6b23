#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pensionopt/core_model.hpp"

namespace testsupport {

inline pensionopt::PlanParams benchmark_plan(double T = 30.0) {
    pensionopt::PlanParams p;
    p.T = T;
    return p;
}

inline pensionopt::MarketParams benchmark_market() { return pensionopt::MarketParams{}; }

/// Black-Scholes call written out independently of the library's numerics.
inline double bs_call(double spot, double strike, double r, double sigma, double tau) {
    auto N = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + (r + 0.5 * sigma * sigma) * tau) / sd;
    return spot * N(d1) - strike * std::exp(-r * tau) * N(d1 - sd);
}

struct RandomCase {
    pensionopt::PlanParams plan;
    pensionopt::MarketParams market;
};

/// Seeded parameter sets spanning the economically sensible region.
inline std::vector<RandomCase> random_cases(std::size_t n, std::uint64_t seed, double T = 30.0) {
    std::mt19937_64 rng(seed);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    std::vector<RandomCase> out;
    for (std::size_t i = 0; i < n; ++i) {
        RandomCase c;
        c.plan.T = T;
        c.plan.c = u(0.05, 0.3);
        c.plan.b = u(0.008, 0.025);
        c.plan.annuity_factor = u(10.0, 18.0);
        c.market.r = u(0.0, 0.08);
        c.market.mu_l = u(0.0, 0.06);
        c.market.sigma_s = u(0.05, 0.3);
        c.market.sigma_l = u(0.0, 0.1);
        c.market.rho = u(-0.9, 0.9);
        out.push_back(c);
    }
    return out;
}

}  // namespace testsupport
