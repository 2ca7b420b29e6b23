#pragma once

#include <optional>

#include "pensionopt/core_model.hpp"

namespace pensionopt {

/// Florida second-election option priced in closed form. extra_cost is net of the
/// plain DB present value.
struct FseResult {
    double extra_cost = 0.0;
    double t_star = 0.0;             // optimal switching time, within [t, T]
    std::optional<double> t_prime;   // unclamped root of the first-order condition
    bool t_star_at_start = false;    // optimum is an immediate switch (t* = t)
};

// Stochastic (hedgeable) salary, continuous contributions. Discounting at r.
FseResult fse_stoch_cont(double t, double l, const PlanParams& p, const MarketParams& m);

// Deterministic salary growing at mu_L, ABO discounted at gamma.
FseResult fse_det_cont(double t, double l, const PlanParams& p, const MarketParams& m);

// Annual contributions and annual switching dates; exhaustive over t* in {t, ..., T}.
FseResult fse_discrete(int t, double l, const PlanParams& p, const MarketParams& m);

struct Bs1Result {
    double value = 0.0;     // continuation value at T-1
    double d1 = 0.0;
    double d2 = 0.0;
    double exercise = 0.0;  // immediate exercise value at T-1
    double v = 0.0;         // max(exercise, value)
};

/// One-period Black-Scholes continuation value of the Bermudan underpin at T-1,
/// deterministic salary, DC balance w just before the final contribution.
Bs1Result bs_one_period(double w, const PlanParams& p, const MarketParams& m);

}  // namespace pensionopt
