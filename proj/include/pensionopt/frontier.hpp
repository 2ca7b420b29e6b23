#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pensionopt/core_model.hpp"
#include "pensionopt/pde_engine.hpp"

namespace pensionopt {

/// Raised when a computation depends on a penalty solve that did not converge.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Regime { AllFinite, PartiallyInfinite, DegenerateEuropean, KnifeEdge };

const char* to_string(Regime r);

struct BoundaryClass {
    Regime regime = Regime::AllFinite;
    std::optional<int> t_star;      // last switching date with an infinite boundary (discrete)
    std::optional<double> t_prime;  // real root of the threshold equation
    double ratio = 0.0;             // c / (b a e^{-rT}) at the benchmark discounting
    bool root_scan_mismatch = false;  // floor(t_prime) != integer sign scan
};

/// Limit of exercise minus continuation value as w -> infinity, at integer t in [0, T-1].
double f_discrete(int t, const PlanParams& p, const MarketParams& m);
/// f_discrete(t) e^{-mu_L t}; increasing in t for r, mu_L >= 0.
double h_discrete(double t, const PlanParams& p, const MarketParams& m);

/// True when c > b a ((1 - e^{-mu_L}) T + e^{-mu_L}) e^{-r}: waiting until T is always optimal.
bool discrete_degenerate_condition(const PlanParams& p, const MarketParams& m);

BoundaryClass classify_discrete(const PlanParams& p, const MarketParams& m);

/// Continuous-time classification from the sign of
///   f(t) = k'(t) - q k(t) - c
/// (q the ratio-model discount coefficient), i.e. b a e^{-r(T-t)} (1 + r t) - c
/// for the hedgeable-salary model. Exercise is never optimal where f(t) < 0.
double f_continuous(double t, const PlanParams& p, const MarketParams& m,
                    SalaryVariant variant = SalaryVariant::StochasticHedgeable);
BoundaryClass classify_continuous(const PlanParams& p, const MarketParams& m,
                                  SalaryVariant variant = SalaryVariant::StochasticHedgeable);

inline constexpr double kInfiniteBoundary = std::numeric_limits<double>::infinity();

/// Exercise threshold phi(t) per solver time level; kInfiniteBoundary where no
/// grid node exercises.
struct Frontier {
    std::vector<double> times;
    std::vector<double> phi;

    bool is_infinite(std::size_t i) const { return phi[i] == kInfiniteBoundary; }
};

/// |v - v^e| <= max(1e-8, 1e-6 v) marks an exercising node.
inline double frontier_tolerance(double v) { return std::max(1e-8, 1e-6 * v); }

/// Throws NonConvergenceError for an unconverged surface and std::invalid_argument
/// for a surface solved without early exercise.
Frontier extract_frontier(const ValueSurface& surface, const PlanParams& p, const MarketParams& m);

}  // namespace pensionopt
