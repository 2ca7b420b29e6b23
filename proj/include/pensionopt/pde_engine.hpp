#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pensionopt/core_model.hpp"

namespace pensionopt {

enum class SalaryVariant { StochasticHedgeable, DeterministicSalary };

/// k(t) = accrual * t * e^{-gamma (T - t)}: the ABO per unit of current salary.
struct StrikeFn {
    double accrual = 0.0;  // b * annuity_factor
    double gamma = 0.0;
    double horizon = 0.0;

    double operator()(double t) const;
};

/// Coefficients of the wealth/salary ratio pricing equation
///   u_t + (drift_coeff * y + source_coeff) u_y + 0.5 sigma_y^2 y^2 u_yy - discount_coeff * u = 0
/// with exercise payoff (y - k(t))^+.
struct RatioModel {
    double sigma_y = 0.0;
    double drift_coeff = 0.0;
    double source_coeff = 0.0;
    double discount_coeff = 0.0;
    StrikeFn strike;
};

RatioModel build_ratio_model(const PlanParams& p, const MarketParams& m, SalaryVariant variant);

enum class TimeScheme { CrankNicolson, Rannacher };

struct GridSpec {
    double y_max = 0.0;   // 0 selects the default truncation
    int n_y = 800;        // number of intervals in y
    int n_t = 0;          // 0 selects 100 steps per year
    double penalty = 1e7;
    double tol = 1e-9;
    int max_iter = 50;    // penalty iterations per time step
    TimeScheme scheme = TimeScheme::Rannacher;
    double stretch = 5.0; // sinh clustering of y nodes towards y = 0; 0 gives a uniform grid
};

/// 5 * max(k(T), c T e^{rT}).
double default_y_max(const PlanParams& p, const MarketParams& m, const RatioModel& model);

/// Fills defaulted fields and checks the grid invariants (throws std::invalid_argument).
GridSpec resolve_grid(const GridSpec& grid, const PlanParams& p, const MarketParams& m,
                      const RatioModel& model);

struct SolverDiagnostics {
    long total_iterations = 0;
    int max_iterations_in_step = 0;
    int failed_steps = 0;  // steps that hit max_iter without converging
};

/// v(t, y) on the solver grid; times ascend from 0 to T.
struct ValueSurface {
    std::vector<double> times;
    std::vector<double> y;
    std::vector<double> values;  // times.size() x y.size(), row per time level
    bool converged = true;
    bool early_exercise = false;
    StrikeFn strike;
    SolverDiagnostics diagnostics;

    std::span<const double> level(std::size_t time_index) const {
        return {values.data() + time_index * y.size(), y.size()};
    }
    double at(std::size_t time_index, std::size_t y_index) const {
        return values[time_index * y.size() + y_index];
    }
    /// Linear interpolation in y at the first time level.
    double value_at(double y0) const;
    PriceEstimate price(double y0 = 0.0) const { return {value_at(y0), 0.0, Method::PDE}; }
};

/// Obstacle problem: continuous exercise against (y - k(t))^+, penalty method.
ValueSurface solve_bermudan(const RatioModel& model, const GridSpec& grid, const PlanParams& p,
                            const MarketParams& m);

/// Same equation without early exercise; the DB-underpin cost over the DB plan.
ValueSurface solve_european(const RatioModel& model, const GridSpec& grid, const PlanParams& p,
                            const MarketParams& m);

}  // namespace pensionopt
