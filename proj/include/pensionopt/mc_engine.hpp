#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pensionopt/core_model.hpp"
#include "pensionopt/pde_engine.hpp"

namespace pensionopt {

struct McSpec {
    std::size_t n_paths = 200'000;
    int steps_per_year = 1;      // sub-steps; exercise and contributions stay annual
    std::uint64_t seed = 20'240'601;
    bool antithetic = true;
    int basis_degree = 3;        // LSMC monomial degree in moneyness
    unsigned workers = 0;        // 0 = hardware concurrency; results do not depend on it
};

void validate(const McSpec& spec);

/// Random-number streams. The underpin pricer and the LSMC pricing pass share
/// kPricingStream so their estimates use common random numbers.
inline constexpr std::uint64_t kRegressionStream = 0;
inline constexpr std::uint64_t kPricingStream = 1;

/// Annual paths from start_year to T. Wealth follows W_{t+1} = (W_t + c L_t) S_{t+1}/S_t.
struct PathBatch {
    int start_year = 0;
    int horizon = 0;  // years simulated, T - start_year
    std::size_t n_paths = 0;
    bool stochastic_salary = false;
    std::vector<double> growth;  // n_paths x horizon: S_{t+1}/S_t
    std::vector<double> wealth;  // n_paths x (horizon + 1): W_t
    std::vector<double> salary;  // years start_year-1 .. T; per path when stochastic

    double growth_at(std::size_t path, int k) const {
        return growth[path * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(k)];
    }
    /// Wealth at calendar year start_year + k.
    double wealth_at(std::size_t path, int k) const {
        return wealth[path * static_cast<std::size_t>(horizon + 1) + static_cast<std::size_t>(k)];
    }
    /// Salary L_year for year in [start_year - 1, T].
    double salary_at(std::size_t path, int year) const {
        const auto idx = static_cast<std::size_t>(year - start_year + 1);
        return stochastic_salary ? salary[path * static_cast<std::size_t>(horizon + 2) + idx] : salary[idx];
    }
};

/// Exact lognormal annual steps under the risk-neutral measure. With a stochastic
/// salary, log L moves with drift mu_L - sigma_L^2/2 and correlation rho to the equity
/// driver. Antithetic pairs (2k, 2k+1) mirror both drivers.
PathBatch simulate(const McSpec& spec, const PlanParams& p, const MarketParams& m, double w0,
                   int start_year = 0, SalaryVariant salary = SalaryVariant::DeterministicSalary,
                   std::uint64_t stream = kPricingStream);

enum class UnderpinForm {
    Call,         // E[e^{-rT} (W_T - K_T)^+]
    PutParity     // E[e^{-rT} (K_T - W_T)^+] + dc - db
};

/// DB-underpin cost in excess of the DB plan, annual contributions, W_0 = 0.
PriceEstimate price_underpin_mc(const McSpec& spec, const PlanParams& p, const MarketParams& m,
                                UnderpinForm form = UnderpinForm::Call);

struct LsmcDiagnostics {
    std::vector<int> years;                  // t0 .. T
    std::vector<double> exercise_fraction;   // share of pricing paths stopping at each year
    std::vector<double> r_squared;           // regression fit per year (NaN where none)
    std::vector<char> fallback;              // regression replaced by mean continuation
    std::vector<std::size_t> regression_paths;
};

struct LsmcResult {
    PriceEstimate option;   // Bermudan underpin value at (t0, w0)
    double db_pv = 0.0;     // value at t0 of the retirement benefit
    double full_cost = 0.0; // db_pv + option - w0
    LsmcDiagnostics diagnostics;
};

/// Least-squares Monte Carlo on annual exercise dates {t0, ..., T}: regression
/// paths fit the continuation value, an independent set of paths prices the fitted
/// policy (low-biased estimate).
LsmcResult price_bermudan_lsmc(const McSpec& spec, const PlanParams& p, const MarketParams& m,
                               int t0 = 0, double w0 = 0.0);

/// Exercise strike at integer year t: t b a L_{t-1} e^{-gamma (T - t)}.
double discrete_strike(int year, double salary_prev, const PlanParams& p, const MarketParams& m);

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean and standard error of per-path samples; antithetic pairs are averaged first.
SampleStats sample_stats(const std::vector<double>& samples, bool antithetic);

}  // namespace pensionopt
