#pragma once

#include <optional>
#include <string_view>

namespace pensionopt {

/// Pension design constants. All monetary quantities are per unit of
/// starting salary (L0 = 1).
struct PlanParams {
    double c = 0.125;               // DC contribution rate, fraction of salary per year
    double b = 0.016;               // DB accrual rate per year of service
    double annuity_factor = 14.75;  // value at retirement of 1 per year of pension
    double T = 30.0;                // years to retirement
    std::optional<double> gamma;    // ABO discount rate; market r when unset
};

/// Market and salary dynamics.
struct MarketParams {
    double r = 0.04;        // risk-free rate, continuously compounded
    double sigma_s = 0.15;  // equity volatility
    double mu_l = 0.04;     // deterministic salary growth rate
    double sigma_l = 0.04;  // salary volatility (used only when salary is stochastic)
    double rho = 0.0;       // equity/salary correlation
};

/// Observation of the state at a given service time.
struct StatePoint {
    double t = 0.0;  // elapsed service in years
    double w = 0.0;  // DC account balance
    double l = 1.0;  // current salary rate
};

enum class Method { ClosedForm, MC, LSMC, PDE, Oracle };

std::string_view to_string(Method m);

struct PriceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    Method method = Method::ClosedForm;
};

/// Which salary enters the accrued benefit: L_{t-1} (annual, integer t) or L_t.
enum class AboMode { DiscreteFinalYear, ContinuousCurrent };

/// Throws std::invalid_argument naming the offending field.
void validate(const PlanParams& p);
void validate(const MarketParams& m);

/// Discount rate applied to the accrued benefit obligation.
inline double abo_discount_rate(const PlanParams& p, const MarketParams& m) {
    return p.gamma.value_or(m.r);
}

/// b * annuity_factor, the accrued pension value per year of service per unit salary.
inline double accrual_value(const PlanParams& p) { return p.b * p.annuity_factor; }

/// Deterministic salary L_t = e^{mu_L t}.
double salary_det(double t, const PlanParams& p, const MarketParams& m);

/// Accumulated benefit obligation K_t valued at time t (discounted from T at gamma).
/// Discrete mode uses the salary L_{t-1} and requires integer t.
double abo(double t, const PlanParams& p, const MarketParams& m, AboMode mode);

/// Present value at 0 of the retirement benefit K_T.
double db_cost(const PlanParams& p, const MarketParams& m, AboMode mode);

/// Present value at 0 of all DC contributions up to T.
double dc_cost(const PlanParams& p, const MarketParams& m, AboMode mode);

/// (e^x - 1) / x with the x -> 0 limit.
double expm1_over_x(double x);

/// True when t is an integer within 1e-9.
bool is_integer_year(double t);

}  // namespace pensionopt
