#include "pensionopt/core_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pensionopt {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::ClosedForm: return "ClosedForm";
        case Method::MC: return "MC";
        case Method::LSMC: return "LSMC";
        case Method::PDE: return "PDE";
        case Method::Oracle: return "Oracle";
    }
    return "Unknown";
}

namespace {
void require(bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}
}  // namespace

void validate(const PlanParams& p) {
    require(std::isfinite(p.c) && p.c > 0.0, "plan.c", "must be > 0");
    require(std::isfinite(p.b) && p.b > 0.0, "plan.b", "must be > 0");
    require(std::isfinite(p.annuity_factor) && p.annuity_factor > 0.0, "plan.annuity_factor",
            "must be > 0");
    require(std::isfinite(p.T) && p.T > 0.0, "plan.T", "must be > 0");
    if (p.gamma) require(std::isfinite(*p.gamma) && *p.gamma >= 0.0, "plan.gamma", "must be >= 0");
}

void validate(const MarketParams& m) {
    require(std::isfinite(m.r) && m.r >= 0.0, "market.r", "must be >= 0");
    require(std::isfinite(m.sigma_s) && m.sigma_s >= 0.0, "market.sigma_s", "must be >= 0");
    require(std::isfinite(m.mu_l), "market.mu_l", "must be finite");
    require(std::isfinite(m.sigma_l) && m.sigma_l >= 0.0, "market.sigma_l", "must be >= 0");
    require(std::isfinite(m.rho) && m.rho >= -1.0 && m.rho <= 1.0, "market.rho",
            "must lie in [-1, 1]");
}

bool is_integer_year(double t) { return std::abs(t - std::round(t)) < 1e-9; }

double expm1_over_x(double x) {
    if (std::abs(x) < 1e-12) return 1.0 + 0.5 * x;
    return std::expm1(x) / x;
}

double salary_det(double t, const PlanParams&, const MarketParams& m) {
    if (t < 0.0) throw std::invalid_argument("salary_det: t must be >= 0");
    return std::exp(m.mu_l * t);
}

double abo(double t, const PlanParams& p, const MarketParams& m, AboMode mode) {
    if (t < 0.0 || t > p.T + 1e-12)
        throw std::invalid_argument("abo: t must lie in [0, T]");
    const double disc = std::exp(-abo_discount_rate(p, m) * (p.T - t));
    if (mode == AboMode::DiscreteFinalYear) {
        if (!is_integer_year(t)) throw std::invalid_argument("abo: discrete mode needs integer t");
        const double ti = std::round(t);
        if (ti == 0.0) return 0.0;
        return accrual_value(p) * ti * std::exp(m.mu_l * (ti - 1.0)) * disc;
    }
    return accrual_value(p) * t * std::exp(m.mu_l * t) * disc;
}

double db_cost(const PlanParams& p, const MarketParams& m, AboMode mode) {
    return abo(p.T, p, m, mode) * std::exp(-m.r * p.T);
}

double dc_cost(const PlanParams& p, const MarketParams& m, AboMode mode) {
    const double x = m.mu_l - m.r;
    if (mode == AboMode::DiscreteFinalYear) {
        if (!is_integer_year(p.T)) throw std::invalid_argument("dc_cost: discrete mode needs integer T");
        const int n = static_cast<int>(std::round(p.T));
        double sum = 0.0;
        for (int t = 0; t < n; ++t) sum += std::exp(x * t);
        return p.c * sum;
    }
    return p.c * p.T * expm1_over_x(x * p.T);
}

}  // namespace pensionopt
