#include "pensionopt/closed_form.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pensionopt/numerics.hpp"

namespace pensionopt {

namespace {

// Maximises objective over [t, T] given the sign of its derivative through
// first_order (same sign as the derivative). Candidates are both end points and every
// falling sign change of first_order.
FseResult maximise_switch_time(double t, double T, const std::function<double(double)>& objective,
                               const std::function<double(double)>& first_order) {
    FseResult res;
    const auto roots = scan_roots(first_order, 0.0, T);
    for (const auto& rc : roots) {
        if (!rc.rising) {
            res.t_prime = rc.root;
            break;
        }
    }

    double best_t = t;
    double best = objective(t);
    auto consider = [&](double s) {
        const double v = objective(s);
        if (v > best) {
            best = v;
            best_t = s;
        }
    };
    for (const auto& rc : roots)
        if (!rc.rising && rc.root > t && rc.root < T) consider(rc.root);
    consider(T);

    res.t_star = best_t;
    res.extra_cost = best;
    res.t_star_at_start = best_t == t;
    return res;
}

void check_time(double t, const PlanParams& p) {
    if (t < 0.0 || t > p.T) throw std::invalid_argument("FSE: t must lie in [0, T]");
}

}  // namespace

FseResult fse_stoch_cont(double t, double l, const PlanParams& p, const MarketParams& m) {
    validate(p);
    validate(m);
    check_time(t, p);
    const double ba = accrual_value(p);
    const double r = m.r;
    const double T = p.T;
    auto objective = [&](double s) { return l * (p.c * (s - t) - s * ba * std::exp(-r * (T - s))); };
    auto first_order = [&](double s) {
        return p.c - ba * std::exp(-r * (T - s)) - r * s * ba * std::exp(-r * (T - s));
    };
    return maximise_switch_time(t, T, objective, first_order);
}

FseResult fse_det_cont(double t, double l, const PlanParams& p, const MarketParams& m) {
    validate(p);
    validate(m);
    check_time(t, p);
    const double ba = accrual_value(p);
    const double x = m.mu_l - m.r;
    const double g = abo_discount_rate(p, m);
    const double T = p.T;
    auto objective = [&](double s) {
        const double grow = std::exp(x * (s - t));
        return l * (p.c * (s - t) * expm1_over_x(x * (s - t)) - s * ba * grow * std::exp(-g * (T - s)));
    };
    auto first_order = [&](double s) {
        const double e = std::exp(-g * (T - s));
        return p.c - ba * e - s * (x + g) * ba * e;
    };
    return maximise_switch_time(t, T, objective, first_order);
}

FseResult fse_discrete(int t, double l, const PlanParams& p, const MarketParams& m) {
    validate(p);
    validate(m);
    if (!is_integer_year(p.T)) throw std::invalid_argument("fse_discrete: T must be an integer");
    const int T = static_cast<int>(std::round(p.T));
    if (t < 0 || t > T) throw std::invalid_argument("fse_discrete: t must lie in [0, T]");
    const double ba = accrual_value(p);
    const double x = m.mu_l - m.r;
    const double g = abo_discount_rate(p, m);

    FseResult res;
    double best = -std::numeric_limits<double>::infinity();
    for (int s = t; s <= T; ++s) {
        const int n = s - t;
        // sum_{u=0}^{n-1} e^{x u}
        const double contrib = std::abs(x) < 1e-12
                                   ? static_cast<double>(n)
                                   : -std::expm1(x * n) / -std::expm1(x);
        const double value = l * (p.c * contrib - s * ba * std::exp(m.mu_l * (s - 1 - t)) *
                                                       std::exp(-m.r * s) * std::exp(-g * (T - s)));
        if (value > best) {
            best = value;
            res.t_star = s;
        }
    }
    res.extra_cost = best;
    res.t_star_at_start = res.t_star == t;
    return res;
}

Bs1Result bs_one_period(double w, const PlanParams& p, const MarketParams& m) {
    validate(p);
    validate(m);
    if (w < 0.0) throw std::invalid_argument("bs_one_period: w must be >= 0");
    const double T = p.T;
    const double ba = accrual_value(p);
    const double l_last = std::exp(m.mu_l * (T - 1.0));
    const double spot = w + p.c * l_last;
    const double strike = ba * T * l_last;
    const double sigma = m.sigma_s;

    Bs1Result res;
    if (spot > 0.0 && sigma > 0.0) {
        res.d1 = (std::log(spot / strike) + (m.r + 0.5 * sigma * sigma)) / sigma;
        res.d2 = res.d1 - sigma;
        res.value = norm_cdf(res.d1) * spot - norm_cdf(res.d2) * strike * std::exp(-m.r);
    } else if (spot > 0.0) {
        const double fwd_gap = spot - strike * std::exp(-m.r);
        res.d1 = res.d2 = fwd_gap >= 0.0 ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
        res.value = std::max(fwd_gap, 0.0);
    } else {
        res.d1 = res.d2 = -std::numeric_limits<double>::infinity();
        res.value = 0.0;
    }
    const double prior_strike =
        T > 1.0 ? ba * (T - 1.0) * std::exp(m.mu_l * (T - 2.0)) * std::exp(-abo_discount_rate(p, m))
                : 0.0;
    res.exercise = std::max(w - prior_strike, 0.0);
    res.v = std::max(res.exercise, res.value);
    return res;
}

}  // namespace pensionopt
