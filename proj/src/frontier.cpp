#include "pensionopt/frontier.hpp"

#include <algorithm>
#include <cmath>

#include "pensionopt/numerics.hpp"

namespace pensionopt {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::AllFinite: return "AllFinite";
        case Regime::PartiallyInfinite: return "PartiallyInfinite";
        case Regime::DegenerateEuropean: return "DegenerateEuropean";
        case Regime::KnifeEdge: return "KnifeEdge";
    }
    return "Unknown";
}

namespace {

constexpr double kKnifeEdgeTol = 1e-12;

// Real-time extension of f; salaries L_t = e^{mu t}, L_{t-1} = e^{mu (t-1)}.
double f_real(double t, const PlanParams& p, const MarketParams& m) {
    const double ba = accrual_value(p);
    const double g = abo_discount_rate(p, m);
    const double l_t = std::exp(m.mu_l * t);
    const double l_prev = std::exp(m.mu_l * (t - 1.0));
    return (t + 1.0) * ba * l_t * std::exp(-g * (p.T - t - 1.0) - m.r) -
           t * ba * l_prev * std::exp(-g * (p.T - t)) - p.c * l_t;
}

int integer_horizon(const PlanParams& p) {
    if (!is_integer_year(p.T)) throw std::invalid_argument("discrete classification needs integer T");
    return static_cast<int>(std::round(p.T));
}

}  // namespace

double f_discrete(int t, const PlanParams& p, const MarketParams& m) {
    const int T = integer_horizon(p);
    if (t < 0 || t > T - 1) throw std::invalid_argument("f_discrete: t must lie in [0, T-1]");
    return f_real(t, p, m);
}

double h_discrete(double t, const PlanParams& p, const MarketParams& m) {
    return f_real(t, p, m) * std::exp(-m.mu_l * t);
}

bool discrete_degenerate_condition(const PlanParams& p, const MarketParams& m) {
    const double e = std::exp(-m.mu_l);
    return p.c > accrual_value(p) * ((1.0 - e) * p.T + e) * std::exp(-m.r);
}

BoundaryClass classify_discrete(const PlanParams& p, const MarketParams& m) {
    validate(p);
    validate(m);
    const int T = integer_horizon(p);
    BoundaryClass bc;
    const double f0 = f_real(0.0, p, m);
    bc.ratio = p.c / (f0 + p.c);

    if (std::abs(bc.ratio - 1.0) < kKnifeEdgeTol) {
        bc.regime = Regime::KnifeEdge;
        bc.t_star = 0;
        bc.t_prime = 0.0;
        return bc;
    }
    if (bc.ratio < 1.0) {
        bc.regime = Regime::AllFinite;
        return bc;
    }

    int t_star = 0;
    for (int t = 0; t <= T - 1; ++t)
        if (f_real(t, p, m) <= 0.0) t_star = t;
    bc.t_star = t_star;
    bc.regime = t_star == T - 1 ? Regime::DegenerateEuropean : Regime::PartiallyInfinite;

    const auto roots = scan_roots([&](double s) { return h_discrete(s, p, m); }, 0.0, p.T);
    for (const auto& rc : roots) {
        if (rc.rising) bc.t_prime = rc.root;
    }
    if (bc.t_prime && *bc.t_prime <= T - 1) {
        bc.root_scan_mismatch = static_cast<int>(std::floor(*bc.t_prime)) != t_star;
    }
    return bc;
}

double f_continuous(double t, const PlanParams& p, const MarketParams& m, SalaryVariant variant) {
    const RatioModel model = build_ratio_model(p, m, variant);
    const double g = model.strike.gamma;
    const double k = model.strike(t);
    const double k_prime = model.strike.accrual * std::exp(-g * (p.T - t)) * (1.0 + g * t);
    return k_prime - model.discount_coeff * k - p.c;
}

BoundaryClass classify_continuous(const PlanParams& p, const MarketParams& m, SalaryVariant variant) {
    validate(p);
    validate(m);
    auto f = [&](double t) { return f_continuous(t, p, m, variant); };
    BoundaryClass bc;
    const double f0 = f(0.0);
    bc.ratio = p.c / (f0 + p.c);

    if (std::abs(bc.ratio - 1.0) < kKnifeEdgeTol) {
        bc.regime = Regime::KnifeEdge;
        bc.t_prime = 0.0;
        return bc;
    }
    const auto roots = scan_roots(f, 0.0, p.T);
    for (const auto& rc : roots)
        if (rc.rising) bc.t_prime = rc.root;

    if (f(p.T) < 0.0) {
        bc.regime = Regime::DegenerateEuropean;
        bc.t_prime.reset();
    } else if (bc.t_prime) {
        bc.regime = Regime::PartiallyInfinite;
    } else {
        bc.regime = Regime::AllFinite;
    }
    return bc;
}

Frontier extract_frontier(const ValueSurface& surface, const PlanParams& p, const MarketParams& m) {
    validate(p);
    validate(m);
    if (!surface.converged)
        throw NonConvergenceError("extract_frontier: value surface did not converge");
    if (!surface.early_exercise)
        throw std::invalid_argument("extract_frontier: surface was solved without early exercise");

    Frontier fr;
    const std::size_t nt = surface.times.size();
    fr.times = surface.times;
    fr.phi.assign(nt, kInfiniteBoundary);
    for (std::size_t j = 0; j < nt; ++j) {
        const double t = surface.times[j];
        const double k = surface.strike(t);
        if (j + 1 == nt) {
            fr.phi[j] = k;
            continue;
        }
        const auto v = surface.level(j);
        for (std::size_t i = 0; i < surface.y.size(); ++i) {
            const double ve = surface.y[i] - k;
            if (ve <= 0.0) continue;
            if (std::abs(v[i] - ve) <= frontier_tolerance(v[i])) {
                fr.phi[j] = surface.y[i];
                break;
            }
        }
    }
    return fr;
}

}  // namespace pensionopt
