#include "pensionopt/pde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pensionopt/tridiagonal.hpp"

namespace pensionopt {

double StrikeFn::operator()(double t) const { return accrual * t * std::exp(-gamma * (horizon - t)); }

RatioModel build_ratio_model(const PlanParams& p, const MarketParams& m, SalaryVariant variant) {
    validate(p);
    validate(m);
    RatioModel model;
    model.source_coeff = p.c;
    model.strike = {accrual_value(p), abo_discount_rate(p, m), p.T};
    if (variant == SalaryVariant::StochasticHedgeable) {
        const double var = m.sigma_s * m.sigma_s + m.sigma_l * m.sigma_l -
                           2.0 * m.rho * m.sigma_s * m.sigma_l;
        model.sigma_y = std::sqrt(std::max(var, 0.0));
    } else {
        // v(t, w) = L_t u(t, w / L_t) with L_t = e^{mu_L t}
        model.sigma_y = m.sigma_s;
        model.drift_coeff = m.r - m.mu_l;
        model.discount_coeff = m.r - m.mu_l;
    }
    return model;
}

double default_y_max(const PlanParams& p, const MarketParams& m, const RatioModel& model) {
    return 5.0 * std::max(model.strike(p.T), p.c * p.T * std::exp(m.r * p.T));
}

GridSpec resolve_grid(const GridSpec& grid, const PlanParams& p, const MarketParams& m,
                      const RatioModel& model) {
    GridSpec g = grid;
    if (g.y_max <= 0.0) g.y_max = default_y_max(p, m, model);
    if (g.n_t <= 0) g.n_t = static_cast<int>(std::ceil(100.0 * p.T));
    if (!(g.y_max > model.strike(p.T)))
        throw std::invalid_argument("grid.y_max: must exceed the terminal strike k(T)");
    if (g.n_y < 50) throw std::invalid_argument("grid.n_y: must be >= 50");
    if (g.n_t < 4.0 * p.T) throw std::invalid_argument("grid.n_t: must be >= 4 T");
    if (g.penalty < 1e6) throw std::invalid_argument("grid.penalty: must be >= 1e6");
    if (!(g.tol > 0.0)) throw std::invalid_argument("grid.tol: must be > 0");
    if (g.max_iter < 1) throw std::invalid_argument("grid.max_iter: must be >= 1");
    if (g.stretch < 0.0) throw std::invalid_argument("grid.stretch: must be >= 0");
    return g;
}

double ValueSurface::value_at(double y0) const {
    if (y.empty() || values.empty()) throw std::logic_error("ValueSurface: empty surface");
    if (y0 <= y.front()) return at(0, 0);
    if (y0 >= y.back()) return at(0, y.size() - 1);
    const auto it = std::upper_bound(y.begin(), y.end(), y0);
    const std::size_t j = static_cast<std::size_t>(it - y.begin());
    const double wgt = (y0 - y[j - 1]) / (y[j] - y[j - 1]);
    return (1.0 - wgt) * at(0, j - 1) + wgt * at(0, j);
}

namespace {

std::vector<double> make_nodes(double y_max, int n, double stretch) {
    std::vector<double> y(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double xi = static_cast<double>(i) / n;
        y[static_cast<std::size_t>(i)] =
            stretch > 0.0 ? y_max * std::sinh(stretch * xi) / std::sinh(stretch) : y_max * xi;
    }
    y.back() = y_max;
    return y;
}

// Spatial operator A with (A v)_i = lo_i v_{i-1} + di_i v_i + up_i v_{i+1}.
struct Operator {
    std::vector<double> lo, di, up;
};

Operator build_operator(const RatioModel& model, const std::vector<double>& y) {
    const std::size_t n = y.size();
    Operator op{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    const double q = model.discount_coeff;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = y[i] - y[i - 1];
        const double hp = y[i + 1] - y[i];
        const double diff = 0.5 * model.sigma_y * model.sigma_y * y[i] * y[i];
        const double conv = model.drift_coeff * y[i] + model.source_coeff;
        const double dl = 2.0 * diff / (hm * (hm + hp));
        const double du = 2.0 * diff / (hp * (hm + hp));
        double alpha = dl - conv * hp / (hm * (hm + hp));
        double gamma = du + conv * hm / (hp * (hm + hp));
        if (alpha < 0.0) {
            alpha = dl;
            gamma = du + conv / hp;
        } else if (gamma < 0.0) {
            alpha = dl - conv / hm;
            gamma = du;
        }
        op.lo[i] = alpha;
        op.up[i] = gamma;
        op.di[i] = -(alpha + gamma) - q;
    }
    // y = y_max: linear growth, v_yy = 0, leaving a first-order transport equation.
    {
        const double hn = y[n - 1] - y[n - 2];
        const double convn = model.drift_coeff * y[n - 1] + model.source_coeff;
        op.lo[n - 1] = -convn / hn;
        op.di[n - 1] = convn / hn - q;
    }
    // y = 0: the diffusion vanishes and the source term pushes the ratio inward.
    const double h0 = y[1] - y[0];
    const double conv0 = model.source_coeff;
    if (conv0 >= 0.0) {
        op.up[0] = conv0 / h0;
        op.di[0] = -conv0 / h0 - q;
    } else {
        op.di[0] = -q;
    }
    return op;
}

ValueSurface solve(const RatioModel& model, const GridSpec& grid_in, const PlanParams& p,
                   const MarketParams& m, bool early_exercise) {
    const GridSpec grid = resolve_grid(grid_in, p, m, model);
    if (model.sigma_y < 0.0) throw std::invalid_argument("RatioModel: sigma_y must be >= 0");
    if (std::abs(model.drift_coeff - model.discount_coeff) > 1e-14)
        throw std::invalid_argument("solver requires drift_coeff == discount_coeff");

    ValueSurface surf;
    surf.early_exercise = early_exercise;
    surf.strike = model.strike;
    surf.y = make_nodes(grid.y_max, grid.n_y, grid.stretch);
    const std::size_t ny = surf.y.size();
    const int nt = grid.n_t;
    surf.times.resize(static_cast<std::size_t>(nt) + 1);
    for (int j = 0; j <= nt; ++j) surf.times[static_cast<std::size_t>(j)] = p.T * j / nt;
    surf.times.back() = p.T;
    surf.values.assign(surf.times.size() * ny, 0.0);

    const Operator op = build_operator(model, surf.y);

    auto obstacle = [&](double t, std::vector<double>& g) {
        const double k = model.strike(t);
        for (std::size_t i = 0; i < ny; ++i) g[i] = std::max(surf.y[i] - k, 0.0);
    };

    std::vector<double> v(ny), g(ny), rhs(ny), lo(ny), di(ny), up(ny), next(ny), work(ny);
    obstacle(p.T, v);
    std::copy(v.begin(), v.end(), surf.values.begin() + static_cast<std::ptrdiff_t>(nt * ny));

    TridiagonalSolver thomas(ny);
    const double dt = p.T / nt;

    // Advances v from time t_from to t_to = t_from - h with weight theta on the new level.
    auto step = [&](double t_to, double h, double theta) {
        for (std::size_t i = 0; i < ny; ++i) {
            double av = op.di[i] * v[i];
            if (i > 0) av += op.lo[i] * v[i - 1];
            if (i + 1 < ny) av += op.up[i] * v[i + 1];
            rhs[i] = v[i] + (1.0 - theta) * h * av;
            lo[i] = -theta * h * op.lo[i];
            di[i] = 1.0 - theta * h * op.di[i];
            up[i] = -theta * h * op.up[i];
        }

        if (!early_exercise) {
            thomas.solve(lo, di, up, rhs, v);
            return;
        }

        obstacle(t_to, g);
        // Penalty iteration started from the previous level.
        std::copy(v.begin(), v.end(), next.begin());
        int it = 0;
        bool done = false;
        std::vector<char> active(ny, 0), new_active(ny, 0), released(ny, 0);
        for (std::size_t i = 0; i < ny; ++i) active[i] = next[i] < g[i];
        while (it < grid.max_iter && !done) {
            ++it;
            for (std::size_t i = 0; i < ny; ++i) {
                const double pen = active[i] ? grid.penalty : 0.0;
                work[i] = rhs[i] + pen * g[i];
                di[i] += pen;
            }
            thomas.solve(lo, di, up, work, next);
            for (std::size_t i = 0; i < ny; ++i)
                if (active[i]) di[i] -= grid.penalty;

            double change = 0.0;
            bool same = true;
            for (std::size_t i = 0; i < ny; ++i) {
                // a node re-entering the contact set after a release stays there; stops two-cycles
                // where the continuation value touches the obstacle to within the penalty accuracy
                new_active[i] = next[i] < g[i] || (released[i] && active[i]);
                if (active[i] && !new_active[i]) released[i] = 1;
                same = same && new_active[i] == active[i];
            }
            for (std::size_t i = 0; i < ny; ++i)
                change = std::max(change, std::abs(next[i] - v[i]) / std::max(1.0, std::abs(next[i])));
            std::copy(next.begin(), next.end(), v.begin());
            done = same || change < grid.tol;
            active.swap(new_active);
        }
        surf.diagnostics.total_iterations += it;
        surf.diagnostics.max_iterations_in_step = std::max(surf.diagnostics.max_iterations_in_step, it);
        if (!done) {
            ++surf.diagnostics.failed_steps;
            surf.converged = false;
        }
    };

    for (int j = nt - 1; j >= 0; --j) {
        const double t_to = surf.times[static_cast<std::size_t>(j)];
        if (grid.scheme == TimeScheme::Rannacher && j == nt - 1) {
            step(t_to + 0.5 * dt, 0.5 * dt, 1.0);
            step(t_to, 0.5 * dt, 1.0);
        } else {
            step(t_to, dt, 0.5);
        }
        std::copy(v.begin(), v.end(),
                  surf.values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(j) * ny));
    }
    return surf;
}

}  // namespace

ValueSurface solve_bermudan(const RatioModel& model, const GridSpec& grid, const PlanParams& p,
                            const MarketParams& m) {
    return solve(model, grid, p, m, true);
}

ValueSurface solve_european(const RatioModel& model, const GridSpec& grid, const PlanParams& p,
                            const MarketParams& m) {
    return solve(model, grid, p, m, false);
}

}  // namespace pensionopt
