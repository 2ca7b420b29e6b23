#include "pensionopt/mc_engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pensionopt/parallel.hpp"

namespace pensionopt {

void validate(const McSpec& spec) {
    if (spec.n_paths < 2) throw std::invalid_argument("mc.n_paths: must be >= 2");
    if (spec.antithetic && spec.n_paths % 2 != 0)
        throw std::invalid_argument("mc.n_paths: must be even with antithetic sampling");
    if (spec.steps_per_year < 1) throw std::invalid_argument("mc.steps_per_year: must be >= 1");
    if (spec.basis_degree < 1 || spec.basis_degree > 6)
        throw std::invalid_argument("mc.basis_degree: must lie in [1, 6]");
}

double discrete_strike(int year, double salary_prev, const PlanParams& p, const MarketParams& m) {
    return year * accrual_value(p) * salary_prev * std::exp(-abo_discount_rate(p, m) * (p.T - year));
}

SampleStats sample_stats(const std::vector<double>& samples, bool antithetic) {
    SampleStats st;
    if (samples.empty()) return st;
    const std::size_t group = antithetic ? 2 : 1;
    const std::size_t n = samples.size() / group;
    // Welford update
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double x = samples[k * group];
        if (antithetic) x = 0.5 * (x + samples[k * group + 1]);
        const double d = x - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (x - mean);
    }
    st.mean = mean;
    if (n > 1) st.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    return st;
}

namespace {

// Deterministic salary e^{mu_L t}, also defined for t = -1 (enters only multiplied by t = 0).
double salary_path(double t, const MarketParams& m) { return std::exp(m.mu_l * t); }

int integer_years(const PlanParams& p) {
    if (!is_integer_year(p.T)) throw std::invalid_argument("plan.T: Monte Carlo needs an integer horizon");
    return static_cast<int>(std::round(p.T));
}

}  // namespace

PathBatch simulate(const McSpec& spec, const PlanParams& p, const MarketParams& m, double w0,
                   int start_year, SalaryVariant salary, std::uint64_t stream) {
    validate(spec);
    validate(p);
    validate(m);
    const int T = integer_years(p);
    if (start_year < 0 || start_year >= T) throw std::invalid_argument("simulate: start year must lie in [0, T)");
    if (w0 < 0.0) throw std::invalid_argument("simulate: w0 must be >= 0");

    PathBatch b;
    b.start_year = start_year;
    b.horizon = T - start_year;
    b.n_paths = spec.n_paths;
    b.stochastic_salary = salary == SalaryVariant::StochasticHedgeable && m.sigma_l > 0.0;
    const auto H = static_cast<std::size_t>(b.horizon);
    b.growth.resize(b.n_paths * H);
    b.wealth.resize(b.n_paths * (H + 1));
    const std::size_t n_sal = H + 2;
    b.salary.resize(b.stochastic_salary ? b.n_paths * n_sal : n_sal);
    if (!b.stochastic_salary) {
        for (std::size_t k = 0; k < n_sal; ++k)
            b.salary[k] = salary_path(start_year - 1.0 + static_cast<double>(k), m);
    }

    const int sub = spec.steps_per_year;
    const double dt = 1.0 / sub;
    const double s_drift = (m.r - 0.5 * m.sigma_s * m.sigma_s) * dt;
    const double s_vol = m.sigma_s * std::sqrt(dt);
    const double l_drift = (m.mu_l - 0.5 * m.sigma_l * m.sigma_l) * dt;
    const double l_vol = m.sigma_l * std::sqrt(dt);
    const double rho_perp = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));
    const std::size_t group = spec.antithetic ? 2 : 1;
    const std::size_t n_groups = b.n_paths / group;
    const std::size_t draws_per_year = static_cast<std::size_t>(sub) * (b.stochastic_salary ? 2 : 1);

    parallel_for_chunks(n_groups, spec.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(draws_per_year);
        for (std::size_t gidx = begin; gidx < end; ++gidx) {
            auto rng = substream(spec.seed, stream, gidx);
            std::normal_distribution<double> normal;
            // Per-path state for the pair.
            double w[2], l[2];
            for (std::size_t a = 0; a < group; ++a) {
                const std::size_t path = gidx * group + a;
                w[a] = w0;
                l[a] = salary_path(start_year, m);
                b.wealth[path * (H + 1)] = w0;
                if (b.stochastic_salary) {
                    b.salary[path * n_sal] = salary_path(start_year - 1.0, m);
                    b.salary[path * n_sal + 1] = l[a];
                }
            }
            for (std::size_t k = 0; k < H; ++k) {
                for (auto& x : z) x = normal(rng);
                for (std::size_t a = 0; a < group; ++a) {
                    const double sign = a == 0 ? 1.0 : -1.0;
                    const std::size_t path = gidx * group + a;
                    const double l_now = b.stochastic_salary ? l[a] : b.salary[k + 1];
                    double log_s = 0.0, log_l = 0.0;
                    for (int s = 0; s < sub; ++s) {
                        const double zs = sign * z[static_cast<std::size_t>(s) * (b.stochastic_salary ? 2 : 1)];
                        log_s += s_drift + s_vol * zs;
                        if (b.stochastic_salary) {
                            const double zp = sign * z[static_cast<std::size_t>(s) * 2 + 1];
                            log_l += l_drift + l_vol * (m.rho * zs + rho_perp * zp);
                        }
                    }
                    const double growth = std::exp(log_s);
                    w[a] = (w[a] + p.c * l_now) * growth;
                    b.growth[path * H + k] = growth;
                    b.wealth[path * (H + 1) + k + 1] = w[a];
                    if (b.stochastic_salary) {
                        l[a] *= std::exp(log_l);
                        b.salary[path * n_sal + k + 2] = l[a];
                    }
                }
            }
        }
    });
    return b;
}

PriceEstimate price_underpin_mc(const McSpec& spec, const PlanParams& p, const MarketParams& m,
                                UnderpinForm form) {
    const PathBatch batch = simulate(spec, p, m, 0.0, 0, SalaryVariant::DeterministicSalary, kPricingStream);
    const int T = batch.horizon;
    const double disc = std::exp(-m.r * T);
    const double parity = form == UnderpinForm::PutParity
                              ? dc_cost(p, m, AboMode::DiscreteFinalYear) - db_cost(p, m, AboMode::DiscreteFinalYear)
                              : 0.0;
    std::vector<double> samples(batch.n_paths);
    for (std::size_t i = 0; i < batch.n_paths; ++i) {
        const double w_t = batch.wealth_at(i, T);
        const double k_t = discrete_strike(T, batch.salary_at(i, T - 1), p, m);
        samples[i] = form == UnderpinForm::Call ? disc * std::max(w_t - k_t, 0.0)
                                                : disc * std::max(k_t - w_t, 0.0) + parity;
    }
    const SampleStats st = sample_stats(samples, spec.antithetic);
    return {st.mean, st.std_error, Method::MC};
}

LsmcResult price_bermudan_lsmc(const McSpec& spec, const PlanParams& p, const MarketParams& m, int t0,
                               double w0) {
    const PathBatch fit = simulate(spec, p, m, w0, t0, SalaryVariant::DeterministicSalary, kRegressionStream);
    const int T = t0 + fit.horizon;
    const std::size_t n = fit.n_paths;
    const int n_basis = spec.basis_degree + 1;

    auto basis = [&](double x, double* out) {
        double v = 1.0;
        for (int d = 0; d < n_basis; ++d) {
            out[d] = v;
            v *= x;
        }
    };

    LsmcDiagnostics diag;
    for (int t = t0; t <= T; ++t) diag.years.push_back(t);
    const std::size_t n_dates = diag.years.size();
    diag.exercise_fraction.assign(n_dates, 0.0);
    diag.r_squared.assign(n_dates, std::numeric_limits<double>::quiet_NaN());
    diag.fallback.assign(n_dates, 0);
    diag.regression_paths.assign(n_dates, 0);

    // Fitted continuation per interior date: coefficients, or a constant on fallback.
    std::vector<Eigen::VectorXd> coef(n_dates);
    std::vector<double> fallback_value(n_dates, 0.0);

    std::vector<double> cash(n);
    std::vector<int> stop(n, T);
    for (std::size_t i = 0; i < n; ++i)
        cash[i] = std::max(fit.wealth_at(i, T - t0) - discrete_strike(T, fit.salary_at(i, T - 1), p, m), 0.0);

    std::vector<std::size_t> itm;
    std::vector<double> exercise(n);
    for (int t = T - 1; t > t0; --t) {
        const auto d = static_cast<std::size_t>(t - t0);
        itm.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const double k = discrete_strike(t, fit.salary_at(i, t - 1), p, m);
            exercise[i] = std::max(fit.wealth_at(i, t - t0) - k, 0.0);
            if (exercise[i] > 0.0) itm.push_back(i);
        }
        diag.regression_paths[d] = itm.size();
        if (itm.empty()) continue;

        Eigen::MatrixXd X(static_cast<Eigen::Index>(itm.size()), n_basis);
        Eigen::VectorXd y(static_cast<Eigen::Index>(itm.size()));
        for (std::size_t j = 0; j < itm.size(); ++j) {
            const std::size_t i = itm[j];
            const double k = discrete_strike(t, fit.salary_at(i, t - 1), p, m);
            const double x = fit.wealth_at(i, t - t0) / k;
            double v = 1.0;
            for (int c = 0; c < n_basis; ++c) {
                X(static_cast<Eigen::Index>(j), c) = v;
                v *= x;
            }
            y(static_cast<Eigen::Index>(j)) = std::exp(-m.r * (stop[i] - t)) * cash[i];
        }

        const double mean_y = y.mean();
        bool use_fallback = static_cast<int>(itm.size()) < n_basis;
        Eigen::VectorXd beta;
        if (!use_fallback) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
            if (qr.rank() < n_basis) {
                use_fallback = true;
            } else {
                beta = qr.solve(y);
                const double ss_res = (X * beta - y).squaredNorm();
                const double ss_tot = (y.array() - mean_y).matrix().squaredNorm();
                diag.r_squared[d] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
            }
        }
        diag.fallback[d] = use_fallback ? 1 : 0;
        fallback_value[d] = mean_y;
        if (!use_fallback) coef[d] = beta;

        for (std::size_t j = 0; j < itm.size(); ++j) {
            const std::size_t i = itm[j];
            double cont = mean_y;
            if (!use_fallback) {
                cont = X.row(static_cast<Eigen::Index>(j)).dot(beta);
            }
            if (exercise[i] >= cont) {
                cash[i] = exercise[i];
                stop[i] = t;
            }
        }
    }

    // Exercise at the valuation date is decided against the mean continuation.
    const double k0 = discrete_strike(t0, salary_path(t0 - 1.0, m), p, m);
    const double ex0 = std::max(w0 - k0, 0.0);
    double cont0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) cont0 += std::exp(-m.r * (stop[i] - t0)) * cash[i];
    cont0 /= static_cast<double>(n);
    const bool exercise_now = ex0 > 0.0 && ex0 >= cont0;

    const PathBatch eval = simulate(spec, p, m, w0, t0, SalaryVariant::DeterministicSalary, kPricingStream);
    std::vector<double> samples(n);
    std::vector<std::size_t> stop_count(n_dates, 0);
    std::vector<double> row(static_cast<std::size_t>(n_basis));
    for (std::size_t i = 0; i < n; ++i) {
        if (exercise_now) {
            samples[i] = ex0;
            ++stop_count[0];
            continue;
        }
        int t_stop = T;
        double pay = std::max(eval.wealth_at(i, T - t0) - discrete_strike(T, eval.salary_at(i, T - 1), p, m), 0.0);
        for (int t = t0 + 1; t < T; ++t) {
            const auto d = static_cast<std::size_t>(t - t0);
            const double k = discrete_strike(t, eval.salary_at(i, t - 1), p, m);
            const double w = eval.wealth_at(i, t - t0);
            const double ex = w - k;
            if (ex <= 0.0 || diag.regression_paths[d] == 0) continue;
            double cont = fallback_value[d];
            if (!diag.fallback[d]) {
                basis(w / k, row.data());
                cont = 0.0;
                for (int c = 0; c < n_basis; ++c) cont += coef[d](c) * row[static_cast<std::size_t>(c)];
            }
            if (ex >= cont) {
                t_stop = t;
                pay = ex;
                break;
            }
        }
        samples[i] = std::exp(-m.r * (t_stop - t0)) * pay;
        ++stop_count[static_cast<std::size_t>(t_stop - t0)];
    }
    for (std::size_t d = 0; d < n_dates; ++d) diag.exercise_fraction[d] = static_cast<double>(stop_count[d]) / n;

    const SampleStats st = sample_stats(samples, spec.antithetic);
    LsmcResult res;
    res.option = {st.mean, st.std_error, Method::LSMC};
    res.db_pv = discrete_strike(T, salary_path(T - 1.0, m), p, m) * std::exp(-m.r * (T - t0));
    res.full_cost = res.db_pv + res.option.value - w0;
    res.diagnostics = std::move(diag);
    return res;
}

}  // namespace pensionopt
