#include "pensionopt/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pensionopt/numerics.hpp"

namespace pensionopt {

void validate(const OracleSpec& spec) {
    if (spec.n_w < 200) throw std::invalid_argument("oracle.n_w: must be >= 200");
    if (spec.n_quad < 16) throw std::invalid_argument("oracle.n_quad: must be >= 16");
    if (spec.w_max < 0.0) throw std::invalid_argument("oracle.w_max: must be >= 0");
    if (spec.grid_scale < 0.0) throw std::invalid_argument("oracle.grid_scale: must be >= 0");
    if (spec.quadrature == Quadrature::ExactLinear && spec.interpolation != Interpolation::Linear)
        throw std::invalid_argument("oracle.interpolation: exact integration needs linear interpolation");
}

GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermiteRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[static_cast<std::size_t>(k)] = v0 * v0;
    }
    return rule;
}

namespace {

constexpr int kMaxHorizon = 10;
constexpr double kTailZ = 9.0;

double salary(double t, const MarketParams& m) { return std::exp(m.mu_l * t); }

double strike(int t, const PlanParams& p, const MarketParams& m) {
    return t * accrual_value(p) * salary(t - 1.0, m) * std::exp(-abo_discount_rate(p, m) * (p.T - t));
}

// Piecewise interpolant of level values, extended linearly beyond the last node.
class Interpolant {
public:
    Interpolant(const std::vector<double>& x, const std::vector<double>& v, Interpolation kind)
        : x_(x), v_(v), kind_(kind) {
        const std::size_t n = x.size();
        tail_slope_ = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
        if (kind == Interpolation::MonotoneCubic) fritsch_carlson();
    }

    double operator()(double q) const {
        const std::size_t n = x_.size();
        if (q >= x_[n - 1]) return v_[n - 1] + tail_slope_ * (q - x_[n - 1]);
        if (q <= x_[0]) return v_[0];
        const std::size_t j = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), q) - x_.begin()) - 1;
        const double h = x_[j + 1] - x_[j];
        const double s = (q - x_[j]) / h;
        if (kind_ == Interpolation::Linear) return v_[j] + s * (v_[j + 1] - v_[j]);
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * v_[j] + (s3 - 2 * s2 + s) * h * d_[j] + (-2 * s3 + 3 * s2) * v_[j + 1] +
               (s3 - s2) * h * d_[j + 1];
    }

private:
    void fritsch_carlson() {
        const std::size_t n = x_.size();
        std::vector<double> delta(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) delta[j] = (v_[j + 1] - v_[j]) / (x_[j + 1] - x_[j]);
        d_.assign(n, 0.0);
        d_[0] = delta[0];
        d_[n - 1] = delta[n - 2];
        for (std::size_t j = 1; j + 1 < n; ++j)
            d_[j] = delta[j - 1] * delta[j] <= 0.0 ? 0.0 : 0.5 * (delta[j - 1] + delta[j]);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            if (delta[j] == 0.0) {
                d_[j] = d_[j + 1] = 0.0;
                continue;
            }
            const double a = d_[j] / delta[j], b = d_[j + 1] / delta[j];
            const double r2 = a * a + b * b;
            if (r2 > 9.0) {
                const double tau = 3.0 / std::sqrt(r2);
                d_[j] = tau * a * delta[j];
                d_[j + 1] = tau * b * delta[j];
            }
        }
    }

    const std::vector<double>& x_;
    const std::vector<double>& v_;
    Interpolation kind_;
    double tail_slope_ = 0.0;
    std::vector<double> d_;
};

// E[v(a G)], G = exp(mu + sigma Z), for v piecewise linear on knots x (x[0] = 0)
// and linear beyond the last knot.
double exact_linear_expectation(const std::vector<double>& x, const std::vector<double>& v, double a,
                                double mu, double sigma) {
    const std::size_t n = x.size();
    const double fwd = a * std::exp(mu + 0.5 * sigma * sigma);
    const double x_lo = a * std::exp(mu - kTailZ * sigma);
    const double x_hi = a * std::exp(mu + kTailZ * sigma);
    std::size_t j_lo = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), x_lo) - x.begin());
    j_lo = j_lo == 0 ? 0 : j_lo - 1;
    std::size_t j_hi = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), x_hi) - x.begin());
    j_hi = std::min(j_hi, n - 1);

    // Partial moments P(X < x) and E[X; X < x], saturated outside the tail window.
    auto moments = [&](std::size_t j, double& f0, double& f1) {
        if (x[j] <= 0.0 || j < j_lo) {
            f0 = f1 = 0.0;
            return;
        }
        const double z = (std::log(x[j] / a) - mu) / sigma;
        f0 = norm_cdf(z);
        f1 = fwd * norm_cdf(z - sigma);
    };

    double total = 0.0;
    double f0_prev, f1_prev;
    moments(j_lo, f0_prev, f1_prev);
    for (std::size_t j = j_lo; j < j_hi; ++j) {
        double f0, f1;
        moments(j + 1, f0, f1);
        const double beta = (v[j + 1] - v[j]) / (x[j + 1] - x[j]);
        const double alpha = v[j] - beta * x[j];
        total += alpha * (f0 - f0_prev) + beta * (f1 - f1_prev);
        f0_prev = f0;
        f1_prev = f1;
    }
    if (j_hi == n - 1) {
        const double slope = (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
        total += (v[n - 1] - slope * x[n - 1]) * (1.0 - f0_prev) + slope * (fwd - f1_prev);
    }
    return total;
}

// Nodes uniform in asinh(w / scale): roughly uniform below scale, geometric above.
std::vector<double> make_grid(double w_max, int n_w, double scale, std::vector<double> extra) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(n_w) + 1 + extra.size());
    const double xi_max = std::asinh(w_max / scale);
    for (int i = 0; i <= n_w; ++i) w.push_back(scale * std::sinh(xi_max * i / n_w));
    w.back() = w_max;
    for (double e : extra)
        if (e > 0.0 && e < w_max) w.push_back(e);
    std::sort(w.begin(), w.end());
    const double eps = 1e-12 * w_max;
    std::vector<double> out;
    for (double x : w)
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    return out;
}

}  // namespace

double DpSolution::value_at(int t, double w0) const {
    const auto& v = value.at(static_cast<std::size_t>(t - t0));
    return Interpolant(w, v, Interpolation::Linear)(w0);
}

DpSolution dp_solve(int t0, double w0, const OracleSpec& spec, const PlanParams& p, const MarketParams& m) {
    validate(spec);
    validate(p);
    validate(m);
    if (!is_integer_year(p.T)) throw std::invalid_argument("plan.T: the oracle needs an integer horizon");
    const int T = static_cast<int>(std::round(p.T));
    if (t0 < 0 || t0 >= T) throw std::invalid_argument("dp_solve: t0 must lie in [0, T)");
    if (T - t0 > kMaxHorizon) throw std::invalid_argument("dp_solve: horizon too long (T - t0 > 10)");
    if (w0 < 0.0) throw std::invalid_argument("dp_solve: w0 must be >= 0");

    std::vector<double> strikes;
    for (int t = t0; t <= T; ++t) strikes.push_back(strike(t, p, m));
    double w_max = spec.w_max;
    if (w_max <= 0.0) {
        double contrib = 0.0;
        for (int t = t0; t < T; ++t) contrib += p.c * salary(t, m);
        w_max = (w0 + contrib) * std::exp((m.r + 5.0 * m.sigma_s) * (T - t0));
        w_max = std::max(w_max, 3.0 * strikes.back());
    }
    if (w0 >= w_max) throw std::invalid_argument("oracle.w_max: must exceed w0");
    std::vector<double> extra = strikes;
    extra.push_back(w0);

    DpSolution sol;
    sol.t0 = t0;
    const double scale = spec.grid_scale > 0.0 ? spec.grid_scale : 0.1 * strikes.back();
    sol.w = make_grid(w_max, spec.n_w, scale, extra);
    const std::size_t n = sol.w.size();
    const auto levels = static_cast<std::size_t>(T - t0 + 1);
    sol.value.assign(levels, std::vector<double>(n, 0.0));
    sol.exercise.assign(levels, std::vector<char>(n, 0));

    for (std::size_t i = 0; i < n; ++i) {
        const double ve = sol.w[i] - strikes.back();
        sol.value.back()[i] = std::max(ve, 0.0);
        sol.exercise.back()[i] = ve > 0.0;
    }

    const double mu = m.r - 0.5 * m.sigma_s * m.sigma_s;
    const double disc = std::exp(-m.r);
    const GaussHermiteRule rule = spec.quadrature == Quadrature::GaussHermite ? gauss_hermite(spec.n_quad)
                                                                              : GaussHermiteRule{};
    for (int t = T - 1; t >= t0; --t) {
        const auto d = static_cast<std::size_t>(t - t0);
        const std::vector<double>& next = sol.value[d + 1];
        const Interpolant interp(sol.w, next, spec.interpolation);
        const double k = strikes[d];
        const double contribution = p.c * salary(t, m);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = sol.w[i] + contribution;
            double expected;
            if (a <= 0.0) {
                expected = next[0];
            } else if (m.sigma_s == 0.0) {
                expected = interp(a * std::exp(m.r));
            } else if (spec.quadrature == Quadrature::ExactLinear) {
                expected = exact_linear_expectation(sol.w, next, a, mu, m.sigma_s);
            } else {
                expected = 0.0;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                    expected += rule.weights[q] * interp(a * std::exp(mu + m.sigma_s * rule.nodes[q]));
            }
            const double hold = disc * expected;
            const double ve = sol.w[i] - k;
            const bool ex = spec.early_exercise && ve > 0.0 && ve >= hold;
            sol.value[d][i] = ex ? ve : hold;
            sol.exercise[d][i] = ex;
        }
    }
    return sol;
}

PriceEstimate dp_value(int t0, double w0, const OracleSpec& spec, const PlanParams& p, const MarketParams& m) {
    const DpSolution fine = dp_solve(t0, w0, spec, p, m);
    const double v = fine.value_at(t0, w0);
    // Coarser companion run for the error estimate; may sit below the n_w floor.
    OracleSpec coarse = spec;
    if (spec.quadrature == Quadrature::GaussHermite) {
        coarse.n_quad = spec.n_quad * 2;
    } else {
        coarse.n_w = std::max(200, spec.n_w / 2);
    }
    double err = 0.0;
    if (coarse.n_w != spec.n_w || coarse.n_quad != spec.n_quad) {
        OracleSpec fixed = coarse;
        if (spec.w_max <= 0.0) fixed.w_max = fine.w.back();
        err = std::abs(dp_solve(t0, w0, fixed, p, m).value_at(t0, w0) - v);
    }
    return {v, err, Method::Oracle};
}

}  // namespace pensionopt
