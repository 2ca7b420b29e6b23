#pragma once

#include <vector>

#include "pensionopt/core_model.hpp"

namespace pensionopt {

enum class Interpolation { Linear, MonotoneCubic };

/// How the one-year expectation E[v(t+1, (w + c L_t) G)] is evaluated.
enum class Quadrature {
    ExactLinear,   // closed-form integral of the piecewise-linear interpolant against the lognormal
    GaussHermite   // n_quad-point Gauss-Hermite rule on the interpolant
};

struct OracleSpec {
    double w_max = 0.0;  // 0 selects (w0 + c sum L_t) e^{(r + 5 sigma_S)(T - t0)}, at least 3 K_T
    int n_w = 2000;      // grid intervals
    int n_quad = 32;
    Interpolation interpolation = Interpolation::Linear;
    Quadrature quadrature = Quadrature::ExactLinear;
    double grid_scale = 0.0;    // nodes uniform in asinh(w / grid_scale); 0 selects 0.1 K_T
    bool early_exercise = true; // false: exercise at T only
};

void validate(const OracleSpec& spec);

/// Backward recursion on a wealth grid, annual dates t0..T, deterministic salary.
struct DpSolution {
    int t0 = 0;
    std::vector<double> w;                    // grid nodes (contains the strikes and w0)
    std::vector<std::vector<double>> value;   // value[t - t0][i]
    std::vector<std::vector<char>> exercise;  // v = v^e with v^e > 0

    double value_at(int t, double w0) const;
};

DpSolution dp_solve(int t0, double w0, const OracleSpec& spec, const PlanParams& p, const MarketParams& m);

/// v(t0, w0). std_error holds a refinement error estimate: grid halving for
/// ExactLinear, doubling the quadrature order for GaussHermite.
PriceEstimate dp_value(int t0, double w0, const OracleSpec& spec, const PlanParams& p, const MarketParams& m);

/// Probabilists' Gauss-Hermite rule: sum_k weights[k] f(nodes[k]) ~ E[f(Z)], Z ~ N(0, 1).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int n);

}  // namespace pensionopt
