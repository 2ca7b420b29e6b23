#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace pensionopt {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

inline double norm_pdf(double x) {
    static constexpr double kInvSqrt2Pi = 0.3989422804014327;
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Undiscounted-forward Black-Scholes call: e^{-r tau} E[(S_T - K)^+] with S_T lognormal,
/// forward spot * e^{r tau}. Handles sigma = 0, spot = 0 and strike <= 0.
double black_scholes_call(double spot, double strike, double r, double sigma, double tau);

/// Bisection on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
/// Stops when |f(mid)| <= tol or the bracket collapses to machine precision.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

struct SignChange {
    double root;
    bool rising;  // f goes from negative to positive
};

/// Scans [lo, hi] with the given step and bisects every sign change of f.
std::vector<SignChange> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                   double step = 1e-3, double tol = 1e-10);

}  // namespace pensionopt
