#include "pensionopt/numerics.hpp"

#include <algorithm>
#include <stdexcept>

namespace pensionopt {

double black_scholes_call(double spot, double strike, double r, double sigma, double tau) {
    if (spot <= 0.0) return 0.0;
    const double disc_strike = strike * std::exp(-r * tau);
    if (strike <= 0.0) return spot - disc_strike;
    if (sigma <= 0.0 || tau <= 0.0) return std::max(spot - disc_strike, 0.0);
    const double vol = sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + (r + 0.5 * sigma * sigma) * tau) / vol;
    const double d2 = d1 - vol;
    return spot * norm_cdf(d1) - disc_strike * norm_cdf(d2);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) throw std::invalid_argument("bisect: root not bracketed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= tol || mid == lo || mid == hi) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<SignChange> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                   double step, double tol) {
    std::vector<SignChange> out;
    if (!(hi > lo)) return out;
    const auto n = static_cast<long>(std::ceil((hi - lo) / step));
    // bracket from the last node where f was nonzero, so exact zeros on nodes count once
    double a = lo;
    double fa = f(lo);
    for (long i = 1; i <= n; ++i) {
        const double b = (i == n) ? hi : lo + static_cast<double>(i) * step;
        const double fb = f(b);
        if (fb == 0.0) continue;
        if (fa == 0.0) {
            a = b;
            fa = fb;
            continue;
        }
        if ((fa < 0.0) != (fb < 0.0)) out.push_back({bisect(f, a, b, tol), fb > 0.0});
        a = b;
        fa = fb;
    }
    return out;
}

}  // namespace pensionopt
