#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pensionopt {

/// Thomas algorithm for a tridiagonal system.
///   lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1] = rhs[i]
/// lower[0] and upper[n-1] are ignored. No pivoting: intended for diagonally
/// dominant M-matrices as produced by the implicit finite-difference schemes.
class TridiagonalSolver {
public:
    explicit TridiagonalSolver(std::size_t n) : c_prime_(n), d_prime_(n) {}

    void solve(std::span<const double> lower, std::span<const double> diag,
               std::span<const double> upper, std::span<const double> rhs, std::span<double> x) {
        const std::size_t n = diag.size();
        if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n ||
            c_prime_.size() < n)
            throw std::invalid_argument("TridiagonalSolver: size mismatch");

        double denom = diag[0];
        if (denom == 0.0) throw std::runtime_error("TridiagonalSolver: zero pivot");
        c_prime_[0] = upper[0] / denom;
        d_prime_[0] = rhs[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = diag[i] - lower[i] * c_prime_[i - 1];
            if (denom == 0.0) throw std::runtime_error("TridiagonalSolver: zero pivot");
            c_prime_[i] = (i + 1 < n) ? upper[i] / denom : 0.0;
            d_prime_[i] = (rhs[i] - lower[i] * d_prime_[i - 1]) / denom;
        }
        x[n - 1] = d_prime_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime_[i] - c_prime_[i] * x[i + 1];
    }

private:
    std::vector<double> c_prime_;
    std::vector<double> d_prime_;
};

}  // namespace pensionopt
