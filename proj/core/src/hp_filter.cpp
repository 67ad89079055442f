#include "mislearn/hp_filter.hpp"

#include <cmath>
#include <stdexcept>

#include "mislearn/errors.hpp"

namespace mislearn {

namespace {

// Solves A x = y for a symmetric positive-definite pentadiagonal A given by
// its main diagonal d0 and off-diagonals d1, d2, via an in-place LDL' band
// factorization.
std::vector<double> solve_pentadiagonal(std::vector<double> d0, std::vector<double> d1,
                                        std::vector<double> d2, std::span<const double> y) {
    const int n = static_cast<int>(d0.size());
    std::vector<double> l1(std::max(n - 1, 0), 0.0);  // L(i+1, i)
    std::vector<double> l2(std::max(n - 2, 0), 0.0);  // L(i+2, i)
    for (int i = 0; i < n; ++i) {
        double di = d0[i];
        if (i >= 1) di -= l1[i - 1] * l1[i - 1] * d0[i - 1];
        if (i >= 2) di -= l2[i - 2] * l2[i - 2] * d0[i - 2];
        if (!(di > 0.0) || !std::isfinite(di)) {
            throw std::runtime_error("pentadiagonal solve: matrix not positive definite");
        }
        d0[i] = di;  // d0 now stores D
        if (i + 1 < n) {
            double e = d1[i];
            if (i >= 1) e -= l2[i - 1] * d0[i - 1] * l1[i - 1];
            l1[i] = e / di;
        }
        if (i + 2 < n) l2[i] = d2[i] / di;
    }

    std::vector<double> x(y.begin(), y.end());
    for (int i = 0; i < n; ++i) {  // L z = y
        if (i >= 1) x[i] -= l1[i - 1] * x[i - 1];
        if (i >= 2) x[i] -= l2[i - 2] * x[i - 2];
    }
    for (int i = 0; i < n; ++i) x[i] /= d0[i];  // D w = z
    for (int i = n - 1; i >= 0; --i) {          // L' x = w
        if (i + 1 < n) x[i] -= l1[i] * x[i + 1];
        if (i + 2 < n) x[i] -= l2[i] * x[i + 2];
    }
    return x;
}

}  // namespace

std::vector<double> hp_trend(std::span<const double> y, double lambda) {
    if (lambda <= 0.0) throw DataError("hp_trend: lambda must be positive");
    const int n = static_cast<int>(y.size());
    if (n == 0) return {};
    if (n <= 2) return std::vector<double>(y.begin(), y.end());

    std::vector<double> d0(n), d1(n - 1), d2(n - 2);
    for (int i = 0; i < n; ++i) {
        double v;
        if (i == 0 || i == n - 1) {
            v = 1.0 + lambda;
        } else if (i == 1 || i == n - 2) {
            v = n == 3 ? 1.0 + 4.0 * lambda : 1.0 + 5.0 * lambda;
        } else {
            v = 1.0 + 6.0 * lambda;
        }
        d0[i] = v;
    }
    for (int i = 0; i < n - 1; ++i) {
        d1[i] = (i == 0 || i == n - 2) ? -2.0 * lambda : -4.0 * lambda;
    }
    for (int i = 0; i < n - 2; ++i) d2[i] = lambda;

    return solve_pentadiagonal(std::move(d0), std::move(d1), std::move(d2), y);
}

std::vector<double> one_sided_hp_detrend(std::span<const double> y, double lambda) {
    std::vector<double> cycle(y.size(), 0.0);
    for (size_t t = 0; t < y.size(); ++t) {
        const auto trend = hp_trend(y.subspan(0, t + 1), lambda);
        cycle[t] = y[t] - trend.back();
    }
    return cycle;
}

}  // namespace mislearn
