#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace mislearn {

struct SimplexOptions {
    int max_iter = 20000;
    double rel_tol = 1e-8;   // relative spread of simplex values
    int restarts = 2;        // simplex rebuilds around the incumbent
    double initial_step = 0.25;
};

struct SimplexResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

// Derivative-free simplex minimization (downhill simplex with restarts).
// The objective may return +inf to reject a point.
SimplexResult nelder_mead(const ObjectiveFn& f, const std::vector<double>& x0,
                          const SimplexOptions& opts = {});

// Runs nelder_mead from each start and keeps the best converged result.
// Throws EstimationError when no start converges (carrying the best point).
SimplexResult multi_start_minimize(const ObjectiveFn& f,
                                   const std::vector<std::vector<double>>& starts,
                                   const SimplexOptions& opts = {});

// Bounded-parameter transforms used on optimizer coordinates.
inline double to_unbounded_corr(double rho) {
    return 0.5 * std::log((1.0 + rho) / (1.0 - rho));  // atanh
}
inline double from_unbounded_corr(double z) { return std::tanh(z); }
inline double to_unbounded_prob(double p) { return std::log(p / (1.0 - p)); }
inline double from_unbounded_prob(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Central finite-difference gradient, step h on each coordinate.
std::vector<double> numerical_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                       double h = 1e-5);

}  // namespace mislearn
