#pragma once

#include <span>
#include <vector>

#include "mislearn/calendar.hpp"

namespace mislearn {

constexpr double kSdFloor = 1e-8;  // estimation floor on standard deviations

struct StableParams {
    double rho = 0.0;        // state persistence, |rho| < 1
    double sigma_u = 0.01;   // observation noise s.d.
    double sigma_eta = 0.01; // state innovation s.d.

    bool valid() const {
        return std::abs(rho) < 1.0 && sigma_u >= kSdFloor && sigma_eta >= kSdFloor;
    }
};

struct FilterInit {
    double mean = 0.0;
    double variance = 1.0;
};

// Per-period output of the scalar Kalman recursion plus likelihood summaries.
struct StableFit {
    StableParams params;
    std::vector<MonthIndex> months;      // empty for synthetic spans
    std::vector<double> pred_mean;       // m_{t|t-1}
    std::vector<double> pred_var;        // s^2_t = P_{t|t-1} + sigma_u^2
    std::vector<double> filt_mean;       // lambda_hat_t
    std::vector<double> filt_var;        // P_t
    std::vector<double> gain;            // K_t
    std::vector<double> logpred;         // log p_S(f_t | F_{t-1})
    double loglik = 0.0;
    int n_obs = 0;
    double aic = 0.0;
    double bic = 0.0;
    bool degenerate = false;             // an s.d. floor bound at the MLE
};

// Steady-state solution of the scalar Riccati fixed point
//   P_pred = A^2 (1-K) P_pred + sigma_eta^2,  K = P_pred / (P_pred + sigma_u^2)
struct SteadyStateGain {
    double gain = 0.0;
    double pred_var = 0.0;
    int iterations = 0;
};
SteadyStateGain steady_state_gain(double a, double sigma_eta, double sigma_u,
                                  double tol = 1e-12, int max_iter = 100000);

// Exact scalar recursion; the prior (init) is on the pre-sample state.
// Throws DataError on non-finite input, naming the offending index.
StableFit kalman_filter(std::span<const double> series, const StableParams& params,
                        const FilterInit& init);

// Stationary prior: mean 0, variance sigma_eta^2/(1-rho^2) for |rho| < 0.999,
// else diffuse (1e7 times the sample variance).
FilterInit stationary_init(const StableParams& params, std::span<const double> series);

double information_criterion_aic(double loglik, int k);
double information_criterion_bic(double loglik, int k, int n);

struct StableMleOptions {
    int min_obs = 24;
    double rel_tol = 1e-8;
    int extra_starts = 0;  // beyond the built-in heuristic grid
};

// Maximum likelihood over (rho, sigma_u, sigma_eta) on transformed coordinates
// (atanh / log), multi-start simplex, best objective kept.
StableFit fit_stable_mle(std::span<const double> series, const StableMleOptions& opts = {});

}  // namespace mislearn
