#pragma once

#include <array>
#include <span>
#include <vector>

#include "mislearn/calendar.hpp"
#include "mislearn/stable_filter.hpp"  // kSdFloor

namespace mislearn {

// Two-state Gaussian Markov-switching parameters. After relabeling, state 1 is
// the high-variance (break) state: sd1 >= sd0.
struct BreakParams {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sd0 = 0.01;
    double sd1 = 0.02;
    double p00 = 0.95;  // Pr(S_t = 0 | S_{t-1} = 0)
    double p11 = 0.95;  // Pr(S_t = 1 | S_{t-1} = 1)

    // The filter accepts boundary transition probabilities (absorbing
    // chains); the MLE's logit transform keeps estimates interior.
    bool valid() const {
        return sd0 >= kSdFloor && sd1 >= kSdFloor && p00 >= 0.0 && p00 <= 1.0 && p11 >= 0.0 &&
               p11 <= 1.0;
    }
};

std::array<double, 2> ergodic_distribution(const BreakParams& params);

struct BreakFit {
    BreakParams params;
    std::vector<MonthIndex> months;
    std::vector<std::array<double, 2>> pred_prob;  // Pr(S_t = j | F_{t-1})
    std::vector<std::array<double, 2>> filt_prob;  // Pr(S_t = j | F_t)
    std::vector<double> next_break_prob;           // Pr(S_{t+1} = 1 | F_t)
    std::vector<double> logpred;                   // log p_B(f_t | F_{t-1})
    double loglik = 0.0;
    int n_obs = 0;
    double aic = 0.0;
    double bic = 0.0;
    bool degenerate = false;  // sd at floor or a self-transition > 0.9999
};

// Standard two-state filter. `init` is the distribution of the pre-sample
// state; predicted probabilities apply the transition matrix to it.
// Densities are combined in log space; a non-finite predictive density throws.
BreakFit hamilton_filter(std::span<const double> series, const BreakParams& params,
                         const std::array<double, 2>& init);

struct BreakMleOptions {
    int min_obs = 48;
    double rel_tol = 1e-8;
};

// 6-parameter MLE (logit transforms on self-transitions, log on s.d.s),
// multi-start >= 8, states relabeled so sd1 >= sd0.
BreakFit fit_break_mle(std::span<const double> series, const BreakMleOptions& opts = {});

enum class BreakProbMode { Filtered, PredictedNext };
std::vector<double> break_probability_series(const BreakFit& fit, BreakProbMode mode);

// Inputs of the closed-form likelihood-ratio representation: the stable
// predictive N(m, s_S2) against the mixture that adds a jump component with
// mean shift mu_J and variance increment sigma_J2, mixed with weight p.
struct MixtureLRConfig {
    double m = 0.0;
    double s_S2 = 1.0;
    double sigma_J2 = 0.0;
    double mu_J = 0.0;
    double p = 0.0;

    double s_B2() const { return s_S2 + sigma_J2; }
    bool valid() const { return s_S2 > 0.0 && sigma_J2 >= 0.0 && p >= 0.0 && p <= 1.0; }
};

struct MixtureLogRatio {
    double g = 0.0;      // log density ratio of the jump component to the stable one
    double delta = 0.0;  // log[(1-p) + p e^g]
};

MixtureLogRatio mixture_log_ratio(const MixtureLRConfig& cfg, double x);

// Slope diagnostics of g at the canonical break realization x = m + mu_J.
struct Prop2Report {
    double g_at_break = 0.0;
    double dg_dmuJ_analytic = 0.0;   // |mu_J| / s_S2
    double dg_dmuJ_numeric = 0.0;
    double dg_ds_analytic = 0.0;     // sigma_J2/(2s(s+sigma_J2)) - mu_J^2/(2s^2)
    double dg_ds_numeric = 0.0;
    bool rigidity_condition = false; // mu_J^2 > sigma_J2 * s/(s+sigma_J2)
};

Prop2Report prop2_diagnostics(const MixtureLRConfig& cfg);

}  // namespace mislearn
