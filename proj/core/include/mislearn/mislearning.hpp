#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mislearn/break_model.hpp"
#include "mislearn/stable_filter.hpp"

namespace mislearn {

// Per-series mislearning state variables on the fit timeline.
struct MislearningSeries {
    std::string series_id;
    std::vector<MonthIndex> months;              // empty when fits carry no calendar
    std::vector<double> delta;                   // log p_B - log p_S
    std::vector<std::optional<double>> rolling;  // m-month moving average
    std::vector<double> break_prob;              // filtered Pr(S_t = 1 | F_t)
    std::vector<bool> spike;                     // delta > pooled threshold
    double spike_threshold = 0.0;
    int rolling_window = 6;
};

// delta_t = log p_B(f_t|F_{t-1}) - log p_S(f_t|F_{t-1}). Both fits must cover
// the same observation timeline; mismatches raise a DataError listing the
// offending months.
std::vector<double> compute_delta(const StableFit& stable, const BreakFit& brk);

// Arithmetic mean of the m most recent delta values ending at t; absent until
// m values have accrued.
std::vector<std::optional<double>> rolling_delta(std::span<const double> delta, int m);

// Pooled empirical quantile (type 7) across all supplied delta values.
double spike_threshold(std::span<const double> pooled_deltas, double q);

struct ModelComparisonRow {
    std::string series_id;
    int n_obs = 0;
    double loglik_stable = 0.0, aic_stable = 0.0, bic_stable = 0.0;
    double loglik_break = 0.0, aic_break = 0.0, bic_break = 0.0;
    double d_loglik = 0.0;  // break - stable
    double d_aic = 0.0;     // stable - break (positive favors the break model)
    double d_bic = 0.0;     // stable - break
    int k_stable = 3;
    int k_break = 6;
};

ModelComparisonRow model_comparison_row(const std::string& id, const StableFit& stable,
                                        const BreakFit& brk);

}  // namespace mislearn
