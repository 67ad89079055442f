#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mislearn/break_model.hpp"
#include "mislearn/cross_section.hpp"
#include "mislearn/mislearning.hpp"
#include "mislearn/outcomes.hpp"
#include "mislearn/panel.hpp"
#include "mislearn/regression.hpp"
#include "mislearn/stable_filter.hpp"

namespace mislearn {

struct FitOptions {
    int stable_min_obs = 24;
    int break_min_obs = 48;
    double spike_quantile = 0.9;
    double break_threshold = 0.5;
    int rolling_window = 6;
    int threads = 1;
    // Fully out-of-sample delta: parameters re-estimated on an expanding
    // window, so delta_t uses only data through t-1 for estimation as well as
    // filtering. Off by default (full-sample parameters, causal filters).
    bool expanding_window = false;
    int min_window = 120;
    int refit_every = 12;
};

struct SeriesFit {
    std::string id;
    StableFit stable;
    BreakFit brk;
    MislearningSeries misl;
};

struct PanelFitResult {
    std::vector<SeriesFit> fits;  // series-id order
    std::vector<ModelComparisonRow> comparison;
    double spike_threshold = 0.0;
    std::vector<std::pair<std::string, std::string>> warnings;  // (series, message)
};

// Fits both models per series (parallel across series), computes delta and the
// pooled spike threshold, and skips too-short or failing series with warnings.
PanelFitResult fit_panel(const ReturnPanel& panel, const FitOptions& opts);

struct JoinOptions {
    std::set<int> horizons = {3, 6, 12};
    double failure_quantile = 0.05;
    int control_window = 12;     // trailing months for the volatility controls
    std::string market_series;   // optional id for the market-vol control
    double break_threshold = 0.5;
};

// One row per (series, month) with delta state variables, controls and the
// forward outcomes flattened as <outcome>_h<h> columns (NaN when absent).
DataTable build_regression_table(const ReturnPanel& panel, const PanelFitResult& fits,
                                 const JoinOptions& opts);

const std::vector<std::string>& outcome_names();  // sharpe, cumret, vol, ...

struct SuiteRow {
    std::string sample;   // "Pooled" or "Factor"
    std::string factor;   // "All" or a series id
    std::string outcome;
    int horizon = 0;
    bool controlled = false;
    double coef = 0.0, se = 0.0, t = 0.0, p = 0.0;
    long obs = 0;
    double r2 = 0.0;
};

struct RegressSuiteOptions {
    std::vector<std::string> outcomes = {"sharpe", "cumret", "vol", "downside_vol", "max_dd",
                                         "failure"};
    std::vector<int> horizons = {3, 6, 12};
    bool controlled = false;
    bool per_factor = true;
    CovEstimator estimator = CovEstimator::NeweyWest;
    int nw_lag = -1;  // -1: lag equals the horizon
};

// Pooled and per-factor predictive regressions of each outcome on delta.
std::vector<SuiteRow> run_predictive_suite(const DataTable& table,
                                           const RegressSuiteOptions& opts);

// The same spec under every covariance estimator; identical coefficients,
// differing standard errors.
std::vector<std::pair<std::string, RegressionResult>> run_inference_sweep(
    const DataTable& table, const RegressionSpec& base_spec);

// Cross-sectional stage: decomposition rows for every fitted series.
struct XsecOptions {
    double break_threshold = 0.5;
    std::vector<std::string> ivol_factors;  // exactly 3 ids when IVOL is wanted
    double ivol_report_scale = 100.0;       // decimal -> percent in emitted tables
};

std::vector<DecompositionRow> build_decomposition(const PanelFitResult& fits,
                                                  const ReturnPanel& panel,
                                                  const XsecOptions& opts);

// CSV writers (deterministic formatting).
void write_stable_fit_csv(const PanelFitResult& fits, const std::string& path);
void write_break_fit_csv(const PanelFitResult& fits, const std::string& path);
void write_comparison_csv(const PanelFitResult& fits, const std::string& path);
void write_delta_csv(const PanelFitResult& fits, const std::string& path);
void write_states_csv(const PanelFitResult& fits, const ReturnPanel& panel,
                      const std::string& path);
void write_suite_csv(const std::vector<SuiteRow>& rows, const std::string& path);
void write_decomposition_csv(const std::vector<DecompositionRow>& rows, double ivol_scale,
                             const std::string& path);
void write_warnings_csv(const std::vector<std::pair<std::string, std::string>>& warnings,
                        const std::string& path);

}  // namespace mislearn
