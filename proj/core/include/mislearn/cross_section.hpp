#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mislearn/panel.hpp"
#include "mislearn/regression.hpp"

namespace mislearn {

// Anomaly-level decomposition objects. Soft probability weights drive pi and
// the conditional means; the 0.5-threshold hard states drive pi_hard, q1, q0.
struct DecompositionRow {
    std::string series_id;
    double pi = 0.0;       // mean filtered break probability
    double pi_hard = 0.0;  // share of months with probability > 0.5
    std::optional<double> mu1;
    std::optional<double> mu0;
    double e_delta = 0.0;
    double spike_freq = 0.0;
    std::optional<double> q1;
    std::optional<double> q0;
    std::optional<double> ivol;  // decimal units
    bool degenerate = false;
};

// Weighted means per the break-state decomposition; the identity
// e_delta = pi*mu1 + (1-pi)*mu0 holds by construction. The spike flags are
// delta > spike_thresh; hard states use `state_threshold` on the probability.
DecompositionRow decompose(const std::string& id, std::span<const double> delta,
                           std::span<const double> break_prob, double spike_thresh,
                           double state_threshold = 0.5);

// Residual s.d. from an OLS of the series on intercept + three factor columns
// over overlapping months. Absent when overlap < 36 months.
std::optional<double> compute_ivol(std::span<const Observation> series,
                                   const ReturnPanel& factors,
                                   const std::vector<std::string>& factor_ids);

struct TertileStats {
    std::string label;
    int n = 0;
    double mean_ivol = 0.0;
    double mean_pi = 0.0;
    double mean_e_delta = 0.0;
    double mean_spike = 0.0;
    double sd_mu1 = 0.0;
    double sd_mu0 = 0.0;
    double sd_e_delta = 0.0;
    RegressionResult e_delta_on_pi;
    RegressionResult spike_on_pi;
};

// Rank-based tertiles of IVOL (ties broken by series id). Within each
// tertile: univariate HC3 regressions of e_delta and spike frequency on pi.
// Rows flagged degenerate or lacking IVOL are excluded beforehand.
std::vector<TertileStats> tertile_analysis(std::span<const DecompositionRow> rows);

struct XsecModel {
    std::string name;
    RegressionResult result;
};

// The reduced-form HC3 menu: mu1~ivol_z, pi~ivol_z, mu1~pi, e_delta~pi,
// e_delta~pi+pi^2, spike~pi, spike~pi+pi^2.
std::vector<XsecModel> xsec_regressions(std::span<const DecompositionRow> rows);

struct Corollary41Report {
    int n = 0;
    bool hypotheses_hold = false;    // common mu0 and nonneg, nondecreasing gaps
    double max_mu0_spread = 0.0;
    double min_gap = 0.0;
    int monotonicity_violations = 0; // e_delta decreases while pi increases
    double rank_corr = 0.0;
    std::string verdict;             // "supported" / "hypotheses-violated" / ...
};

// Monotonicity of e_delta in pi, reported only relative to the corollary's
// own hypotheses: a failure outside them is labeled as such, never as a
// refutation.
Corollary41Report corollary41_check(std::span<const DecompositionRow> rows,
                                    double common_mu0_tolerance);

struct RankTable {
    std::vector<std::string> series;
    std::vector<std::string> metrics;
    std::vector<std::vector<int>> ranks;  // [metric][series], 1 = largest
};

RankTable rank_diagnostic(std::span<const DecompositionRow> rows,
                          const std::vector<std::pair<std::string, std::vector<double>>>& metrics);

}  // namespace mislearn
