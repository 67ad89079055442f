#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mislearn/panel.hpp"

namespace mislearn {

// Future performance over the next h available observations strictly after t.
struct ForwardOutcomeRow {
    std::string series_id;
    MonthIndex t;
    int horizon = 0;
    std::optional<double> sharpe;  // absent when the window s.d. is zero
    double cumret = 0.0;           // simple sum of decimal returns
    double vol = 0.0;              // sample s.d., denominator h-1
    double downside_vol = 0.0;     // rms of negative returns; 0 if none
    double max_dd = 0.0;           // peak-to-trough of the cumulative-sum path
    int failure = 0;               // min return below the series tail quantile
};

struct ForwardOutcomeTable {
    std::vector<ForwardOutcomeRow> rows;
    std::map<std::string, double> failure_thresholds;  // per-series full-sample quantile
};

// Rows are emitted only when h future observations exist; the failure
// threshold is the one full-sample constant (the q-quantile of each series'
// monthly returns).
ForwardOutcomeTable forward_outcomes(const ReturnPanel& panel, const std::set<int>& horizons,
                                     double failure_quantile = 0.05);

}  // namespace mislearn
