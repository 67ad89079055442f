#pragma once

#include <string>
#include <vector>

#include "mislearn/panel.hpp"
#include "mislearn/regression.hpp"

namespace mislearn {

enum class PassiveVariant { Onset, Outcome };
enum class PassiveFe { SeriesOnly, SeriesAndMonth };

struct PassiveSuiteResult {
    RegressionResult regression;
    std::string interaction_name;
    int dropped_missing_passive = 0;  // rows lost to passive-series gaps
    std::vector<MonthIndex> missing_months;
};

// Merges the passive series lagged one month (value dated t-1 attached to
// observations at t) into `table` under `column`; rows with no lagged value
// get NaN. Returns the number of distinct months with missing lagged values.
int merge_lagged_exogenous(DataTable& table, const ExogenousSeries& passive,
                           const std::string& column, std::vector<MonthIndex>* missing = nullptr);

// Onset variant:   delta ~ break_state + passive_lag + break_state*passive_lag (+ series FE)
// Outcome variant: perf  ~ delta + passive_lag + delta*passive_lag + controls (+ FE)
// With month fixed effects the passive main effect is dropped (within-month
// constant); identification is through the interaction only.
PassiveSuiteResult passive_interaction_suite(DataTable table, const ExogenousSeries& passive,
                                             PassiveVariant variant, PassiveFe fe,
                                             const std::string& outcome_column,
                                             const std::vector<std::string>& controls,
                                             const CovSpec& cov);

}  // namespace mislearn
