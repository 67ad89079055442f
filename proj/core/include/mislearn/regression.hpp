#pragma once

#include <map>
#include <string>
#include <vector>

#include "mislearn/calendar.hpp"

namespace mislearn {

// Long-format column store keyed by (series, month) per row. Missing values
// are NaN; regressions drop incomplete rows listwise.
struct DataTable {
    std::vector<std::string> series;
    std::vector<MonthIndex> month;
    std::map<std::string, std::vector<double>> columns;

    std::size_t n_rows() const { return series.size(); }
    std::vector<double>& column(const std::string& name);
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const { return columns.count(name) > 0; }
};

enum class CovEstimator { Classic, HC0, HC3, NeweyWest, ClusterTime, ClusterSeries, ClusterTwoWay };

struct CovSpec {
    CovEstimator kind = CovEstimator::HC3;
    int nw_lag = 0;                       // Bartlett lag; 0 reproduces HC0 exactly
    bool small_sample_correction = true;  // CR1 factor on cluster estimators
};

struct RegressionSpec {
    std::string y;
    std::vector<std::string> x;
    bool intercept = true;
    bool fe_series = false;  // absorbed by within-demeaning
    bool fe_month = false;
    CovSpec cov;
};

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;
    double t = 0.0;
    double p = 0.0;
};

struct RegressionResult {
    std::vector<Coefficient> coef;
    long n_obs = 0;
    double r_squared = 0.0;
    int dof_used = 0;  // slopes + intercept + absorbed fixed effects

    const Coefficient& at(const std::string& name) const;
};

// OLS via column-pivoted QR. Throws DataError on rank deficiency (naming the
// collinear columns), fewer than 2 clusters, or n_obs <= #params.
RegressionResult run_regression(const DataTable& data, const RegressionSpec& spec);

// Refits the spec excluding all forecast-origin months in each held-out
// calendar year; returns the tracked coefficient per exclusion. Years whose
// exclusion empties the sample are skipped (reported in `skipped`).
struct LeaveOneYearOut {
    std::map<int, double> coef_by_year;
    std::vector<int> skipped;
};
LeaveOneYearOut leave_one_year_out(const DataTable& data, const RegressionSpec& spec,
                                   const std::string& coef_name);

// Two-sided p-values.
double student_t_two_sided_p(double t, double dof);
double normal_two_sided_p(double z);

}  // namespace mislearn
