#pragma once

#include <span>
#include <vector>

namespace mislearn {

// Full-sample Hodrick-Prescott trend: solves (I + lambda D'D) tau = y where D
// is the second-difference operator, via a pentadiagonal Cholesky factorization.
std::vector<double> hp_trend(std::span<const double> y, double lambda);

// Strictly one-sided variant: cycle_t = y_t - trend_t where the trend at t is
// the last element of the full HP solve on the prefix y_1..y_t. Appending
// observations never changes earlier values.
std::vector<double> one_sided_hp_detrend(std::span<const double> y, double lambda);

}  // namespace mislearn
