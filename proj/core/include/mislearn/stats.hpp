#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mislearn {

double mean(std::span<const double> x);
// Sample standard deviation, denominator n-1. Returns 0 for n < 2.
double sample_sd(std::span<const double> x);
double sample_var(std::span<const double> x);

// Empirical quantile with linear interpolation (Hyndman-Fan type 7).
double quantile_type7(std::vector<double> x, double q);

// Lag-k autocorrelation of a series.
double autocorr(std::span<const double> x, int lag);

// Spearman rank correlation with midranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Ranks with 1 = largest value; ties broken by ascending index order,
// so the result is always a permutation of 1..n.
std::vector<int> ranks_desc(std::span<const double> x);

// log of the normal density
double log_normal_pdf(double x, double mean, double var);

}  // namespace mislearn
