#include "mislearn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mislearn {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_var(std::span<const double> x) {
    const size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(n - 1);
}

double sample_sd(std::span<const double> x) { return std::sqrt(sample_var(x)); }

double quantile_type7(std::vector<double> x, double q) {
    if (x.empty()) throw std::invalid_argument("quantile_type7: empty sample");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile_type7: q must be in (0,1)");
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * q;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, x.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return x[lo] + frac * (x[hi] - x[lo]);
}

double autocorr(std::span<const double> x, int lag) {
    const int n = static_cast<int>(x.size());
    if (lag < 0 || lag >= n) return 0.0;
    const double m = mean(x);
    double num = 0.0, den = 0.0;
    for (int t = 0; t < n; ++t) den += (x[t] - m) * (x[t] - m);
    for (int t = lag; t < n; ++t) num += (x[t] - m) * (x[t - lag] - m);
    if (den == 0.0) return 0.0;
    return num / den;
}

namespace {

std::vector<double> midranks(std::span<const double> x) {
    const size_t n = x.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) r[idx[k]] = rank;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) return 0.0;
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const double mx = mean(rx), my = mean(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<int> ranks_desc(std::span<const double> x) {
    const size_t n = x.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return x[a] > x[b]; });
    std::vector<int> r(n);
    for (size_t pos = 0; pos < n; ++pos) r[idx[pos]] = static_cast<int>(pos) + 1;
    return r;
}

double log_normal_pdf(double x, double m, double var) {
    static const double kLog2Pi = 1.8378770664093454835606594728112;
    const double d = x - m;
    return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

}  // namespace mislearn
