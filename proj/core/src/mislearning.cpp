#include "mislearn/mislearning.hpp"

#include <algorithm>

#include "mislearn/errors.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

std::vector<double> compute_delta(const StableFit& stable, const BreakFit& brk) {
    if (!stable.months.empty() && !brk.months.empty()) {
        if (stable.months != brk.months) {
            std::string offending;
            const size_t n = std::max(stable.months.size(), brk.months.size());
            for (size_t i = 0; i < n; ++i) {
                const bool in_s = i < stable.months.size();
                const bool in_b = i < brk.months.size();
                if (!in_s || !in_b || stable.months[i] != brk.months[i]) {
                    if (!offending.empty()) offending += ", ";
                    offending += in_s ? stable.months[i].str() : brk.months[i].str();
                    if (offending.size() > 120) {
                        offending += ", ...";
                        break;
                    }
                }
            }
            throw DataError("compute_delta: timeline mismatch at " + offending);
        }
    } else if (stable.logpred.size() != brk.logpred.size()) {
        throw DataError("compute_delta: fits cover different sample lengths");
    }
    std::vector<double> delta(stable.logpred.size());
    for (size_t t = 0; t < delta.size(); ++t) delta[t] = brk.logpred[t] - stable.logpred[t];
    return delta;
}

std::vector<std::optional<double>> rolling_delta(std::span<const double> delta, int m) {
    if (m < 1) throw DataError("rolling_delta: window must be >= 1");
    std::vector<std::optional<double>> out(delta.size());
    for (size_t t = 0; t < delta.size(); ++t) {
        if (t + 1 < static_cast<size_t>(m)) continue;
        double acc = 0.0;
        for (int j = 0; j < m; ++j) acc += delta[t - j];
        out[t] = acc / m;
    }
    return out;
}

double spike_threshold(std::span<const double> pooled_deltas, double q) {
    if (pooled_deltas.empty()) throw DataError("spike_threshold: empty pool");
    if (!(q > 0.0 && q < 1.0)) throw DataError("spike_threshold: quantile must be in (0,1)");
    return quantile_type7(std::vector<double>(pooled_deltas.begin(), pooled_deltas.end()), q);
}

ModelComparisonRow model_comparison_row(const std::string& id, const StableFit& stable,
                                        const BreakFit& brk) {
    ModelComparisonRow row;
    row.series_id = id;
    row.n_obs = stable.n_obs;
    row.loglik_stable = stable.loglik;
    row.aic_stable = stable.aic;
    row.bic_stable = stable.bic;
    row.loglik_break = brk.loglik;
    row.aic_break = brk.aic;
    row.bic_break = brk.bic;
    row.d_loglik = brk.loglik - stable.loglik;
    row.d_aic = stable.aic - brk.aic;
    row.d_bic = stable.bic - brk.bic;
    return row;
}

}  // namespace mislearn
