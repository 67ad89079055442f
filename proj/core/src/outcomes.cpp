#include "mislearn/outcomes.hpp"

#include <algorithm>
#include <cmath>

#include "mislearn/errors.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

ForwardOutcomeTable forward_outcomes(const ReturnPanel& panel, const std::set<int>& horizons,
                                     double failure_quantile) {
    for (int h : horizons) {
        if (h < 1 || h > 60) throw DataError("forward_outcomes: horizon outside 1..60");
    }
    if (!(failure_quantile > 0.0 && failure_quantile < 1.0)) {
        throw DataError("forward_outcomes: failure quantile must be in (0,1)");
    }

    ForwardOutcomeTable table;
    for (const auto& id : panel.series_ids()) {
        const auto& obs = panel.observations(id);
        const auto rets = panel.returns(id);
        if (rets.empty()) continue;
        const double threshold = quantile_type7(rets, failure_quantile);
        table.failure_thresholds[id] = threshold;

        for (size_t i = 0; i < obs.size(); ++i) {
            for (int h : horizons) {
                if (i + static_cast<size_t>(h) >= obs.size()) continue;
                const std::span<const double> window(rets.data() + i + 1, h);

                ForwardOutcomeRow row;
                row.series_id = id;
                row.t = obs[i].t;
                row.horizon = h;

                double cum = 0.0, neg_ss = 0.0, min_ret = window[0];
                int neg_count = 0;
                double peak = 0.0, path = 0.0, dd = 0.0;
                for (double r : window) {
                    cum += r;
                    path += r;
                    peak = std::max(peak, path);
                    dd = std::max(dd, peak - path);
                    if (r < 0.0) {
                        neg_ss += r * r;
                        ++neg_count;
                    }
                    min_ret = std::min(min_ret, r);
                }
                row.cumret = cum;
                row.vol = sample_sd(window);
                if (row.vol > 0.0) row.sharpe = (cum / h) / row.vol;
                row.downside_vol = neg_count > 0 ? std::sqrt(neg_ss / neg_count) : 0.0;
                row.max_dd = dd;
                row.failure = min_ret < threshold ? 1 : 0;
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

}  // namespace mislearn
