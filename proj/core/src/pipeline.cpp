#include "mislearn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>

#include "mislearn/csv.hpp"
#include "mislearn/errors.hpp"
#include "mislearn/parallel.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct OosPoint {
    double delta;
    double break_prob;
};

// Expanding-window delta: at index i the parameters come from a fit on
// observations [0, i) (refreshed every `refit_every` months) and the filters
// are re-run on [0, i], so nothing at or after i enters the estimation.
std::vector<OosPoint> expanding_points(const std::vector<double>& series,
                                       const FitOptions& opts) {
    const int w0 = std::max({opts.min_window, opts.stable_min_obs, opts.break_min_obs});
    std::vector<OosPoint> out;
    StableParams sp;
    BreakParams bp;
    bool have_params = false;
    for (int i = w0; i < static_cast<int>(series.size()); ++i) {
        if (!have_params || (i - w0) % opts.refit_every == 0) {
            const std::span<const double> prefix(series.data(), i);
            StableMleOptions so;
            so.min_obs = opts.stable_min_obs;
            BreakMleOptions bo;
            bo.min_obs = opts.break_min_obs;
            sp = fit_stable_mle(prefix, so).params;
            bp = fit_break_mle(prefix, bo).params;
            have_params = true;
        }
        const std::span<const double> prefix(series.data(), i);
        const std::span<const double> upto(series.data(), i + 1);
        const StableFit sf = kalman_filter(upto, sp, stationary_init(sp, prefix));
        const BreakFit bf = hamilton_filter(upto, bp, ergodic_distribution(bp));
        out.push_back({bf.logpred[i] - sf.logpred[i], bf.filt_prob[i][1]});
    }
    return out;
}

}  // namespace

PanelFitResult fit_panel(const ReturnPanel& panel, const FitOptions& opts) {
    if (panel.empty()) throw DataError("fit_panel: empty panel");
    const auto ids = panel.series_ids();

    struct Slot {
        bool ok = false;
        SeriesFit fit;
        std::string warning;
    };
    std::vector<Slot> slots(ids.size());

    parallel_for(ids.size(), opts.threads, [&](size_t i) {
        const auto& id = ids[i];
        Slot& slot = slots[i];
        const auto series = panel.returns(id);
        const int need = std::max(opts.stable_min_obs, opts.break_min_obs);
        if (static_cast<int>(series.size()) < need) {
            slot.warning = "skipped: " + std::to_string(series.size()) +
                           " observations, need " + std::to_string(need);
            return;
        }
        try {
            SeriesFit fit;
            fit.id = id;
            StableMleOptions sopts;
            sopts.min_obs = opts.stable_min_obs;
            fit.stable = fit_stable_mle(series, sopts);
            BreakMleOptions bopts;
            bopts.min_obs = opts.break_min_obs;
            fit.brk = fit_break_mle(series, bopts);
            const auto months = panel.months(id);
            fit.stable.months = months;
            fit.brk.months = months;

            fit.misl.series_id = id;
            if (opts.expanding_window) {
                const auto points = expanding_points(series, opts);
                if (points.empty()) {
                    slot.warning = "skipped: shorter than the expanding-window minimum";
                    return;
                }
                const int w0 = static_cast<int>(months.size()) - static_cast<int>(points.size());
                fit.misl.months.assign(months.begin() + w0, months.end());
                for (const auto& pt : points) {
                    fit.misl.delta.push_back(pt.delta);
                    fit.misl.break_prob.push_back(pt.break_prob);
                }
            } else {
                fit.misl.months = months;
                fit.misl.delta = compute_delta(fit.stable, fit.brk);
                fit.misl.break_prob = break_probability_series(fit.brk, BreakProbMode::Filtered);
            }
            fit.misl.rolling = rolling_delta(fit.misl.delta, opts.rolling_window);
            fit.misl.rolling_window = opts.rolling_window;
            slot.fit = std::move(fit);
            slot.ok = true;
        } catch (const EstimationError& e) {
            slot.warning = std::string("estimation failed: ") + e.what();
        } catch (const DataError& e) {
            slot.warning = std::string("skipped: ") + e.what();
        }
    });

    PanelFitResult out;
    std::vector<double> pool;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (!slots[i].ok) {
            out.warnings.emplace_back(ids[i], slots[i].warning);
            continue;
        }
        pool.insert(pool.end(), slots[i].fit.misl.delta.begin(), slots[i].fit.misl.delta.end());
        out.fits.push_back(std::move(slots[i].fit));
    }
    if (out.fits.empty()) throw DataError("fit_panel: no series could be fitted");

    out.spike_threshold = spike_threshold(pool, opts.spike_quantile);
    for (auto& fit : out.fits) {
        fit.misl.spike_threshold = out.spike_threshold;
        fit.misl.spike.resize(fit.misl.delta.size());
        for (size_t t = 0; t < fit.misl.delta.size(); ++t) {
            fit.misl.spike[t] = fit.misl.delta[t] > out.spike_threshold;
        }
        out.comparison.push_back(model_comparison_row(fit.id, fit.stable, fit.brk));
    }
    return out;
}

namespace {

// trailing sample s.d. of the `window` observations ending at index i
std::vector<double> trailing_vol(const std::vector<double>& rets, int window) {
    std::vector<double> out(rets.size(), kNaN);
    for (size_t i = 0; i < rets.size(); ++i) {
        if (i + 1 < static_cast<size_t>(window)) continue;
        out[i] = sample_sd(std::span<const double>(rets.data() + i + 1 - window, window));
    }
    return out;
}

}  // namespace

const std::vector<std::string>& outcome_names() {
    static const std::vector<std::string> names = {"sharpe", "cumret",  "vol",
                                                   "downside_vol", "max_dd", "failure"};
    return names;
}

DataTable build_regression_table(const ReturnPanel& panel, const PanelFitResult& fits,
                                 const JoinOptions& opts) {
    DataTable table;
    const ForwardOutcomeTable outcomes = forward_outcomes(panel, opts.horizons,
                                                          opts.failure_quantile);

    // index forward outcomes by (series, month serial, horizon)
    std::map<std::string, std::map<std::pair<int, int>, const ForwardOutcomeRow*>> by_key;
    for (const auto& row : outcomes.rows) {
        by_key[row.series_id][{row.t.serial(), row.horizon}] = &row;
    }

    std::vector<double> mkt_vol_by_serial;
    int mkt_serial0 = 0;
    std::vector<MonthIndex> mkt_months;
    if (!opts.market_series.empty()) {
        if (!panel.has_series(opts.market_series)) {
            throw DataError("build_regression_table: market series '" + opts.market_series +
                            "' not in panel");
        }
        const auto rets = panel.returns(opts.market_series);
        mkt_months = panel.months(opts.market_series);
        mkt_vol_by_serial = trailing_vol(rets, opts.control_window);
        mkt_serial0 = mkt_months.empty() ? 0 : mkt_months.front().serial();
    }

    auto mkt_vol_at = [&](MonthIndex t) -> double {
        if (mkt_months.empty()) return kNaN;
        const int offset = t.serial() - mkt_serial0;
        if (offset < 0 || offset >= static_cast<int>(mkt_months.size())) return kNaN;
        // months may have gaps; verify the position matches
        if (mkt_months[offset].serial() != t.serial()) {
            auto it = std::lower_bound(mkt_months.begin(), mkt_months.end(), t);
            if (it == mkt_months.end() || !(*it == t)) return kNaN;
            return mkt_vol_by_serial[it - mkt_months.begin()];
        }
        return mkt_vol_by_serial[offset];
    };

    auto col = [&table](const std::string& name) -> std::vector<double>& {
        return table.columns[name];
    };

    for (const auto& fit : fits.fits) {
        const auto& months = fit.misl.months;
        const auto rets = panel.returns(fit.id);
        const auto own_vol = trailing_vol(rets, opts.control_window);
        // the mislearning timeline may be a suffix of the observation timeline
        // (expanding-window mode); controls index the full series
        const size_t offset = rets.size() - months.size();
        for (size_t i = 0; i < months.size(); ++i) {
            table.series.push_back(fit.id);
            table.month.push_back(months[i]);
            col("delta").push_back(fit.misl.delta[i]);
            col("rolling_delta").push_back(
                fit.misl.rolling[i] ? *fit.misl.rolling[i] : kNaN);
            col("break_prob").push_back(fit.misl.break_prob[i]);
            col("break_state").push_back(fit.misl.break_prob[i] > opts.break_threshold ? 1.0
                                                                                       : 0.0);
            col("spike").push_back(fit.misl.spike[i] ? 1.0 : 0.0);
            col("own_vol").push_back(own_vol[offset + i]);
            col("mkt_vol").push_back(mkt_vol_at(months[i]));
            for (int h : opts.horizons) {
                const auto& series_map = by_key[fit.id];
                auto it = series_map.find({months[i].serial(), h});
                const ForwardOutcomeRow* row = it == series_map.end() ? nullptr : it->second;
                const std::string suffix = "_h" + std::to_string(h);
                col("sharpe" + suffix)
                    .push_back(row && row->sharpe ? *row->sharpe : kNaN);
                col("cumret" + suffix).push_back(row ? row->cumret : kNaN);
                col("vol" + suffix).push_back(row ? row->vol : kNaN);
                col("downside_vol" + suffix).push_back(row ? row->downside_vol : kNaN);
                col("max_dd" + suffix).push_back(row ? row->max_dd : kNaN);
                col("failure" + suffix)
                    .push_back(row ? static_cast<double>(row->failure) : kNaN);
            }
        }
    }
    return table;
}

namespace {

DataTable filter_by_series(const DataTable& table, const std::string& id) {
    DataTable out;
    for (size_t i = 0; i < table.n_rows(); ++i) {
        if (table.series[i] != id) continue;
        out.series.push_back(table.series[i]);
        out.month.push_back(table.month[i]);
    }
    for (const auto& [name, colv] : table.columns) {
        auto& dst = out.columns[name];
        for (size_t i = 0; i < table.n_rows(); ++i) {
            if (table.series[i] == id) dst.push_back(colv[i]);
        }
    }
    return out;
}

}  // namespace

std::vector<SuiteRow> run_predictive_suite(const DataTable& table,
                                           const RegressSuiteOptions& opts) {
    std::vector<SuiteRow> rows;
    std::set<std::string> ids(table.series.begin(), table.series.end());

    auto run_one = [&](const DataTable& data, const std::string& sample, const std::string& factor,
                       const std::string& outcome, int h) {
        RegressionSpec spec;
        spec.y = outcome + "_h" + std::to_string(h);
        spec.x = {"delta"};
        if (opts.controlled) {
            spec.x.push_back("own_vol");
            if (data.has_column("mkt_vol")) {
                bool any = false;
                for (double v : data.column("mkt_vol")) any = any || std::isfinite(v);
                if (any) spec.x.push_back("mkt_vol");
            }
        }
        spec.cov.kind = opts.estimator;
        spec.cov.nw_lag = opts.nw_lag < 0 ? h : opts.nw_lag;
        SuiteRow row;
        row.sample = sample;
        row.factor = factor;
        row.outcome = outcome;
        row.horizon = h;
        row.controlled = opts.controlled;
        try {
            const RegressionResult res = run_regression(data, spec);
            const Coefficient& c = res.at("delta");
            row.coef = c.estimate;
            row.se = c.se;
            row.t = c.t;
            row.p = c.p;
            row.obs = res.n_obs;
            row.r2 = res.r_squared;
            rows.push_back(row);
        } catch (const DataError&) {
            // spec infeasible on this slice (e.g. too few observations): skip
        }
    };

    for (int h : opts.horizons) {
        for (const auto& outcome : opts.outcomes) {
            run_one(table, "Pooled", "All", outcome, h);
            if (opts.per_factor) {
                for (const auto& id : ids) {
                    run_one(filter_by_series(table, id), "Factor", id, outcome, h);
                }
            }
        }
    }
    return rows;
}

std::vector<std::pair<std::string, RegressionResult>> run_inference_sweep(
    const DataTable& table, const RegressionSpec& base_spec) {
    const std::vector<std::pair<std::string, CovSpec>> estimators = {
        {"hc3", {CovEstimator::HC3, 0, true}},
        {"nw", {CovEstimator::NeweyWest, base_spec.cov.nw_lag, true}},
        {"cluster_time", {CovEstimator::ClusterTime, 0, true}},
        {"cluster_series", {CovEstimator::ClusterSeries, 0, true}},
        {"cluster_two_way", {CovEstimator::ClusterTwoWay, 0, true}},
    };
    std::vector<std::pair<std::string, RegressionResult>> out;
    for (const auto& [name, cov] : estimators) {
        RegressionSpec spec = base_spec;
        spec.cov = cov;
        out.emplace_back(name, run_regression(table, spec));
    }
    return out;
}

std::vector<DecompositionRow> build_decomposition(const PanelFitResult& fits,
                                                  const ReturnPanel& panel,
                                                  const XsecOptions& opts) {
    std::vector<DecompositionRow> rows;
    for (const auto& fit : fits.fits) {
        DecompositionRow row = decompose(fit.id, fit.misl.delta, fit.misl.break_prob,
                                         fits.spike_threshold, opts.break_threshold);
        row.degenerate = fit.brk.degenerate;
        if (opts.ivol_factors.size() == 3) {
            row.ivol = compute_ivol(panel.observations(fit.id), panel, opts.ivol_factors);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path + "'");
    return out;
}

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : "";
}

}  // namespace

void write_stable_fit_csv(const PanelFitResult& fits, const std::string& path) {
    auto out = open_out(path);
    out << "series,start,end,n_obs,loglik,aic,bic,rho,sigma_u,sigma_eta,degenerate\n";
    for (const auto& f : fits.fits) {
        out << f.id << ',' << f.stable.months.front().str() << ',' << f.stable.months.back().str()
            << ',' << f.stable.n_obs << ',' << format_double(f.stable.loglik) << ','
            << format_double(f.stable.aic) << ',' << format_double(f.stable.bic) << ','
            << format_double(f.stable.params.rho) << ',' << format_double(f.stable.params.sigma_u)
            << ',' << format_double(f.stable.params.sigma_eta) << ',' << (f.stable.degenerate ? 1 : 0)
            << '\n';
    }
}

void write_break_fit_csv(const PanelFitResult& fits, const std::string& path) {
    auto out = open_out(path);
    out << "series,start,end,n_obs,loglik,aic,bic,mean0,mean1,sd0,sd1,p00,p11,degenerate\n";
    for (const auto& f : fits.fits) {
        const auto& p = f.brk.params;
        out << f.id << ',' << f.brk.months.front().str() << ',' << f.brk.months.back().str() << ','
            << f.brk.n_obs << ',' << format_double(f.brk.loglik) << ',' << format_double(f.brk.aic)
            << ',' << format_double(f.brk.bic) << ',' << format_double(p.mu0) << ','
            << format_double(p.mu1) << ',' << format_double(p.sd0) << ',' << format_double(p.sd1)
            << ',' << format_double(p.p00) << ',' << format_double(p.p11) << ','
            << (f.brk.degenerate ? 1 : 0) << '\n';
    }
}

void write_comparison_csv(const PanelFitResult& fits, const std::string& path) {
    auto out = open_out(path);
    out << "series,n_obs,loglik_stable,aic_stable,bic_stable,loglik_break,aic_break,bic_break,"
           "dll,daic,dbic,params\n";
    std::vector<ModelComparisonRow> rows = fits.comparison;
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.d_loglik > b.d_loglik; });
    for (const auto& r : rows) {
        out << r.series_id << ',' << r.n_obs << ',' << format_double(r.loglik_stable) << ','
            << format_double(r.aic_stable) << ',' << format_double(r.bic_stable) << ','
            << format_double(r.loglik_break) << ',' << format_double(r.aic_break) << ','
            << format_double(r.bic_break) << ',' << format_double(r.d_loglik) << ','
            << format_double(r.d_aic) << ',' << format_double(r.d_bic) << ',' << r.k_stable << '/'
            << r.k_break << '\n';
    }
}

void write_delta_csv(const PanelFitResult& fits, const std::string& path) {
    auto out = open_out(path);
    out << "series,date,delta,rolling_delta,break_prob,spike\n";
    for (const auto& f : fits.fits) {
        for (size_t t = 0; t < f.misl.delta.size(); ++t) {
            out << f.id << ',' << f.misl.months[t].str() << ','
                << format_double(f.misl.delta[t]) << ','
                << (f.misl.rolling[t] ? format_double(*f.misl.rolling[t]) : "") << ','
                << format_double(f.misl.break_prob[t]) << ',' << (f.misl.spike[t] ? 1 : 0) << '\n';
        }
    }
}

void write_states_csv(const PanelFitResult& fits, const ReturnPanel& panel,
                      const std::string& path) {
    auto out = open_out(path);
    out << "series,date,ret,pred_mean,pred_var,filt_mean,filt_var,band_lo,band_hi,gain,"
           "next_break_prob\n";
    for (const auto& f : fits.fits) {
        const auto rets = panel.returns(f.id);
        for (size_t t = 0; t < f.misl.months.size(); ++t) {
            const double band = 2.0 * std::sqrt(f.stable.filt_var[t]);
            out << f.id << ',' << f.misl.months[t].str() << ',' << format_double(rets[t]) << ','
                << format_double(f.stable.pred_mean[t]) << ','
                << format_double(f.stable.pred_var[t]) << ','
                << format_double(f.stable.filt_mean[t]) << ','
                << format_double(f.stable.filt_var[t]) << ','
                << format_double(f.stable.filt_mean[t] - band) << ','
                << format_double(f.stable.filt_mean[t] + band) << ','
                << format_double(f.stable.gain[t]) << ','
                << format_double(f.brk.next_break_prob[t]) << '\n';
        }
    }
}

void write_suite_csv(const std::vector<SuiteRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "sample,factor,outcome,horizon,ctrl,coef,se,t,p,obs,r2\n";
    for (const auto& r : rows) {
        out << r.sample << ',' << r.factor << ',' << r.outcome << ',' << r.horizon << ','
            << (r.controlled ? "Yes" : "No") << ',' << format_double(r.coef) << ','
            << format_double(r.se) << ',' << format_double(r.t) << ',' << format_double(r.p) << ','
            << r.obs << ',' << format_double(r.r2) << '\n';
    }
}

void write_decomposition_csv(const std::vector<DecompositionRow>& rows, double ivol_scale,
                             const std::string& path) {
    auto out = open_out(path);
    out << "series,pi,pi_hard,mu1,mu0,e_delta,spike_freq,q1,q0,ivol,degenerate_flag\n";
    for (const auto& r : rows) {
        std::optional<double> scaled_ivol;
        if (r.ivol) scaled_ivol = *r.ivol * ivol_scale;
        out << r.series_id << ',' << format_double(r.pi) << ',' << format_double(r.pi_hard) << ','
            << opt_str(r.mu1) << ',' << opt_str(r.mu0) << ',' << format_double(r.e_delta) << ','
            << format_double(r.spike_freq) << ',' << opt_str(r.q1) << ',' << opt_str(r.q0) << ','
            << opt_str(scaled_ivol) << ',' << (r.degenerate ? 1 : 0) << '\n';
    }
}

void write_warnings_csv(const std::vector<std::pair<std::string, std::string>>& warnings,
                        const std::string& path) {
    auto out = open_out(path);
    out << "series,message\n";
    for (const auto& [id, msg] : warnings) out << id << ',' << msg << '\n';
}

}  // namespace mislearn
