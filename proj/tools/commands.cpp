#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "mislearn/csv.hpp"
#include "mislearn/errors.hpp"
#include "mislearn/experiments.hpp"
#include "mislearn/hp_filter.hpp"
#include "mislearn/passive.hpp"
#include "mislearn/pipeline.hpp"
#include "mislearn/stats.hpp"

namespace mislearn::cli {

namespace {

namespace fs = std::filesystem;

std::string out_path(const GlobalArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path + "'");
    return out;
}

std::uint64_t effective_seed(const KeyValueConfig& cfg, const GlobalArgs& args) {
    return args.seed ? *args.seed : cfg.get_u64("", "seed", 42);
}

// One config file drives every subcommand, so the full schema is validated
// regardless of which sections the current command reads.
void validate_global(const KeyValueConfig& cfg) {
    cfg.validate_sections({"data", "fit", "outcomes", "regress", "xsec", "simulate"});
    cfg.validate("", {"seed", "threads"});
    cfg.validate("data", {"returns", "layout", "unit", "series", "common_sample", "market_series",
                          "passive", "families", "ivol_factors"});
    cfg.validate("fit", {"stable_min_obs", "break_min_obs", "spike_quantile", "break_threshold",
                         "rolling_window", "expanding_window", "min_window", "refit_every"});
    cfg.validate("outcomes", {"horizons", "failure_quantile", "control_window"});
    cfg.validate("regress", {"outcomes", "horizons", "controlled", "per_factor", "estimator",
                             "nw_lag", "inference_sweep", "sweep_outcome", "sweep_horizon",
                             "passive_suite", "passive_fe", "passive_outcome", "passive_horizon",
                             "passive_detrend", "hp_lambda", "leave_one_year_out"});
    cfg.validate("xsec", {"ivol_scale", "corollary_tolerance"});
    cfg.validate("simulate",
                 {"t", "a", "sigma_eta", "sigma_u", "p", "mu_j", "sigma_j", "believed_sigma_eta",
                  "prop1_paths", "corollary1_reps_per_size", "delta_spike_paths", "wedge_reps"});
}

ReturnPanel load_panel(const KeyValueConfig& cfg) {
    const std::string path = cfg.require_str("data", "returns");
    const std::string layout_s = cfg.get_str("data", "layout", "wide");
    const std::string unit_s = cfg.get_str("data", "unit", "percent");
    if (layout_s != "wide" && layout_s != "long") {
        throw ConfigError("data.layout must be wide or long, got '" + layout_s + "'");
    }
    if (unit_s != "percent" && unit_s != "decimal") {
        throw ConfigError("data.unit must be percent or decimal, got '" + unit_s + "'");
    }
    ReturnPanel panel = load_returns(path, layout_s == "wide" ? Layout::Wide : Layout::Long,
                                     unit_s == "percent" ? Unit::Percent : Unit::Decimal);

    const auto wanted = cfg.get_list("data", "series");
    if (!wanted.empty()) {
        ReturnPanel subset;
        for (const auto& id : wanted) {
            if (!panel.has_series(id)) throw DataError("requested series '" + id + "' not in file");
            for (const auto& o : panel.observations(id)) subset.add(id, o.t, o.ret);
        }
        panel = std::move(subset);
    }
    if (cfg.get_bool("data", "common_sample", false)) {
        const auto ids = panel.series_ids();
        panel = panel.align_common_sample(std::set<std::string>(ids.begin(), ids.end()));
    }
    if (cfg.has("data", "families")) {
        std::ifstream in(cfg.get_str("data", "families", ""));
        if (!in) throw DataError("cannot open families file");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto fields = split_csv_line(line);
            if (fields.size() >= 2 && panel.has_series(fields[0])) {
                panel.set_family(fields[0], fields[1]);
            }
        }
    }
    if (panel.empty()) throw DataError("loaded panel is empty");
    return panel;
}

FitOptions fit_options(const KeyValueConfig& cfg, const GlobalArgs& args) {
    FitOptions opts;
    opts.stable_min_obs = cfg.get_int("fit", "stable_min_obs", 24);
    opts.break_min_obs = cfg.get_int("fit", "break_min_obs", 48);
    opts.spike_quantile = cfg.get_double("fit", "spike_quantile", 0.9);
    opts.break_threshold = cfg.get_double("fit", "break_threshold", 0.5);
    opts.rolling_window = cfg.get_int("fit", "rolling_window", 6);
    opts.expanding_window = cfg.get_bool("fit", "expanding_window", false);
    opts.min_window = cfg.get_int("fit", "min_window", 120);
    opts.refit_every = cfg.get_int("fit", "refit_every", 12);
    opts.threads = args.threads;
    if (!(opts.spike_quantile > 0.0 && opts.spike_quantile < 1.0)) {
        throw ConfigError("fit.spike_quantile must be in (0,1)");
    }
    return opts;
}

void report_warnings(const PanelFitResult& fits, const GlobalArgs& args) {
    if (fits.warnings.empty()) return;
    for (const auto& [id, msg] : fits.warnings) {
        std::cerr << "warning: " << id << ": " << msg << "\n";
    }
    write_warnings_csv(fits.warnings, out_path(args, "warnings.csv"));
}

CovEstimator parse_estimator(const std::string& name) {
    if (name == "classic") return CovEstimator::Classic;
    if (name == "hc0") return CovEstimator::HC0;
    if (name == "hc3") return CovEstimator::HC3;
    if (name == "nw") return CovEstimator::NeweyWest;
    if (name == "cluster_time") return CovEstimator::ClusterTime;
    if (name == "cluster_series") return CovEstimator::ClusterSeries;
    if (name == "cluster_two_way") return CovEstimator::ClusterTwoWay;
    throw ConfigError("unknown estimator '" + name + "'");
}

}  // namespace

int cmd_simulate(const KeyValueConfig& cfg, const GlobalArgs& args) {
    validate_global(cfg);
    const std::uint64_t seed = effective_seed(cfg, args);

    // demo path with the misspecified filter and the delta measure attached
    TrueProcessConfig tp;
    tp.t_len = cfg.get_int("simulate", "t", 600);
    tp.a = cfg.get_double("simulate", "a", 0.9);
    tp.sigma_eta = cfg.get_double("simulate", "sigma_eta", 0.01);
    tp.sigma_u = cfg.get_double("simulate", "sigma_u", 0.02);
    tp.p = cfg.get_double("simulate", "p", 0.02);
    tp.mu_j = cfg.get_double("simulate", "mu_j", 0.04);
    tp.sigma_j = cfg.get_double("simulate", "sigma_j", 0.02);
    tp.seed = seed;
    const double believed_eta =
        cfg.get_double("simulate", "believed_sigma_eta", 0.1 * tp.sigma_eta);
    const SimPath path = simulate_true_process(tp);
    const BeliefParams beliefs{tp.a, believed_eta, tp.sigma_u};
    const StableFit filt = run_misspecified_filter(path, beliefs);

    auto paths_csv = open_out(out_path(args, "paths.csv"));
    paths_csv << "t,lambda,f,jump,jump_size,pred_mean,filt_mean,filt_var,gain,delta\n";
    for (int t = 1; t <= tp.t_len; ++t) {
        MixtureLRConfig mc;
        mc.m = filt.pred_mean[t - 1];
        mc.s_S2 = filt.pred_var[t - 1];
        mc.mu_J = tp.mu_j;
        mc.sigma_J2 = tp.sigma_j * tp.sigma_j;
        mc.p = std::max(tp.p, 1e-6);
        const double delta = mixture_log_ratio(mc, path.f[t - 1]).delta;
        const auto jt = path.jump_sizes.find(t);
        paths_csv << t << ',' << format_double(path.lambda[t - 1]) << ','
                  << format_double(path.f[t - 1]) << ',' << (jt != path.jump_sizes.end() ? 1 : 0)
                  << ',' << (jt != path.jump_sizes.end() ? format_double(jt->second) : "0") << ','
                  << format_double(filt.pred_mean[t - 1]) << ','
                  << format_double(filt.filt_mean[t - 1]) << ','
                  << format_double(filt.filt_var[t - 1]) << ',' << format_double(filt.gain[t - 1])
                  << ',' << format_double(delta) << '\n';
    }

    SimulationSuiteConfig suite;
    suite.prop1.seed = seed + 1;
    suite.prop1.threads = args.threads;
    suite.prop1.n_paths = cfg.get_int("simulate", "prop1_paths", 100000);
    suite.prop2.seed = seed + 2;
    suite.theorem1.seed = seed + 3;
    suite.theorem1.threads = args.threads;
    suite.theorem1.wedge_reps = cfg.get_int("simulate", "wedge_reps", 2000);
    suite.corollary1.seed = seed + 4;
    suite.corollary1.threads = args.threads;
    suite.corollary1.reps_per_size = cfg.get_int("simulate", "corollary1_reps_per_size", 3334);
    suite.delta_spike.seed = seed + 5;
    suite.delta_spike.threads = args.threads;
    suite.delta_spike.n_paths = cfg.get_int("simulate", "delta_spike_paths", 500);
    suite.sanity.seed = seed + 6;
    const std::vector<CheckRow> rows = run_simulation_suite(suite);

    auto report = open_out(out_path(args, "proposition_reports.csv"));
    report << "check,value,bound,pass,note\n";
    bool all_pass = true;
    for (const auto& r : rows) {
        report << r.check << ',' << format_double(r.value) << ',' << format_double(r.bound) << ','
               << (r.pass ? "PASS" : "FAIL") << ',' << r.note << '\n';
        all_pass = all_pass && r.pass;
        if (!r.pass) std::cerr << "check failed: " << r.check << "\n";
    }
    return all_pass ? 0 : 1;
}

int cmd_fit(const KeyValueConfig& cfg, const GlobalArgs& args) {
    validate_global(cfg);
    const ReturnPanel panel = load_panel(cfg);
    const PanelFitResult fits = fit_panel(panel, fit_options(cfg, args));
    report_warnings(fits, args);
    write_stable_fit_csv(fits, out_path(args, "stable_fit.csv"));
    write_break_fit_csv(fits, out_path(args, "break_fit.csv"));
    write_comparison_csv(fits, out_path(args, "comparison.csv"));
    write_delta_csv(fits, out_path(args, "delta.csv"));
    return 0;
}

int cmd_regress(const KeyValueConfig& cfg, const GlobalArgs& args) {
    validate_global(cfg);

    // fail fast on missing inputs before the expensive estimation stage
    const std::string passive_mode_early = cfg.get_str("regress", "passive_suite", "none");
    if (passive_mode_early != "none" && !cfg.has("data", "passive")) {
        throw ConfigError("regress.passive_suite requires data.passive (missing input file)");
    }

    const ReturnPanel panel = load_panel(cfg);
    const PanelFitResult fits = fit_panel(panel, fit_options(cfg, args));
    report_warnings(fits, args);

    JoinOptions join;
    const auto horizons = cfg.get_int_list("outcomes", "horizons");
    if (!horizons.empty()) join.horizons = std::set<int>(horizons.begin(), horizons.end());
    join.failure_quantile = cfg.get_double("outcomes", "failure_quantile", 0.05);
    join.control_window = cfg.get_int("outcomes", "control_window", 12);
    join.market_series = cfg.get_str("data", "market_series", "");
    join.break_threshold = cfg.get_double("fit", "break_threshold", 0.5);
    const DataTable table = build_regression_table(panel, fits, join);

    RegressSuiteOptions sopts;
    const auto outs = cfg.get_list("regress", "outcomes");
    if (!outs.empty()) sopts.outcomes = outs;
    const auto rhs = cfg.get_int_list("regress", "horizons");
    if (!rhs.empty()) sopts.horizons = rhs;
    sopts.per_factor = cfg.get_bool("regress", "per_factor", true);
    sopts.estimator = parse_estimator(cfg.get_str("regress", "estimator", "nw"));
    sopts.nw_lag = cfg.get_int("regress", "nw_lag", -1);

    sopts.controlled = false;
    write_suite_csv(run_predictive_suite(table, sopts), out_path(args, "results_baseline.csv"));
    if (cfg.get_bool("regress", "controlled", true)) {
        sopts.controlled = true;
        write_suite_csv(run_predictive_suite(table, sopts),
                        out_path(args, "results_controlled.csv"));
    }

    if (cfg.get_bool("regress", "inference_sweep", false)) {
        RegressionSpec base;
        base.y = cfg.get_str("regress", "sweep_outcome", "sharpe") + "_h" +
                 std::to_string(cfg.get_int("regress", "sweep_horizon", 12));
        base.x = {"delta"};
        base.cov.nw_lag = cfg.get_int("regress", "sweep_horizon", 12);
        auto sweep = run_inference_sweep(table, base);
        auto out = open_out(out_path(args, "inference_sweep.csv"));
        out << "estimator,coef,se,t,p,obs,r2\n";
        for (const auto& [name, res] : sweep) {
            const Coefficient& c = res.at("delta");
            out << name << ',' << format_double(c.estimate) << ',' << format_double(c.se) << ','
                << format_double(c.t) << ',' << format_double(c.p) << ',' << res.n_obs << ','
                << format_double(res.r_squared) << '\n';
        }
    }

    const std::string passive_mode = cfg.get_str("regress", "passive_suite", "none");
    if (passive_mode != "none") {
        if (!cfg.has("data", "passive")) {
            throw ConfigError("regress.passive_suite requires data.passive (missing input file)");
        }
        ExogenousSeries passive = load_exogenous(cfg.get_str("data", "passive", ""));
        if (cfg.get_bool("regress", "passive_detrend", false)) {
            // strictly one-sided cyclical component replaces the level proxy
            std::vector<MonthIndex> months;
            std::vector<double> level;
            for (const auto& [t, v] : passive.values) {
                months.push_back(t);
                level.push_back(v);
            }
            const auto cycle =
                one_sided_hp_detrend(level, cfg.get_double("regress", "hp_lambda", 129600.0));
            for (size_t i = 0; i < months.size(); ++i) passive.values[months[i]] = cycle[i];
        }
        const std::string fe_s = cfg.get_str("regress", "passive_fe", "series");
        const PassiveFe fe = fe_s == "series_month" ? PassiveFe::SeriesAndMonth
                                                    : PassiveFe::SeriesOnly;
        const std::string outcome = cfg.get_str("regress", "passive_outcome", "cumret") + "_h" +
                                    std::to_string(cfg.get_int("regress", "passive_horizon", 12));
        CovSpec cov;
        cov.kind = CovEstimator::NeweyWest;
        cov.nw_lag = cfg.get_int("regress", "passive_horizon", 12);

        auto out = open_out(out_path(args, "passive_results.csv"));
        out << "variant,fe,term,coef,se,t,p,obs,r2\n";
        auto emit = [&](const std::string& variant, const PassiveSuiteResult& res) {
            if (res.dropped_missing_passive > 0) {
                std::cerr << "warning: passive series missing for " << res.dropped_missing_passive
                          << " months; rows dropped\n";
            }
            for (const auto& c : res.regression.coef) {
                out << variant << ',' << fe_s << ',' << c.name << ',' << format_double(c.estimate)
                    << ',' << format_double(c.se) << ',' << format_double(c.t) << ','
                    << format_double(c.p) << ',' << res.regression.n_obs << ','
                    << format_double(res.regression.r_squared) << '\n';
            }
        };
        std::vector<std::string> controls = {"own_vol"};
        if (passive_mode == "onset" || passive_mode == "both") {
            emit("onset", passive_interaction_suite(table, passive, PassiveVariant::Onset, fe, "",
                                                    {}, cov));
        }
        if (passive_mode == "outcome" || passive_mode == "both") {
            const PassiveSuiteResult res = passive_interaction_suite(
                table, passive, PassiveVariant::Outcome, fe, outcome, controls, cov);
            emit("outcome", res);
            if (cfg.get_bool("regress", "leave_one_year_out", false)) {
                DataTable loyo_table = table;
                merge_lagged_exogenous(loyo_table, passive, "passive_lag");
                auto& inter = loyo_table.columns["delta_x_passive_lag"];
                const auto& base_col = loyo_table.column("delta");
                const auto& plag = loyo_table.column("passive_lag");
                inter.resize(loyo_table.n_rows());
                for (size_t i = 0; i < loyo_table.n_rows(); ++i) inter[i] = base_col[i] * plag[i];
                RegressionSpec spec;
                spec.y = outcome;
                spec.x = {"delta", "passive_lag", "delta_x_passive_lag"};
                for (const auto& c : controls) spec.x.push_back(c);
                spec.fe_series = true;
                spec.cov = cov;
                const LeaveOneYearOut loyo =
                    leave_one_year_out(loyo_table, spec, "delta_x_passive_lag");
                auto lout = open_out(out_path(args, "leave_one_year_out.csv"));
                lout << "year,coef\n";
                for (const auto& [year, coef] : loyo.coef_by_year) {
                    lout << year << ',' << format_double(coef) << '\n';
                }
                for (int y : loyo.skipped) {
                    std::cerr << "warning: leave-one-year-out skipped year " << y << "\n";
                }
            }
        }
    }
    return 0;
}

int cmd_xsec(const KeyValueConfig& cfg, const GlobalArgs& args) {
    validate_global(cfg);

    const ReturnPanel panel = load_panel(cfg);
    const PanelFitResult fits = fit_panel(panel, fit_options(cfg, args));
    report_warnings(fits, args);

    XsecOptions xopts;
    xopts.break_threshold = cfg.get_double("fit", "break_threshold", 0.5);
    xopts.ivol_factors = cfg.get_list("data", "ivol_factors");
    xopts.ivol_report_scale = cfg.get_double("xsec", "ivol_scale", 100.0);
    const auto rows = build_decomposition(fits, panel, xopts);
    write_decomposition_csv(rows, xopts.ivol_report_scale, out_path(args, "decomposition.csv"));

    // summary in the layout of the decomposition summary table
    {
        std::vector<double> pis, mu1s, mu0s, eds, errs;
        for (const auto& r : rows) {
            if (r.degenerate) continue;
            pis.push_back(r.pi);
            eds.push_back(r.e_delta);
            if (r.mu1) mu1s.push_back(*r.mu1);
            if (r.mu0) mu0s.push_back(*r.mu0);
            if (r.mu1 && r.mu0) {
                errs.push_back(std::abs(r.e_delta - (r.pi * *r.mu1 + (1.0 - r.pi) * *r.mu0)));
            }
        }
        auto out = open_out(out_path(args, "xsec_summary.csv"));
        out << "statistic,value\n";
        out << "n," << eds.size() << '\n';
        out << "mean_pi," << format_double(mean(pis)) << '\n';
        out << "sd_pi," << format_double(sample_sd(pis)) << '\n';
        out << "mean_mu1," << format_double(mean(mu1s)) << '\n';
        out << "sd_mu1," << format_double(sample_sd(mu1s)) << '\n';
        out << "mean_mu0," << format_double(mean(mu0s)) << '\n';
        out << "sd_mu0," << format_double(sample_sd(mu0s)) << '\n';
        out << "mean_e_delta," << format_double(mean(eds)) << '\n';
        out << "sd_e_delta," << format_double(sample_sd(eds)) << '\n';
        out << "mean_abs_decomposition_error," << format_double(mean(errs)) << '\n';
        out << "max_abs_decomposition_error,"
            << format_double(errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end()))
            << '\n';
        out << "pooled_spike_threshold," << format_double(fits.spike_threshold) << '\n';
    }

    try {
        const auto tertiles = tertile_analysis(rows);
        auto out = open_out(out_path(args, "tertile.csv"));
        out << "tertile,n,mean_ivol,mean_pi,mean_e_delta,mean_spike,sd_mu1,sd_mu0,sd_e_delta,"
               "slope_e_delta,se_e_delta,slope_spike,se_spike\n";
        for (const auto& t : tertiles) {
            out << t.label << ',' << t.n << ',' << format_double(t.mean_ivol * xopts.ivol_report_scale)
                << ',' << format_double(t.mean_pi) << ',' << format_double(t.mean_e_delta) << ','
                << format_double(t.mean_spike) << ',' << format_double(t.sd_mu1) << ','
                << format_double(t.sd_mu0) << ',' << format_double(t.sd_e_delta) << ','
                << format_double(t.e_delta_on_pi.at("pi").estimate) << ','
                << format_double(t.e_delta_on_pi.at("pi").se) << ','
                << format_double(t.spike_on_pi.at("pi").estimate) << ','
                << format_double(t.spike_on_pi.at("pi").se) << '\n';
        }
    } catch (const DataError& e) {
        std::cerr << "warning: tertile step skipped: " << e.what() << "\n";
    }

    try {
        const auto models = xsec_regressions(rows);
        auto out = open_out(out_path(args, "xsec_models.csv"));
        out << "model,term,coef,se,t,p,obs,r2\n";
        for (const auto& m : models) {
            for (const auto& c : m.result.coef) {
                out << m.name << ',' << c.name << ',' << format_double(c.estimate) << ','
                    << format_double(c.se) << ',' << format_double(c.t) << ','
                    << format_double(c.p) << ',' << m.result.n_obs << ','
                    << format_double(m.result.r_squared) << '\n';
            }
        }
    } catch (const DataError& e) {
        std::cerr << "warning: cross-sectional regressions skipped: " << e.what() << "\n";
    }

    {
        const Corollary41Report rep =
            corollary41_check(rows, cfg.get_double("xsec", "corollary_tolerance", 1e-9));
        auto out = open_out(out_path(args, "corollary41.csv"));
        out << "n,hypotheses_hold,max_mu0_spread,min_gap,monotonicity_violations,rank_corr,"
               "verdict\n";
        out << rep.n << ',' << (rep.hypotheses_hold ? 1 : 0) << ','
            << format_double(rep.max_mu0_spread) << ',' << format_double(rep.min_gap) << ','
            << rep.monotonicity_violations << ',' << format_double(rep.rank_corr) << ','
            << rep.verdict << '\n';
    }

    if (rows.size() >= 3) {
        std::vector<std::pair<std::string, std::vector<double>>> metrics;
        std::vector<double> pi, pih, mu1, spike;
        for (const auto& r : rows) {
            pi.push_back(r.pi);
            pih.push_back(r.pi_hard);
            mu1.push_back(r.mu1.value_or(-1e300));
            spike.push_back(r.spike_freq);
        }
        metrics.emplace_back("break_prob", pi);
        metrics.emplace_back("break_share", pih);
        metrics.emplace_back("delta_break", mu1);
        metrics.emplace_back("spike_freq", spike);
        const RankTable ranks = rank_diagnostic(rows, metrics);
        auto out = open_out(out_path(args, "rank.csv"));
        out << "series";
        for (const auto& m : ranks.metrics) out << ',' << m;
        out << '\n';
        for (size_t i = 0; i < ranks.series.size(); ++i) {
            out << ranks.series[i];
            for (size_t j = 0; j < ranks.metrics.size(); ++j) out << ',' << ranks.ranks[j][i];
            out << '\n';
        }
    }
    return 0;
}

int cmd_report(const KeyValueConfig& cfg, const GlobalArgs& args) {
    validate_global(cfg);
    const ReturnPanel panel = load_panel(cfg);
    const PanelFitResult fits = fit_panel(panel, fit_options(cfg, args));
    report_warnings(fits, args);
    write_states_csv(fits, panel, out_path(args, "states.csv"));
    write_delta_csv(fits, out_path(args, "delta.csv"));
    write_comparison_csv(fits, out_path(args, "comparison.csv"));
    return 0;
}

}  // namespace mislearn::cli
