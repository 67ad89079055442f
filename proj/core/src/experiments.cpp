#include "mislearn/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "mislearn/break_model.hpp"
#include "mislearn/parallel.hpp"
#include "mislearn/rng.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

double sigma_eta_for_gain(double a, double sigma_u, double gain) {
    const double r = sigma_u * sigma_u;
    const double p_pred = gain / (1.0 - gain) * r;
    const double q = p_pred * (1.0 - a * a * (1.0 - gain));
    return std::sqrt(q);
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::vector<CheckRow> prop1_experiment(const Prop1Config& cfg) {
    std::vector<CheckRow> rows;
    const double believed_eta = sigma_eta_for_gain(cfg.a, cfg.sigma_u, cfg.target_gain);
    const double k = steady_state_gain(cfg.a, believed_eta, cfg.sigma_u).gain;
    const int h_max = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());
    const int t_star = cfg.burn_in + 1;

    BeliefParams beliefs{cfg.a, believed_eta, cfg.sigma_u};
    std::vector<std::vector<double>> errors(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.threads, [&](size_t r) {
        TrueProcessConfig tp;
        tp.a = cfg.a;
        tp.sigma_eta = cfg.true_sigma_eta;
        tp.sigma_u = cfg.sigma_u;
        tp.t_len = t_star + h_max;
        tp.seed = mix64(cfg.seed) ^ r;
        tp.forced_jump_time = t_star;
        tp.forced_jump_size = cfg.jump_size;
        const SimPath path = simulate_true_process(tp);
        const StableFit filt = run_misspecified_filter(path, beliefs);
        errors[r] = post_break_error_path(path, filt, t_star, h_max).e;
    });

    for (int h : cfg.horizons) {
        std::vector<double> e(cfg.n_paths);
        for (int r = 0; r < cfg.n_paths; ++r) e[r] = errors[r][h];
        const double m = mean(e);
        const double se = sample_sd(e) / std::sqrt(static_cast<double>(cfg.n_paths));
        const double closed = -std::pow((1.0 - k) * cfg.a, h) * (1.0 - k) * cfg.jump_size;
        CheckRow row;
        row.check = "prop1_mean_error_h" + std::to_string(h);
        row.value = m - closed;
        row.bound = 3.0 * se;
        row.pass = std::abs(m - closed) <= 3.0 * se;
        row.note = "mc=" + fmt(m) + " closed=" + fmt(closed) + " se=" + fmt(se);
        rows.push_back(row);
    }

    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i * cfg.sigma_u);
    const GainGridResult gg = gain_monotonicity_check(grid, cfg.a, cfg.sigma_u);
    CheckRow grow;
    grow.check = "prop1_gain_monotonicity";
    grow.value = gg.gains_strictly_increasing && gg.spectral_strictly_decreasing ? 1.0 : 0.0;
    grow.bound = 1.0;
    grow.pass = grow.value == 1.0;
    grow.note = "10-point believed-sigma_eta grid";
    rows.push_back(grow);
    return rows;
}

std::vector<CheckRow> prop2_experiment(const Prop2Config& cfg) {
    auto rng = make_rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    int slope_ok = 0;
    for (int i = 0; i < cfg.grid_points; ++i) {
        MixtureLRConfig c;
        c.m = -0.5 + u01(rng);
        c.s_S2 = 0.1 + 4.0 * u01(rng);
        c.sigma_J2 = 4.0 * u01(rng);
        c.mu_J = 0.05 + 3.0 * u01(rng);
        c.p = 0.01 + 0.98 * u01(rng);
        const Prop2Report rep = prop2_diagnostics(c);
        if (rep.dg_dmuJ_analytic > 0.0 && rep.dg_dmuJ_numeric > 0.0 &&
            std::abs(rep.dg_dmuJ_analytic - rep.dg_dmuJ_numeric) <=
                1e-4 * (1.0 + std::abs(rep.dg_dmuJ_analytic))) {
            ++slope_ok;
        }
    }
    CheckRow slope;
    slope.check = "prop2_dg_dmuJ_positive";
    slope.value = static_cast<double>(slope_ok);
    slope.bound = static_cast<double>(cfg.grid_points);
    slope.pass = slope_ok == cfg.grid_points;
    slope.note = "analytic |mu_J|/s_S2 vs central differences";
    std::vector<CheckRow> rows{slope};

    int sign_ok = 0;
    for (int i = 0; i < cfg.rigidity_points; ++i) {
        MixtureLRConfig c;
        c.m = 0.0;
        c.s_S2 = 0.1 + 4.0 * u01(rng);
        c.sigma_J2 = 0.05 + 4.0 * u01(rng);
        c.mu_J = 0.05 + 3.0 * u01(rng);
        c.p = 0.5;
        const Prop2Report rep = prop2_diagnostics(c);
        const bool should_be_negative = rep.rigidity_condition;
        if ((rep.dg_ds_analytic < 0.0) == should_be_negative &&
            (rep.dg_ds_numeric < 0.0) == should_be_negative) {
            ++sign_ok;
        }
    }
    CheckRow sign;
    sign.check = "prop2_rigidity_sign_agreement";
    sign.value = static_cast<double>(sign_ok);
    sign.bound = static_cast<double>(cfg.rigidity_points);
    sign.pass = sign_ok == cfg.rigidity_points;
    sign.note = "sign of dg/ds vs mu_J^2 >< sigma_J^2 s/(s+sigma_J^2)";
    rows.push_back(sign);
    return rows;
}

std::vector<CheckRow> theorem1_experiment(const Theorem1Config& cfg) {
    std::vector<CheckRow> rows;
    EquilibriumConfig eq;
    eq.gamma = cfg.gamma;
    eq.sigma_u = cfg.sigma_u;
    eq.s_bar = cfg.s_bar;
    eq.a = cfg.a;
    eq.sigma_eta = 0.0;
    eq.t_len = cfg.t_len;
    eq.seed = cfg.seed;
    eq.shifts = {{cfg.shift_time, cfg.shift_size}};
    const double price_scale = cfg.gamma * cfg.sigma_u * cfg.sigma_u;
    const double believed_eta = cfg.believed_sigma_eta;
    const BeliefParams beliefs{cfg.a, believed_eta, cfg.sigma_u};

    const EquilibriumPath path = simulate_equilibrium(eq, beliefs);
    double id_clearing = 0.0, id_decomp = 0.0, id_demand = 0.0;
    for (int t = 0; t < cfg.t_len; ++t) {
        id_clearing = std::max(id_clearing,
                               std::abs(path.m_s[t] - price_scale * path.supply[t]));
        id_decomp = std::max(id_decomp,
                             std::abs(path.m_t[t] - (price_scale * path.supply[t] + path.w[t])));
        id_demand = std::max(id_demand, std::abs(path.demand[t] - path.supply[t]));
    }
    auto make_identity = [](const std::string& name, double value) {
        CheckRow r;
        r.check = name;
        r.value = value;
        r.bound = 1e-12;
        r.pass = value <= 1e-12;
        return r;
    };
    rows.push_back(make_identity("theorem1_market_clearing_identity", id_clearing));
    rows.push_back(make_identity("theorem1_decomposition_identity", id_decomp));
    rows.push_back(make_identity("theorem1_demand_equals_supply", id_demand));

    // premium break equals gamma*sigma_u^2*shift on impact
    const int i_star = cfg.shift_time - 1;
    const double jump = path.lambda[i_star] - cfg.a * (i_star > 0 ? path.lambda[i_star - 1] : 0.0);
    CheckRow jr;
    jr.check = "theorem1_premium_jump_on_impact";
    jr.value = std::abs(jump - price_scale * cfg.shift_size);
    jr.bound = 1e-12;
    jr.pass = jr.value <= 1e-12;
    jr.note = "gamma*sigma_u^2*shift=" + fmt(price_scale * cfg.shift_size);
    rows.push_back(jr);

    // wedge spike and geometric decay at rate (1-K)A after the shift
    const double k = steady_state_gain(cfg.a, believed_eta, cfg.sigma_u).gain;
    const double j_size = price_scale * cfg.shift_size;
    const std::vector<int> hs = {0, 1, 5, 10};
    std::vector<std::vector<double>> wedges(cfg.wedge_reps);
    parallel_for(cfg.wedge_reps, cfg.threads, [&](size_t r) {
        EquilibriumConfig e2 = eq;
        e2.seed = mix64(cfg.seed + 1) ^ r;
        const EquilibriumPath p2 = simulate_equilibrium(e2, beliefs);
        std::vector<double> w(hs.size());
        for (size_t i = 0; i < hs.size(); ++i) w[i] = p2.w[i_star + hs[i]];
        wedges[r] = w;
    });
    for (size_t i = 0; i < hs.size(); ++i) {
        std::vector<double> w(cfg.wedge_reps);
        for (int r = 0; r < cfg.wedge_reps; ++r) w[r] = wedges[r][i];
        const double m = mean(w);
        const double se = sample_sd(w) / std::sqrt(static_cast<double>(cfg.wedge_reps));
        const double closed = cfg.a * std::pow((1.0 - k) * cfg.a, hs[i]) * (1.0 - k) * j_size;
        CheckRow row;
        row.check = "theorem1_wedge_decay_h" + std::to_string(hs[i]);
        row.value = m - closed;
        row.bound = 4.0 * se;
        row.pass = std::abs(m - closed) <= 4.0 * se;
        row.note = "mc=" + fmt(m) + " closed=" + fmt(closed);
        rows.push_back(row);
    }
    return rows;
}

std::vector<CheckRow> corollary1_experiment(const Corollary1Config& cfg) {
    const int t_star = cfg.burn_in + 1;
    const int t_len = t_star + cfg.horizon;

    // a_true = 0 with correct beliefs gives the no-signal control: future
    // returns are then independent of the onset surprise.
    auto run_group = [&](double jump, double a_true, double sigma_eta_true,
                         std::uint64_t stream, std::vector<Corollary1Input>& out) {
        const size_t base = out.size();
        out.resize(base + cfg.reps_per_size);
        const BeliefParams beliefs{a_true, cfg.believed_sigma_eta, cfg.sigma_u};
        parallel_for(cfg.reps_per_size, cfg.threads, [&](size_t r) {
            TrueProcessConfig tp;
            tp.a = a_true;
            tp.sigma_eta = sigma_eta_true;
            tp.sigma_u = cfg.sigma_u;
            tp.t_len = t_len;
            tp.seed = mix64(cfg.seed + stream) ^ r;
            if (jump != 0.0) {
                tp.forced_jump_time = t_star;
                tp.forced_jump_size = jump;
            }
            const SimPath path = simulate_true_process(tp);
            const StableFit filt = run_misspecified_filter(path, beliefs);

            MixtureLRConfig mc;
            mc.m = filt.pred_mean[t_star - 1];
            mc.s_S2 = filt.pred_var[t_star - 1];
            mc.sigma_J2 = 0.0;
            mc.mu_J = cfg.measure_mu_mult * cfg.sigma_u;
            mc.p = cfg.measure_p;
            Corollary1Input in;
            in.delta_at_onset = mixture_log_ratio(mc, path.f[t_star - 1]).delta;
            in.jump_size = jump;
            double cum = 0.0;
            for (int j = 0; j < cfg.horizon; ++j) cum += path.f[t_star + j];
            in.cum_return = cum;
            out[base + r] = in;
        });
    };

    std::vector<Corollary1Input> sweep;
    for (size_t g = 0; g < cfg.jump_mults.size(); ++g) {
        run_group(cfg.jump_mults[g] * cfg.sigma_u, cfg.a, cfg.true_sigma_eta, 100 + g, sweep);
    }
    const Corollary1Report rep = corollary1_check(sweep);

    std::vector<CheckRow> rows;
    CheckRow rc;
    rc.check = "corollary1_rank_corr_positive";
    rc.value = rep.rank_corr;
    rc.bound = 0.0;
    rc.pass = rep.rank_corr_positive && !rep.insufficient_sample;
    rc.note = "pooled jump-size sweep, h=" + std::to_string(cfg.horizon);
    rows.push_back(rc);

    CheckRow mi;
    mi.check = "corollary1_mean_cum_increasing";
    mi.value = rep.mean_increasing_in_jump ? 1.0 : 0.0;
    mi.bound = 1.0;
    mi.pass = rep.mean_increasing_in_jump;
    std::string note;
    for (const auto& [size, m] : rep.mean_cum_by_jump) {
        note += (note.empty() ? "" : " ") + fmt(size) + "->" + fmt(m);
    }
    mi.note = note;
    rows.push_back(mi);

    std::vector<Corollary1Input> null_group;
    run_group(0.0, 0.0, cfg.believed_sigma_eta, 900, null_group);
    const Corollary1Report null_rep = corollary1_check(
        std::span<const Corollary1Input>(null_group.data(), null_group.size()));
    CheckRow nz;
    nz.check = "corollary1_null_zero_consistent";
    nz.value = null_rep.rank_corr;
    nz.bound = 3.0 / std::sqrt(static_cast<double>(null_rep.n - 1));
    nz.pass = null_rep.zero_consistent;
    nz.note = "no-jump control group";
    rows.push_back(nz);
    return rows;
}

std::vector<CheckRow> delta_spike_experiment(const DeltaSpikeConfig& cfg) {
    const BeliefParams beliefs{cfg.a, cfg.believed_sigma_eta, cfg.sigma_u};
    const int t_len = cfg.t_star + cfg.post_window - 1;

    std::vector<char> hits(cfg.n_paths, 0);
    parallel_for(cfg.n_paths, cfg.threads, [&](size_t r) {
        TrueProcessConfig tp;
        tp.a = cfg.a;
        tp.sigma_eta = cfg.true_sigma_eta;
        tp.sigma_u = cfg.sigma_u;
        tp.t_len = t_len;
        tp.seed = mix64(cfg.seed) ^ r;
        tp.forced_jump_time = cfg.t_star;
        tp.forced_jump_size = cfg.jump_mult * cfg.sigma_u;
        const SimPath path = simulate_true_process(tp);
        const StableFit filt = run_misspecified_filter(path, beliefs);

        auto delta_at = [&](int idx) {
            MixtureLRConfig mc;
            mc.m = filt.pred_mean[idx];
            mc.s_S2 = filt.pred_var[idx];
            mc.mu_J = cfg.measure_mu_mult * cfg.sigma_u;
            mc.sigma_J2 = std::pow(cfg.measure_sigma_j_mult * cfg.sigma_u, 2.0);
            mc.p = cfg.measure_p;
            return mixture_log_ratio(mc, path.f[idx]).delta;
        };

        std::vector<double> pre;
        for (int t = cfg.pre_start; t < cfg.t_star; ++t) pre.push_back(delta_at(t - 1));
        const double pre_q = quantile_type7(pre, cfg.pre_quantile);
        double post_max = -1e300;
        for (int t = cfg.t_star; t < cfg.t_star + cfg.post_window; ++t) {
            post_max = std::max(post_max, delta_at(t - 1));
        }
        hits[r] = post_max > pre_q ? 1 : 0;
    });

    double rate = 0.0;
    for (char h : hits) rate += h;
    rate /= cfg.n_paths;

    CheckRow row;
    row.check = "delta_spike_detection_rate";
    row.value = rate;
    row.bound = cfg.required_rate;
    row.pass = rate >= cfg.required_rate;
    row.note = fmt(cfg.jump_mult) + "-sigma break, " + std::to_string(cfg.n_paths) + " paths";
    return {row};
}

std::vector<CheckRow> filter_sanity_experiment(const FilterSanityConfig& cfg) {
    TrueProcessConfig tp;
    tp.a = cfg.a;
    tp.sigma_eta = cfg.sigma_eta;
    tp.sigma_u = cfg.sigma_u;
    tp.t_len = cfg.t_len;
    tp.seed = cfg.seed;
    const SimPath path = simulate_true_process(tp);
    const BeliefParams beliefs{cfg.a, cfg.sigma_eta, cfg.sigma_u};
    const StableFit filt = run_misspecified_filter(path, beliefs);

    const int burn = 100;
    std::vector<double> innov, lps;
    for (int t = burn; t < cfg.t_len; ++t) {
        innov.push_back(path.f[t] - filt.pred_mean[t]);
        lps.push_back(filt.logpred[t]);
    }

    std::vector<CheckRow> rows;
    CheckRow wh;
    wh.check = "filter_innovation_whiteness";
    wh.value = std::abs(autocorr(innov, 1));
    wh.bound = 3.0 / std::sqrt(static_cast<double>(innov.size()));
    wh.pass = wh.value < wh.bound;
    wh.note = "lag-1 autocorrelation, correctly specified filter";
    rows.push_back(wh);

    const SteadyStateGain ss = steady_state_gain(cfg.a, cfg.sigma_eta, cfg.sigma_u);
    const double s2 = ss.pred_var + cfg.sigma_u * cfg.sigma_u;
    const double entropy_rate = -0.5 * std::log(2.0 * M_PI * M_E * s2);
    const double avg_lp = mean(lps);
    const double se = sample_sd(lps) / std::sqrt(static_cast<double>(lps.size()));
    CheckRow en;
    en.check = "filter_predictive_entropy_rate";
    en.value = avg_lp - entropy_rate;
    en.bound = 2.0 * se;
    en.pass = std::abs(avg_lp - entropy_rate) <= 2.0 * se;
    en.note = "avg=" + fmt(avg_lp) + " entropy=" + fmt(entropy_rate);
    rows.push_back(en);
    return rows;
}

std::vector<CheckRow> run_simulation_suite(const SimulationSuiteConfig& cfg) {
    std::vector<CheckRow> rows;
    auto append = [&rows](std::vector<CheckRow> more) {
        rows.insert(rows.end(), more.begin(), more.end());
    };
    append(prop1_experiment(cfg.prop1));
    append(prop2_experiment(cfg.prop2));
    append(theorem1_experiment(cfg.theorem1));
    append(corollary1_experiment(cfg.corollary1));
    append(delta_spike_experiment(cfg.delta_spike));
    append(filter_sanity_experiment(cfg.sanity));
    return rows;
}

}  // namespace mislearn
