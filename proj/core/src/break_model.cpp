#include "mislearn/break_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mislearn/errors.hpp"
#include "mislearn/optim.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

std::array<double, 2> ergodic_distribution(const BreakParams& params) {
    const double denom = (1.0 - params.p00) + (1.0 - params.p11);
    if (denom <= 0.0) return {0.5, 0.5};
    const double pi1 = (1.0 - params.p00) / denom;
    return {1.0 - pi1, pi1};
}

BreakFit hamilton_filter(std::span<const double> series, const BreakParams& params,
                         const std::array<double, 2>& init) {
    if (!params.valid()) throw DataError("hamilton_filter: invalid parameters");
    for (size_t t = 0; t < series.size(); ++t) {
        if (!std::isfinite(series[t])) {
            throw DataError("hamilton_filter: non-finite input at index " + std::to_string(t));
        }
    }

    const int n = static_cast<int>(series.size());
    const double trans[2][2] = {{params.p00, 1.0 - params.p00}, {1.0 - params.p11, params.p11}};
    const double mu[2] = {params.mu0, params.mu1};
    const double var[2] = {params.sd0 * params.sd0, params.sd1 * params.sd1};

    BreakFit fit;
    fit.params = params;
    fit.n_obs = n;
    fit.pred_prob.resize(n);
    fit.filt_prob.resize(n);
    fit.next_break_prob.resize(n);
    fit.logpred.resize(n);

    std::array<double, 2> filt = init;
    double loglik = 0.0;
    for (int t = 0; t < n; ++t) {
        std::array<double, 2> pred{};
        for (int j = 0; j < 2; ++j) pred[j] = filt[0] * trans[0][j] + filt[1] * trans[1][j];

        // combine in log space so tail observations cannot underflow
        double term[2];
        for (int j = 0; j < 2; ++j) {
            term[j] = pred[j] > 0.0 ? std::log(pred[j]) + log_normal_pdf(series[t], mu[j], var[j])
                                    : -std::numeric_limits<double>::infinity();
        }
        const double hi = std::max(term[0], term[1]);
        if (!std::isfinite(hi)) {
            throw DataError("hamilton_filter: degenerate predictive density at index " +
                            std::to_string(t));
        }
        const double lp = hi + std::log(std::exp(term[0] - hi) + std::exp(term[1] - hi));

        for (int j = 0; j < 2; ++j) filt[j] = std::exp(term[j] - lp);
        const double norm = filt[0] + filt[1];
        filt[0] /= norm;
        filt[1] /= norm;

        fit.pred_prob[t] = pred;
        fit.filt_prob[t] = filt;
        fit.next_break_prob[t] = filt[0] * trans[0][1] + filt[1] * trans[1][1];
        fit.logpred[t] = lp;
        loglik += lp;
    }
    fit.loglik = loglik;
    fit.aic = information_criterion_aic(loglik, 6);
    fit.bic = information_criterion_bic(loglik, 6, n);
    return fit;
}

namespace {

BreakParams decode_break(const std::vector<double>& z) {
    BreakParams p;
    p.mu0 = z[0];
    p.mu1 = z[1];
    p.sd0 = std::max(std::exp(z[2]), kSdFloor);
    p.sd1 = std::max(std::exp(z[3]), kSdFloor);
    p.p00 = from_unbounded_prob(z[4]);
    p.p11 = from_unbounded_prob(z[5]);
    return p;
}

BreakParams relabel_high_variance(const BreakParams& p) {
    if (p.sd1 >= p.sd0) return p;
    BreakParams q;
    q.mu0 = p.mu1;
    q.mu1 = p.mu0;
    q.sd0 = p.sd1;
    q.sd1 = p.sd0;
    q.p00 = p.p11;
    q.p11 = p.p00;
    return q;
}

}  // namespace

BreakFit fit_break_mle(std::span<const double> series, const BreakMleOptions& opts) {
    if (static_cast<int>(series.size()) < opts.min_obs) {
        throw DataError("fit_break_mle: need at least " + std::to_string(opts.min_obs) +
                        " observations, got " + std::to_string(series.size()));
    }

    auto negloglik = [&](const std::vector<double>& z) -> double {
        for (double zi : z) {
            if (std::abs(zi) > 60.0) return std::numeric_limits<double>::infinity();
        }
        const BreakParams p = decode_break(z);
        const BreakFit f = hamilton_filter(series, p, ergodic_distribution(p));
        return -f.loglik;
    };

    const double m = mean(series);
    const double sd = std::max(sample_sd(series), 1e-6);
    struct Start {
        double mu0, mu1, sd0, sd1, p00, p11;
    };
    const std::vector<Start> heuristics = {
        {m, m, 0.5 * sd, 2.0 * sd, 0.95, 0.95},
        {m, m, 0.7 * sd, 1.5 * sd, 0.90, 0.90},
        {m, m - sd, 0.6 * sd, 2.0 * sd, 0.95, 0.90},
        {m, m + sd, 0.6 * sd, 2.0 * sd, 0.95, 0.90},
        {m, m, 0.8 * sd, 3.0 * sd, 0.98, 0.95},
        {m - 0.5 * sd, m + 0.5 * sd, 0.5 * sd, 1.5 * sd, 0.90, 0.95},
        {m, m, 0.4 * sd, 1.2 * sd, 0.85, 0.85},
        {m, m, 0.9 * sd, 2.5 * sd, 0.97, 0.93},
    };
    std::vector<std::vector<double>> starts;
    for (const auto& h : heuristics) {
        starts.push_back({h.mu0, h.mu1, std::log(h.sd0), std::log(h.sd1), to_unbounded_prob(h.p00),
                          to_unbounded_prob(h.p11)});
    }

    SimplexOptions sopts;
    sopts.rel_tol = opts.rel_tol;
    sopts.max_iter = 40000;
    const SimplexResult best = multi_start_minimize(negloglik, starts, sopts);

    const BreakParams p = relabel_high_variance(decode_break(best.x));
    BreakFit fit = hamilton_filter(series, p, ergodic_distribution(p));
    fit.degenerate = p.sd0 <= kSdFloor * 1.0000001 || p.sd1 <= kSdFloor * 1.0000001 ||
                     p.p00 > 0.9999 || p.p11 > 0.9999;
    return fit;
}

std::vector<double> break_probability_series(const BreakFit& fit, BreakProbMode mode) {
    std::vector<double> out(fit.filt_prob.size());
    for (size_t t = 0; t < out.size(); ++t) {
        out[t] = mode == BreakProbMode::Filtered ? fit.filt_prob[t][1] : fit.next_break_prob[t];
    }
    return out;
}

MixtureLogRatio mixture_log_ratio(const MixtureLRConfig& cfg, double x) {
    if (!cfg.valid()) throw DataError("mixture_log_ratio: invalid configuration");
    const double sS2 = cfg.s_S2;
    const double sB2 = cfg.s_B2();
    const double d = x - cfg.m;
    const double dj = d - cfg.mu_J;

    MixtureLogRatio out;
    out.g = 0.5 * std::log(sS2 / sB2) + d * d / (2.0 * sS2) - dj * dj / (2.0 * sB2);
    if (cfg.p <= 0.0) {
        out.delta = 0.0;
    } else if (cfg.p >= 1.0) {
        out.delta = out.g;
    } else {
        // log[(1-p) + p e^g] via log-sum-exp
        const double a = std::log1p(-cfg.p);
        const double b = std::log(cfg.p) + out.g;
        const double hi = std::max(a, b);
        out.delta = hi + std::log1p(std::exp(std::min(a, b) - hi));
    }
    return out;
}

Prop2Report prop2_diagnostics(const MixtureLRConfig& cfg) {
    if (!cfg.valid()) throw DataError("prop2_diagnostics: invalid configuration");
    const double s = cfg.s_S2;
    const double sj = cfg.sigma_J2;
    const double aj = std::abs(cfg.mu_J);

    auto g_at = [&](double mu_abs, double s_var) {
        MixtureLRConfig c = cfg;
        c.mu_J = mu_abs;  // g at x = m + mu_J depends on mu_J only through |mu_J|
        c.s_S2 = s_var;
        return mixture_log_ratio(c, c.m + c.mu_J).g;
    };

    Prop2Report rep;
    rep.g_at_break = g_at(aj, s);
    rep.dg_dmuJ_analytic = aj / s;
    rep.dg_ds_analytic = sj / (2.0 * s * (s + sj)) - cfg.mu_J * cfg.mu_J / (2.0 * s * s);
    const double h_mu = std::max(1e-6, 1e-6 * aj);
    rep.dg_dmuJ_numeric = (g_at(aj + h_mu, s) - g_at(std::max(aj - h_mu, 0.0), s)) /
                          (h_mu + std::min(h_mu, aj));
    const double h_s = 1e-6 * s;
    rep.dg_ds_numeric = (g_at(aj, s + h_s) - g_at(aj, s - h_s)) / (2.0 * h_s);
    rep.rigidity_condition = cfg.mu_J * cfg.mu_J > sj * s / (s + sj);
    return rep;
}

}  // namespace mislearn
