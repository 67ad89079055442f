#include "mislearn/stable_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mislearn/errors.hpp"
#include "mislearn/optim.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

SteadyStateGain steady_state_gain(double a, double sigma_eta, double sigma_u, double tol,
                                  int max_iter) {
    const double q = sigma_eta * sigma_eta;
    const double r = sigma_u * sigma_u;
    double p = q;  // predicted-variance iterate
    int it = 0;
    for (; it < max_iter; ++it) {
        const double k = p / (p + r);
        const double next = a * a * (1.0 - k) * p + q;
        if (std::abs(next - p) < tol) {
            p = next;
            break;
        }
        p = next;
    }
    SteadyStateGain out;
    out.pred_var = p;
    out.gain = (p + r) > 0.0 ? p / (p + r) : 0.0;
    out.iterations = it;
    return out;
}

StableFit kalman_filter(std::span<const double> series, const StableParams& params,
                        const FilterInit& init) {
    if (series.size() < 2) throw DataError("kalman_filter: series length must be >= 2");
    if (!params.valid()) throw DataError("kalman_filter: invalid parameters");
    for (size_t t = 0; t < series.size(); ++t) {
        if (!std::isfinite(series[t])) {
            throw DataError("kalman_filter: non-finite input at index " + std::to_string(t));
        }
    }

    const int n = static_cast<int>(series.size());
    const double a = params.rho;
    const double r = params.sigma_u * params.sigma_u;
    const double q = params.sigma_eta * params.sigma_eta;

    StableFit fit;
    fit.params = params;
    fit.n_obs = n;
    fit.pred_mean.resize(n);
    fit.pred_var.resize(n);
    fit.filt_mean.resize(n);
    fit.filt_var.resize(n);
    fit.gain.resize(n);
    fit.logpred.resize(n);

    double m = init.mean;
    double p = init.variance;
    double loglik = 0.0;
    for (int t = 0; t < n; ++t) {
        const double m_pred = a * m;
        const double p_pred = a * a * p + q;
        const double s2 = p_pred + r;
        const double k = p_pred / s2;
        const double lp = log_normal_pdf(series[t], m_pred, s2);

        m = m_pred + k * (series[t] - m_pred);
        p = (1.0 - k) * p_pred;

        fit.pred_mean[t] = m_pred;
        fit.pred_var[t] = s2;
        fit.gain[t] = k;
        fit.filt_mean[t] = m;
        fit.filt_var[t] = p;
        fit.logpred[t] = lp;
        loglik += lp;
    }
    fit.loglik = loglik;
    fit.aic = information_criterion_aic(loglik, 3);
    fit.bic = information_criterion_bic(loglik, 3, n);
    return fit;
}

FilterInit stationary_init(const StableParams& params, std::span<const double> series) {
    FilterInit init;
    init.mean = 0.0;
    if (std::abs(params.rho) < 0.999) {
        init.variance = params.sigma_eta * params.sigma_eta / (1.0 - params.rho * params.rho);
    } else {
        init.variance = 1e7 * std::max(sample_var(series), 1e-12);
    }
    return init;
}

double information_criterion_aic(double loglik, int k) { return 2.0 * k - 2.0 * loglik; }

double information_criterion_bic(double loglik, int k, int n) {
    return k * std::log(static_cast<double>(n)) - 2.0 * loglik;
}

namespace {

StableParams decode_stable(const std::vector<double>& z) {
    StableParams p;
    p.rho = from_unbounded_corr(z[0]);
    p.sigma_u = std::max(std::exp(z[1]), kSdFloor);
    p.sigma_eta = std::max(std::exp(z[2]), kSdFloor);
    return p;
}

}  // namespace

StableFit fit_stable_mle(std::span<const double> series, const StableMleOptions& opts) {
    if (static_cast<int>(series.size()) < opts.min_obs) {
        throw DataError("fit_stable_mle: need at least " + std::to_string(opts.min_obs) +
                        " observations, got " + std::to_string(series.size()));
    }

    auto negloglik = [&](const std::vector<double>& z) -> double {
        if (std::abs(z[0]) > 20.0 || std::abs(z[1]) > 60.0 || std::abs(z[2]) > 60.0) {
            return std::numeric_limits<double>::infinity();
        }
        const StableParams p = decode_stable(z);
        const StableFit f = kalman_filter(series, p, stationary_init(p, series));
        return -f.loglik;
    };

    // Moment-based heuristic starts: a grid of persistence values crossed with
    // splits of the sample variance between state and noise.
    const double v = std::max(sample_var(series), 1e-10);
    const double r1 = std::clamp(autocorr(series, 1), -0.9, 0.9);
    const std::vector<double> rho_starts = {0.0, 0.3, 0.6, -0.3, r1};
    const std::vector<std::pair<double, double>> splits = {{0.5, 0.5}, {0.2, 0.8}, {0.8, 0.2}};
    std::vector<std::vector<double>> starts;
    for (size_t i = 0; i < rho_starts.size(); ++i) {
        const auto& [wu, we] = splits[i % splits.size()];
        starts.push_back({to_unbounded_corr(std::clamp(rho_starts[i], -0.95, 0.95)),
                          0.5 * std::log(wu * v), 0.5 * std::log(we * v)});
    }
    for (int e = 0; e < opts.extra_starts; ++e) {
        const auto& [wu, we] = splits[e % splits.size()];
        starts.push_back({to_unbounded_corr(-0.6 + 0.3 * e), 0.5 * std::log(wu * v),
                          0.5 * std::log(we * v)});
    }

    SimplexOptions sopts;
    sopts.rel_tol = opts.rel_tol;
    const SimplexResult best = multi_start_minimize(negloglik, starts, sopts);

    const StableParams p = decode_stable(best.x);
    StableFit fit = kalman_filter(series, p, stationary_init(p, series));
    fit.degenerate = p.sigma_u <= kSdFloor * 1.0000001 || p.sigma_eta <= kSdFloor * 1.0000001;
    return fit;
}

}  // namespace mislearn
