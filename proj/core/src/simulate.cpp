#include "mislearn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mislearn/errors.hpp"
#include "mislearn/rng.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

bool SimPath::has_jump_in(int lo, int hi) const {
    for (int t : jump_times) {
        if (t >= lo && t <= hi) return true;
    }
    return false;
}

SimPath simulate_true_process(const TrueProcessConfig& cfg) {
    if (!cfg.valid()) throw DataError("simulate_true_process: invalid configuration");
    if (cfg.t_len <= 0) throw DataError("simulate_true_process: T must be positive");

    auto rng = make_rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SimPath path;
    path.lambda0 = cfg.lambda0;
    path.lambda.resize(cfg.t_len);
    path.f.resize(cfg.t_len);
    path.noise.resize(cfg.t_len);

    double lam = cfg.lambda0;
    for (int t = 1; t <= cfg.t_len; ++t) {
        double jump = 0.0;
        bool jumped = false;
        if (cfg.forced_jump_time && *cfg.forced_jump_time == t) {
            jump = cfg.forced_jump_size;
            jumped = true;
        } else if (cfg.p > 0.0 && unif(rng) < cfg.p) {
            jump = cfg.mu_j + cfg.sigma_j * gauss(rng);
            jumped = true;
        }
        const double eta = cfg.sigma_eta > 0.0 ? cfg.sigma_eta * gauss(rng) : 0.0;
        lam = cfg.a * lam + eta + jump;
        const double u = cfg.sigma_u > 0.0 ? cfg.sigma_u * gauss(rng) : 0.0;

        path.lambda[t - 1] = lam;
        path.noise[t - 1] = u;
        path.f[t - 1] = lam + u;
        if (jumped) {
            path.jump_times.push_back(t);
            path.jump_sizes[t] = jump;
        }
    }
    return path;
}

StableFit run_misspecified_filter(const SimPath& path, const BeliefParams& beliefs) {
    StableParams p;
    p.rho = beliefs.a;
    p.sigma_u = std::max(beliefs.sigma_u, kSdFloor);
    p.sigma_eta = std::max(beliefs.sigma_eta, kSdFloor);
    return kalman_filter(path.f, p, stationary_init(p, path.f));
}

PostBreakErrors post_break_error_path(const SimPath& path, const StableFit& filt, int t_star,
                                      int h_max) {
    if (!std::binary_search(path.jump_times.begin(), path.jump_times.end(), t_star)) {
        throw DataError("post_break_error_path: t_star is not a jump time");
    }
    if (path.has_jump_in(t_star + 1, t_star + h_max)) {
        throw DataError("post_break_error_path: further jumps inside the horizon window");
    }
    const int n = static_cast<int>(path.f.size());
    if (t_star < 1 || t_star + h_max > n) {
        throw DataError("post_break_error_path: horizon exceeds the simulated sample");
    }

    PostBreakErrors out;
    out.e_pre = t_star >= 2 ? filt.filt_mean[t_star - 2] - path.lambda[t_star - 2]
                            : 0.0 - path.lambda0;
    out.e.resize(h_max + 1);
    for (int h = 0; h <= h_max; ++h) {
        const int idx = t_star - 1 + h;
        out.e[h] = filt.filt_mean[idx] - path.lambda[idx];
    }
    return out;
}

GainGridResult gain_monotonicity_check(std::span<const double> sigma_eta_grid, double a,
                                       double sigma_u) {
    for (size_t i = 0; i + 1 < sigma_eta_grid.size(); ++i) {
        if (!(sigma_eta_grid[i] < sigma_eta_grid[i + 1]) || sigma_eta_grid[i] < 0.0) {
            throw DataError("gain_monotonicity_check: grid must be strictly increasing, >= 0");
        }
    }
    GainGridResult out;
    out.sigma_eta.assign(sigma_eta_grid.begin(), sigma_eta_grid.end());
    for (double se : sigma_eta_grid) {
        const SteadyStateGain ss = steady_state_gain(a, se, sigma_u);
        out.gains.push_back(ss.gain);
        out.spectral.push_back(std::abs((1.0 - ss.gain) * a));
    }
    out.gains_strictly_increasing = true;
    out.spectral_strictly_decreasing = true;
    for (size_t i = 0; i + 1 < out.gains.size(); ++i) {
        if (!(out.gains[i] < out.gains[i + 1])) out.gains_strictly_increasing = false;
        if (!(out.spectral[i] > out.spectral[i + 1])) out.spectral_strictly_decreasing = false;
    }
    return out;
}

EquilibriumPath simulate_equilibrium(const EquilibriumConfig& cfg, const BeliefParams& beliefs) {
    if (!cfg.valid()) throw DataError("simulate_equilibrium: invalid configuration");
    if (cfg.t_len <= 0) throw DataError("simulate_equilibrium: T must be positive");

    const double price_scale = cfg.gamma * cfg.sigma_u * cfg.sigma_u;

    // Supply shifts enter the true premium as breaks of size gamma*sigma_u^2*shift.
    TrueProcessConfig tp;
    tp.a = cfg.a;
    tp.sigma_eta = cfg.sigma_eta;
    tp.sigma_u = cfg.sigma_u;
    tp.t_len = cfg.t_len;
    tp.seed = cfg.seed;

    std::map<int, double> premium_jumps;
    for (const auto& s : cfg.shifts) {
        if (s.time < 1 || s.time > cfg.t_len) {
            throw DataError("simulate_equilibrium: shift time outside the sample");
        }
        premium_jumps[s.time] += price_scale * s.size;
    }

    // Generate the premium path with the deterministic jump schedule.
    auto rng = make_rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> lambda(cfg.t_len), f(cfg.t_len);
    double lam = 0.0;
    for (int t = 1; t <= cfg.t_len; ++t) {
        const double eta = cfg.sigma_eta > 0.0 ? cfg.sigma_eta * gauss(rng) : 0.0;
        const auto it = premium_jumps.find(t);
        lam = cfg.a * lam + eta + (it != premium_jumps.end() ? it->second : 0.0);
        const double u = cfg.sigma_u * gauss(rng);
        lambda[t - 1] = lam;
        f[t - 1] = lam + u;
    }

    std::vector<double> lambda_hat(cfg.t_len);
    if (cfg.oracle_beliefs) {
        lambda_hat = lambda;
    } else {
        StableParams sp;
        sp.rho = beliefs.a;
        sp.sigma_u = std::max(beliefs.sigma_u, kSdFloor);
        sp.sigma_eta = std::max(beliefs.sigma_eta, kSdFloor);
        lambda_hat = kalman_filter(f, sp, stationary_init(sp, f)).filt_mean;
    }

    EquilibriumPath path;
    path.lambda = lambda;
    path.lambda_hat = lambda_hat;
    path.f = f;
    path.m_s.resize(cfg.t_len);
    path.m_t.resize(cfg.t_len);
    path.w.resize(cfg.t_len);
    path.supply.resize(cfg.t_len);
    path.demand.resize(cfg.t_len);
    path.supply_target.resize(cfg.t_len);

    double cum_shift = 0.0;
    for (int t = 0; t < cfg.t_len; ++t) {
        const auto it = premium_jumps.find(t + 1);
        if (it != premium_jumps.end()) cum_shift += it->second / price_scale;
        path.supply_target[t] = cfg.s_bar + cum_shift;

        const double base = price_scale * cfg.s_bar;
        path.m_s[t] = base + cfg.a * lambda_hat[t];
        path.m_t[t] = base + cfg.a * lambda[t];
        path.supply[t] = path.m_s[t] / price_scale;  // absorbed supply: S_bar + nu_t
        path.demand[t] = path.m_s[t] / price_scale;
        path.w[t] = path.m_t[t] - path.m_s[t];
    }
    return path;
}

Corollary1Report corollary1_check(std::span<const Corollary1Input> replications) {
    Corollary1Report rep;
    rep.n = static_cast<int>(replications.size());
    if (rep.n < 2) {
        rep.insufficient_sample = true;
        return rep;
    }
    std::vector<double> deltas, cums;
    deltas.reserve(replications.size());
    cums.reserve(replications.size());
    std::map<double, std::pair<double, int>> by_jump;
    for (const auto& r : replications) {
        deltas.push_back(r.delta_at_onset);
        cums.push_back(r.cum_return);
        auto& acc = by_jump[r.jump_size];
        acc.first += r.cum_return;
        acc.second += 1;
    }
    rep.rank_corr = spearman(deltas, cums);
    rep.rank_corr_positive = rep.rank_corr > 0.0;
    rep.zero_consistent = std::abs(rep.rank_corr) <= 3.0 / std::sqrt(static_cast<double>(rep.n - 1));
    for (const auto& [size, acc] : by_jump) {
        rep.mean_cum_by_jump.emplace_back(size, acc.first / acc.second);
    }
    rep.mean_increasing_in_jump = true;
    for (size_t i = 0; i + 1 < rep.mean_cum_by_jump.size(); ++i) {
        if (!(rep.mean_cum_by_jump[i].second < rep.mean_cum_by_jump[i + 1].second)) {
            rep.mean_increasing_in_jump = false;
        }
    }
    return rep;
}

}  // namespace mislearn
