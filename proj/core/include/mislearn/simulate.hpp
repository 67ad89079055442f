#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mislearn/stable_filter.hpp"

namespace mislearn {

// Jump-augmented AR(1)-plus-noise generator (scalar per series).
struct TrueProcessConfig {
    double a = 0.9;          // state persistence, |a| < 1
    double sigma_eta = 0.01; // true state innovation s.d.
    double sigma_u = 0.02;   // observation noise s.d.
    double p = 0.0;          // jump probability per period
    double mu_j = 0.0;       // jump mean
    double sigma_j = 0.0;    // jump s.d.
    int t_len = 0;
    std::uint64_t seed = 0;
    double lambda0 = 0.0;
    // Deterministic injected break; the conditioning device used by the
    // proposition checks (exactly one break, at a known date).
    std::optional<int> forced_jump_time;  // 1-based
    double forced_jump_size = 0.0;

    bool valid() const {
        return std::abs(a) < 1.0 && sigma_eta >= 0.0 && sigma_u >= 0.0 && sigma_j >= 0.0 &&
               p >= 0.0 && p <= 1.0;
    }
};

struct SimPath {
    double lambda0 = 0.0;
    std::vector<double> lambda;      // true state, t = 1..T
    std::vector<double> f;           // observed returns
    std::vector<double> noise;       // recorded u_t draws
    std::vector<int> jump_times;     // 1-based, sorted
    std::map<int, double> jump_sizes;

    bool has_jump_in(int lo, int hi) const;  // any jump time in [lo, hi]
};

SimPath simulate_true_process(const TrueProcessConfig& cfg);

struct BeliefParams {
    double a = 0.9;
    double sigma_eta = 0.001;  // the understated state volatility
    double sigma_u = 0.02;
};

// Kalman recursion under the believed parameters with a stationary believed
// prior. Gains converge to the steady-state gain of the believed model.
StableFit run_misspecified_filter(const SimPath& path, const BeliefParams& beliefs);

struct PostBreakErrors {
    double e_pre = 0.0;      // e_{t*-1} = lambda_hat - lambda before the break
    std::vector<double> e;   // e_{t*+h}, h = 0..h_max
};

// Requires t_star in jump_times and no further jumps in (t_star, t_star+h_max].
PostBreakErrors post_break_error_path(const SimPath& path, const StableFit& filt, int t_star,
                                      int h_max);

struct GainGridResult {
    std::vector<double> sigma_eta;
    std::vector<double> gains;
    std::vector<double> spectral;  // |(1-K) a|
    bool gains_strictly_increasing = false;
    bool spectral_strictly_decreasing = false;
};

GainGridResult gain_monotonicity_check(std::span<const double> sigma_eta_grid, double a,
                                       double sigma_u);

struct SupplyShift {
    int time = 0;     // 1-based
    double size = 0;  // added to supply from `time` onward
};

// CARA market-clearing simulation. Supply shifts transmit one-for-one into
// premium breaks of size gamma*sigma_u^2*shift; the reported supply is the
// amount absorbed in equilibrium given the filtered subjective mean, so the
// clearing identities hold exactly every period.
struct EquilibriumConfig {
    double gamma = 2.0;
    double sigma_u = 0.2;       // return noise scale
    double s_bar = 1.0;         // baseline supply
    std::vector<SupplyShift> shifts;
    double a = 0.9;             // true premium persistence
    double sigma_eta = 0.0;     // true premium innovation s.d.
    int t_len = 0;
    std::uint64_t seed = 0;
    bool oracle_beliefs = false;  // beliefs equal the truth (zero wedge)

    bool valid() const { return gamma > 0.0 && sigma_u > 0.0 && std::abs(a) < 1.0; }
};

struct EquilibriumPath {
    std::vector<double> m_s;        // subjective conditional mean
    std::vector<double> m_t;        // true conditional mean
    std::vector<double> w;          // belief wedge m_t - m_s
    std::vector<double> supply;     // S_t absorbed in equilibrium
    std::vector<double> demand;     // x_t = m_s / (gamma sigma_u^2)
    std::vector<double> f;          // realized returns
    std::vector<double> lambda;     // true premium deviation path
    std::vector<double> lambda_hat; // filtered premium deviation
    std::vector<double> supply_target;  // s_bar + cumulative shifts
};

EquilibriumPath simulate_equilibrium(const EquilibriumConfig& cfg, const BeliefParams& beliefs);

struct Corollary1Input {
    double delta_at_onset = 0.0;
    double cum_return = 0.0;
    double jump_size = 0.0;
};

struct Corollary1Report {
    int n = 0;
    double rank_corr = 0.0;
    bool rank_corr_positive = false;
    bool zero_consistent = false;  // |corr| within 3/sqrt(n-1) of zero
    std::vector<std::pair<double, double>> mean_cum_by_jump;
    bool mean_increasing_in_jump = false;
    bool insufficient_sample = false;
};

Corollary1Report corollary1_check(std::span<const Corollary1Input> replications);

}  // namespace mislearn
