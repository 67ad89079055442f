#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mislearn/simulate.hpp"

namespace mislearn {

// One verification row of a simulation experiment; value is the realized
// statistic and bound the numeric criterion it was held against.
struct CheckRow {
    std::string check;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string note;
};

// Believed state-innovation s.d. whose steady-state Kalman gain equals
// `gain` for the given persistence and noise scale.
double sigma_eta_for_gain(double a, double sigma_u, double gain);

struct Prop1Config {
    double a = 0.9;
    double sigma_u = 1.0;
    double target_gain = 0.2;
    double true_sigma_eta = 0.1;
    double jump_size = 1.0;
    int n_paths = 100000;
    int burn_in = 300;
    std::vector<int> horizons = {0, 1, 5, 10};
    std::uint64_t seed = 1;
    int threads = 1;
};
// Monte Carlo mean post-break error against -((1-K)A)^h (1-K) J, plus the
// steady-state gain monotonicity grid.
std::vector<CheckRow> prop1_experiment(const Prop1Config& cfg);

struct Prop2Config {
    int grid_points = 10000;
    int rigidity_points = 1000;
    std::uint64_t seed = 2;
};
// Sign of dg/d|mu_J| across a random grid and agreement of the dg/ds sign
// with the rigidity condition.
std::vector<CheckRow> prop2_experiment(const Prop2Config& cfg);

struct Theorem1Config {
    double gamma = 2.0;
    double sigma_u = 0.2;
    double s_bar = 1.0;
    double a = 0.9;
    double shift_size = 1.0;
    int shift_time = 100;
    int t_len = 200;
    double believed_sigma_eta = 0.05;
    int wedge_reps = 2000;
    std::uint64_t seed = 3;
    int threads = 1;
};
// Exact market-clearing identities each period plus the Monte Carlo wedge
// decay after a supply shift.
std::vector<CheckRow> theorem1_experiment(const Theorem1Config& cfg);

struct Corollary1Config {
    double a = 0.9;
    double sigma_u = 0.02;
    double true_sigma_eta = 0.004;
    double believed_sigma_eta = 0.002;
    std::vector<double> jump_mults = {0.5, 1.0, 2.0};  // times sigma_u
    int horizon = 12;
    int reps_per_size = 3334;
    int burn_in = 240;
    double measure_p = 0.05;
    double measure_mu_mult = 1.0;  // measure's jump mean, times sigma_u
    std::uint64_t seed = 4;
    int threads = 1;
};
std::vector<CheckRow> corollary1_experiment(const Corollary1Config& cfg);

struct DeltaSpikeConfig {
    double a = 0.9;
    double sigma_u = 0.02;
    double true_sigma_eta = 0.005;
    double believed_sigma_eta = 0.002;
    double jump_mult = 4.0;  // break size, times sigma_u
    int t_star = 120;
    int post_window = 3;
    int pre_start = 24;
    double pre_quantile = 0.99;
    double measure_p = 0.05;
    double measure_mu_mult = 2.0;
    double measure_sigma_j_mult = 2.0;
    int n_paths = 500;
    double required_rate = 0.95;
    std::uint64_t seed = 5;
    int threads = 1;
};
// Share of paths where the post-break max of delta exceeds the pre-break
// quantile.
std::vector<CheckRow> delta_spike_experiment(const DeltaSpikeConfig& cfg);

struct FilterSanityConfig {
    double a = 0.6;
    double sigma_eta = 0.05;
    double sigma_u = 0.1;
    int t_len = 100000;
    std::uint64_t seed = 6;
};
// Correctly specified filter: innovation whiteness and convergence of the
// average predictive log-likelihood to the Gaussian entropy rate.
std::vector<CheckRow> filter_sanity_experiment(const FilterSanityConfig& cfg);

// Full default suite in report order.
struct SimulationSuiteConfig {
    Prop1Config prop1;
    Prop2Config prop2;
    Theorem1Config theorem1;
    Corollary1Config corollary1;
    DeltaSpikeConfig delta_spike;
    FilterSanityConfig sanity;
};
std::vector<CheckRow> run_simulation_suite(const SimulationSuiteConfig& cfg);

}  // namespace mislearn
