#include <benchmark/benchmark.h>

#include "mislearn/break_model.hpp"
#include "mislearn/hp_filter.hpp"
#include "mislearn/regression.hpp"
#include "mislearn/rng.hpp"
#include "mislearn/simulate.hpp"
#include "mislearn/stable_filter.hpp"

using namespace mislearn;

namespace {

std::vector<double> monthly_series(int n) {
    TrueProcessConfig cfg;
    cfg.a = 0.4;
    cfg.sigma_eta = 0.01;
    cfg.sigma_u = 0.03;
    cfg.p = 0.02;
    cfg.mu_j = 0.05;
    cfg.sigma_j = 0.02;
    cfg.t_len = n;
    cfg.seed = 7;
    return simulate_true_process(cfg).f;
}

void bm_kalman_filter(benchmark::State& state) {
    const auto f = monthly_series(static_cast<int>(state.range(0)));
    StableParams p;
    p.rho = 0.4;
    p.sigma_u = 0.03;
    p.sigma_eta = 0.01;
    const FilterInit init = stationary_init(p, f);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kalman_filter(f, p, init).loglik);
    }
}
BENCHMARK(bm_kalman_filter)->Arg(751)->Arg(1189);

void bm_hamilton_filter(benchmark::State& state) {
    const auto f = monthly_series(static_cast<int>(state.range(0)));
    BreakParams p;
    p.mu0 = 0.01;
    p.mu1 = 0.0;
    p.sd0 = 0.028;
    p.sd1 = 0.056;
    p.p00 = 0.95;
    p.p11 = 0.95;
    const auto init = ergodic_distribution(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hamilton_filter(f, p, init).loglik);
    }
}
BENCHMARK(bm_hamilton_filter)->Arg(751)->Arg(1189);

void bm_stable_mle(benchmark::State& state) {
    const auto f = monthly_series(751);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_stable_mle(f).loglik);
    }
}
BENCHMARK(bm_stable_mle)->Unit(benchmark::kMillisecond);

void bm_break_mle(benchmark::State& state) {
    const auto f = monthly_series(751);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_break_mle(f).loglik);
    }
}
BENCHMARK(bm_break_mle)->Unit(benchmark::kMillisecond);

void bm_one_sided_hp(benchmark::State& state) {
    const auto y = monthly_series(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(one_sided_hp_detrend(y, 129600.0).back());
    }
}
BENCHMARK(bm_one_sided_hp)->Arg(121)->Arg(751)->Unit(benchmark::kMillisecond);

void bm_newey_west_regression(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto rng = make_rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DataTable t;
    for (int i = 0; i < n; ++i) {
        t.series.push_back("s" + std::to_string(i % 6));
        t.month.push_back(MonthIndex{1963, 7}.plus(i / 6));
        t.columns["y"].push_back(gauss(rng));
        t.columns["x1"].push_back(gauss(rng));
        t.columns["x2"].push_back(gauss(rng));
    }
    RegressionSpec spec;
    spec.y = "y";
    spec.x = {"x1", "x2"};
    spec.cov.kind = CovEstimator::NeweyWest;
    spec.cov.nw_lag = 12;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_regression(t, spec).n_obs);
    }
}
BENCHMARK(bm_newey_west_regression)->Arg(4872)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
