#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mislearn/hp_filter.hpp"
#include "mislearn/mislearning.hpp"
#include "mislearn/rng.hpp"
#include "mislearn/stats.hpp"

using namespace mislearn;

namespace {

std::vector<double> gaussian_series(int n, double sd, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, sd);
    std::vector<double> out(n);
    for (auto& x : out) x = gauss(rng);
    return out;
}

}  // namespace

TEST_CASE("identical predictive densities give delta of zero") {
    const auto f = gaussian_series(120, 0.03, 1);
    StableParams sp;
    sp.rho = 0.0;
    sp.sigma_u = 0.03;
    sp.sigma_eta = kSdFloor;
    const StableFit stable = kalman_filter(f, sp, FilterInit{0.0, 0.0});

    BreakParams bp;
    bp.mu0 = bp.mu1 = 0.0;
    // match the stable model's predictive variance including the floor term
    const double s2 = sp.sigma_u * sp.sigma_u + kSdFloor * kSdFloor;
    bp.sd0 = bp.sd1 = std::sqrt(s2);
    bp.p00 = bp.p11 = 0.9;
    const BreakFit brk = hamilton_filter(f, bp, ergodic_distribution(bp));

    const auto delta = compute_delta(stable, brk);
    for (double d : delta) CHECK(std::abs(d) < 1e-9);
}

TEST_CASE("delta sums to the loglik difference") {
    const auto f = gaussian_series(500, 0.05, 2);
    StableParams sp;
    sp.rho = 0.3;
    sp.sigma_u = 0.04;
    sp.sigma_eta = 0.01;
    const StableFit stable = kalman_filter(f, sp, stationary_init(sp, f));
    BreakParams bp;
    bp.mu0 = 0.001;
    bp.mu1 = -0.002;
    bp.sd0 = 0.03;
    bp.sd1 = 0.08;
    bp.p00 = 0.95;
    bp.p11 = 0.9;
    const BreakFit brk = hamilton_filter(f, bp, ergodic_distribution(bp));
    const auto delta = compute_delta(stable, brk);
    double sum = 0.0;
    for (double d : delta) sum += d;
    CHECK(sum == doctest::Approx(brk.loglik - stable.loglik).epsilon(1e-9));
}

TEST_CASE("timeline mismatch raises an error listing months") {
    const auto f = gaussian_series(60, 0.02, 3);
    StableParams sp;
    sp.rho = 0.0;
    sp.sigma_u = 0.02;
    sp.sigma_eta = 0.01;
    StableFit stable = kalman_filter(f, sp, stationary_init(sp, f));
    BreakParams bp;
    bp.sd0 = 0.02;
    bp.sd1 = 0.03;
    BreakFit brk = hamilton_filter(f, bp, ergodic_distribution(bp));
    for (int i = 0; i < 60; ++i) {
        stable.months.push_back(MonthIndex{2000, 1}.plus(i));
        brk.months.push_back(MonthIndex{2000, 2}.plus(i));
    }
    CHECK_THROWS_WITH_AS(compute_delta(stable, brk), doctest::Contains("2000-01"), DataError);
}

TEST_CASE("causality: truncating the sample leaves earlier deltas unchanged") {
    const auto f = gaussian_series(300, 0.04, 4);
    StableParams sp;
    sp.rho = 0.4;
    sp.sigma_u = 0.03;
    sp.sigma_eta = 0.015;
    BreakParams bp;
    bp.mu0 = 0.0;
    bp.mu1 = 0.005;
    bp.sd0 = 0.025;
    bp.sd1 = 0.07;
    bp.p00 = 0.94;
    bp.p11 = 0.9;

    const auto full_s = kalman_filter(f, sp, stationary_init(sp, f));
    const auto full_b = hamilton_filter(f, bp, ergodic_distribution(bp));
    const auto full_delta = compute_delta(full_s, full_b);

    const std::vector<double> prefix(f.begin(), f.begin() + 150);
    const auto pre_s = kalman_filter(prefix, sp, stationary_init(sp, f));
    const auto pre_b = hamilton_filter(prefix, bp, ergodic_distribution(bp));
    const auto pre_delta = compute_delta(pre_s, pre_b);
    for (int t = 0; t < 150; ++t) CHECK(pre_delta[t] == full_delta[t]);
}

TEST_CASE("rolling delta windows") {
    const std::vector<double> d = {1.0, 2.0, 3.0, 4.0};
    const auto r1 = rolling_delta(d, 1);
    for (int t = 0; t < 4; ++t) CHECK(*r1[t] == d[t]);

    const auto r2 = rolling_delta(d, 2);
    CHECK_FALSE(r2[0].has_value());
    CHECK(*r2[1] == doctest::Approx(1.5));
    CHECK(*r2[2] == doctest::Approx(2.5));
    CHECK(*r2[3] == doctest::Approx(3.5));

    const std::vector<double> c(10, 0.7);
    for (const auto& v : rolling_delta(c, 6)) {
        if (v) CHECK(*v == doctest::Approx(0.7).epsilon(1e-12));
    }

    CHECK_THROWS_AS(rolling_delta(d, 0), DataError);
}

TEST_CASE("spike threshold is the type-7 quantile") {
    std::vector<double> pool;
    for (int i = 1; i <= 100; ++i) pool.push_back(static_cast<double>(i));
    CHECK(spike_threshold(pool, 0.9) == doctest::Approx(90.1).epsilon(1e-12));
    CHECK(spike_threshold(pool, 0.5) == doctest::Approx(50.5).epsilon(1e-12));

    CHECK_THROWS_AS(spike_threshold(std::vector<double>{}, 0.9), DataError);
    CHECK_THROWS_AS(spike_threshold(pool, 1.0), DataError);

    // pooled spike frequency at the 90th percentile is ~10% by construction
    const auto big = gaussian_series(5000, 1.0, 5);
    const double tau = spike_threshold(big, 0.9);
    int count = 0;
    for (double d : big) count += d > tau ? 1 : 0;
    const double freq = count / 5000.0;
    CHECK(std::abs(freq - 0.10) < 1.0 / std::sqrt(5000.0));
}

TEST_CASE("model comparison sign conventions") {
    StableFit s;
    s.loglik = 100.0;
    s.n_obs = 200;
    s.aic = information_criterion_aic(100.0, 3);
    s.bic = information_criterion_bic(100.0, 3, 200);
    BreakFit b;
    b.loglik = 100.0;
    b.n_obs = 200;
    b.aic = information_criterion_aic(100.0, 6);
    b.bic = information_criterion_bic(100.0, 6, 200);
    const ModelComparisonRow row = model_comparison_row("X", s, b);
    CHECK(row.d_loglik == 0.0);
    CHECK(row.d_aic == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(row.d_bic == doctest::Approx(-3.0 * std::log(200.0)).epsilon(1e-12));

    b.loglik = 158.53;
    b.aic = information_criterion_aic(b.loglik, 6);
    b.bic = information_criterion_bic(b.loglik, 6, 200);
    const ModelComparisonRow gain = model_comparison_row("X", s, b);
    CHECK(gain.d_loglik == doctest::Approx(58.53));
    CHECK(gain.d_aic == doctest::Approx(2.0 * 58.53 - 6.0).epsilon(1e-9));
}

TEST_CASE("hp trend reproduces lines exactly and the one-sided cycle is causal") {
    const double lambda = 129600.0;

    std::vector<double> line(40);
    for (int t = 0; t < 40; ++t) line[t] = 0.3 + 0.05 * t;
    const auto cycle = one_sided_hp_detrend(line, lambda);
    for (int t = 0; t < 40; ++t) CHECK(std::abs(cycle[t]) < 1e-9);

    const std::vector<double> flat(25, 2.0);
    for (double c : one_sided_hp_detrend(flat, lambda)) CHECK(std::abs(c) < 1e-9);

    const auto y = gaussian_series(120, 1.0, 6);
    const auto full = one_sided_hp_detrend(y, lambda);
    const std::vector<double> prefix(y.begin(), y.begin() + 70);
    const auto part = one_sided_hp_detrend(prefix, lambda);
    for (int t = 0; t < 70; ++t) CHECK(full[t] == part[t]);  // bit-identical

    CHECK_THROWS_AS(hp_trend(y, 0.0), DataError);
}

TEST_CASE("hp trend matches the normal equations on a small case") {
    // direct check: (I + lambda D'D) tau = y for T = 6
    const std::vector<double> y = {1.0, 0.2, -0.4, 0.9, 1.4, 0.3};
    const double lam = 7.0;
    const auto tau = hp_trend(y, lam);
    const int n = 6;
    // rebuild A tau and compare with y
    std::vector<std::vector<double>> dtd(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n - 2; ++r) {
        const double row[3] = {1.0, -2.0, 1.0};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) dtd[r + a][r + b] += row[a] * row[b];
        }
    }
    for (int i = 0; i < n; ++i) {
        double acc = tau[i];
        for (int j = 0; j < n; ++j) acc += lam * dtd[i][j] * tau[j];
        CHECK(acc == doctest::Approx(y[i]).epsilon(1e-9));
    }
}
