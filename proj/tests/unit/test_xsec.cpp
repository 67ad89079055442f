#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mislearn/cross_section.hpp"
#include "mislearn/rng.hpp"
#include "mislearn/stats.hpp"

using namespace mislearn;

namespace {

DecompositionRow make_row(const std::string& id, double pi, double mu1, double mu0, double ivol,
                          double spike = 0.0) {
    DecompositionRow r;
    r.series_id = id;
    r.pi = pi;
    r.pi_hard = pi;
    r.mu1 = mu1;
    r.mu0 = mu0;
    r.e_delta = pi * mu1 + (1.0 - pi) * mu0;
    r.spike_freq = spike;
    r.ivol = ivol;
    return r;
}

}  // namespace

TEST_CASE("decompose: degenerate probability masses") {
    const std::vector<double> delta = {0.1, 0.3, -0.2, 0.4};
    const std::vector<double> zeros(4, 0.0);
    const DecompositionRow none = decompose("A", delta, zeros, 10.0);
    CHECK_FALSE(none.mu1.has_value());
    REQUIRE(none.mu0.has_value());
    CHECK(none.e_delta == doctest::Approx(*none.mu0).epsilon(1e-15));
    CHECK(none.pi == 0.0);

    const std::vector<double> constant(4, 0.7);
    const std::vector<double> probs = {0.2, 0.8, 0.5, 0.9};
    const DecompositionRow c = decompose("B", constant, probs, 10.0);
    CHECK(*c.mu1 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*c.mu0 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(c.e_delta == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("decomposition identity is exact and the spike split adds up") {
    auto rng = make_rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 50 + static_cast<int>(u01(rng) * 200);
        std::vector<double> delta(n), prob(n);
        for (int t = 0; t < n; ++t) {
            delta[t] = 0.2 * gauss(rng);
            prob[t] = u01(rng);
        }
        const double tau = 0.15;
        const DecompositionRow r = decompose("X", delta, prob, tau);
        REQUIRE(r.mu1.has_value());
        REQUIRE(r.mu0.has_value());
        const double recomposed = r.pi * *r.mu1 + (1.0 - r.pi) * *r.mu0;
        CHECK(std::abs(r.e_delta - recomposed) <= 1e-12);

        if (r.q1 && r.q0) {
            const double spike_recomposed = r.pi_hard * *r.q1 + (1.0 - r.pi_hard) * *r.q0;
            CHECK(std::abs(r.spike_freq - spike_recomposed) <= 1e-12);
        }
    }
}

TEST_CASE("ivol: exact factor combinations have zero residual volatility") {
    auto rng = make_rng(22);
    std::normal_distribution<double> gauss(0.0, 0.03);
    ReturnPanel factors;
    std::vector<Observation> combo, noisy, beta_only;
    for (int i = 0; i < 200; ++i) {
        const MonthIndex t = MonthIndex{1995, 1}.plus(i);
        const double mkt = gauss(rng), smb = gauss(rng), hml = gauss(rng);
        factors.add("MKT", t, mkt);
        factors.add("SMB", t, smb);
        factors.add("HML", t, hml);
        combo.push_back({t, 0.002 + 1.2 * mkt - 0.5 * smb + 0.3 * hml});
    }
    const auto zero = compute_ivol(combo, factors, {"MKT", "SMB", "HML"});
    REQUIRE(zero.has_value());
    CHECK(*zero < 1e-9);

    // orthogonal noise: ivol equals the noise s.d., not the total s.d.
    auto rng2 = make_rng(23);
    std::normal_distribution<double> noise(0.0, 0.02);
    for (int i = 0; i < 200; ++i) {
        const MonthIndex t = MonthIndex{1995, 1}.plus(i);
        const double mkt = factors.observations("MKT")[i].ret;
        const double eps = noise(rng2);
        noisy.push_back({t, eps});
        beta_only.push_back({t, 2.0 * mkt + eps});
    }
    const auto pure = compute_ivol(noisy, factors, {"MKT", "SMB", "HML"});
    REQUIRE(pure.has_value());
    CHECK(std::abs(*pure - 0.02) < 0.003);

    const auto beta = compute_ivol(beta_only, factors, {"MKT", "SMB", "HML"});
    REQUIRE(beta.has_value());
    CHECK(std::abs(*beta - 0.02) < 0.003);
    CHECK(*beta < 0.5 * sample_sd([&] {
        std::vector<double> r;
        for (const auto& o : beta_only) r.push_back(o.ret);
        return r;
    }()));

    // adding an exact factor combination leaves ivol unchanged
    std::vector<Observation> shifted = noisy;
    for (int i = 0; i < 200; ++i) {
        shifted[i].ret += 0.8 * factors.observations("MKT")[i].ret -
                          0.2 * factors.observations("HML")[i].ret;
    }
    const auto invariant = compute_ivol(shifted, factors, {"MKT", "SMB", "HML"});
    CHECK(std::abs(*invariant - *pure) < 1e-9);

    // short overlap is absent
    std::vector<Observation> tiny(noisy.begin(), noisy.begin() + 20);
    CHECK_FALSE(compute_ivol(tiny, factors, {"MKT", "SMB", "HML"}).has_value());
}

TEST_CASE("tertile analysis recovers an exact linear law") {
    std::vector<DecompositionRow> rows;
    for (int i = 0; i < 30; ++i) {
        const double pi = 0.2 + 0.02 * i;
        DecompositionRow r = make_row("s" + std::to_string(i < 10 ? i : i + 10), pi, 0.0, 0.0,
                                      0.01 + 0.001 * i, 0.5 * pi);
        r.e_delta = 2.0 * pi;  // exact law
        rows.push_back(r);
    }
    const auto tertiles = tertile_analysis(rows);
    REQUIRE(tertiles.size() == 3);
    CHECK(tertiles[0].n == 10);
    CHECK(tertiles[1].n == 10);
    CHECK(tertiles[2].n == 10);
    for (const auto& t : tertiles) {
        CHECK(t.e_delta_on_pi.at("pi").estimate == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(t.e_delta_on_pi.r_squared == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(t.spike_on_pi.at("pi").estimate == doctest::Approx(0.5).epsilon(1e-9));
    }

    std::vector<DecompositionRow> few(rows.begin(), rows.begin() + 5);
    CHECK_THROWS_AS(tertile_analysis(few), DataError);
}

TEST_CASE("xsec regressions: independent pi and ivol give a null slope") {
    auto rng = make_rng(24);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<DecompositionRow> rows;
    for (int i = 0; i < 100; ++i) {
        const double pi = 0.4 + 0.05 * gauss(rng);
        const double ivol = 0.02 + 0.005 * std::abs(gauss(rng));
        rows.push_back(make_row("a" + std::to_string(100 + i), pi, 0.1 + 0.02 * gauss(rng), 0.05,
                                ivol, 0.1));
    }
    const auto models = xsec_regressions(rows);
    const auto* pi_on_ivol = &models[1];
    CHECK(pi_on_ivol->name == "pi~ivol_z");
    const auto& c = pi_on_ivol->result.at("ivol_z");
    CHECK(std::abs(c.estimate) < 2.0 * c.se);

    std::vector<DecompositionRow> few(rows.begin(), rows.begin() + 5);
    CHECK_THROWS_AS(xsec_regressions(few), DataError);
}

TEST_CASE("corollary 4.1: forced hypotheses pass, violations are labeled") {
    std::vector<DecompositionRow> good;
    for (int i = 0; i < 20; ++i) {
        const double pi = 0.1 + 0.04 * i;
        good.push_back(make_row("s" + std::to_string(10 + i), pi, 0.3, 0.1, 0.02));
    }
    const Corollary41Report pass = corollary41_check(good, 1e-9);
    CHECK(pass.hypotheses_hold);
    CHECK(pass.monotonicity_violations == 0);
    CHECK(pass.rank_corr > 0.99);
    CHECK(pass.verdict == "supported");

    // steeply decreasing gap: monotonicity fails but outside the hypotheses
    std::vector<DecompositionRow> out_of_scope;
    for (int i = 0; i < 20; ++i) {
        const double pi = 0.1 + 0.04 * i;
        const double mu1 = 0.1 + 2.0 * (0.9 - pi);  // gap falls steeply in pi
        out_of_scope.push_back(make_row("s" + std::to_string(10 + i), pi, mu1, 0.1, 0.02));
    }
    const Corollary41Report violated = corollary41_check(out_of_scope, 1e-9);
    CHECK_FALSE(violated.hypotheses_hold);
    CHECK(violated.verdict == "hypotheses-violated");
    CHECK(violated.monotonicity_violations > 0);
}

TEST_CASE("rank diagnostic produces permutations with deterministic tie order") {
    std::vector<DecompositionRow> rows = {
        make_row("A", 0.5, 0.2, 0.1, 0.02),
        make_row("B", 0.3, 0.2, 0.1, 0.02),
        make_row("C", 0.8, 0.2, 0.1, 0.02),
    };
    const std::vector<double> strict = {0.5, 0.3, 0.8};
    const std::vector<double> tied = {0.7, 0.7, 0.1};
    const RankTable table = rank_diagnostic(rows, {{"pi", strict}, {"tied", tied}});
    CHECK(table.ranks[0] == std::vector<int>{2, 3, 1});
    // ties broken by input (id) order: A before B
    CHECK(table.ranks[1] == std::vector<int>{1, 2, 3});

    std::vector<DecompositionRow> two(rows.begin(), rows.begin() + 2);
    CHECK_THROWS_AS(rank_diagnostic(two, {{"pi", {0.1, 0.2}}}), DataError);
}
