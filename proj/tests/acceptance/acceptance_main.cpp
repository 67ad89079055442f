// End-to-end acceptance suite. Each criterion prints one line:
//   [PASS|FAIL|SKIP] <n>. <name> -- <detail>
// and the process exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "mislearn/break_model.hpp"
#include "mislearn/cross_section.hpp"
#include "mislearn/csv.hpp"
#include "mislearn/experiments.hpp"
#include "mislearn/hp_filter.hpp"
#include "mislearn/pipeline.hpp"
#include "mislearn/regression.hpp"
#include "mislearn/rng.hpp"
#include "mislearn/simulate.hpp"
#include "mislearn/stable_filter.hpp"
#include "mislearn/stats.hpp"
#include "support/oracles.hpp"

using namespace mislearn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome kalman_oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        StableParams p;
        p.rho = -0.95 + 1.9 * u01(rng);
        p.sigma_u = 0.01 + 0.3 * u01(rng);
        p.sigma_eta = 0.01 + 0.3 * u01(rng);
        FilterInit init{u01(rng) - 0.5, 0.05 + u01(rng)};
        std::vector<double> f(5);
        for (auto& x : f) x = u01(rng) - 0.5;
        const StableFit fit = kalman_filter(f, p, init);
        const auto oracle = oracles::kalman_joint_gaussian(f, p, init);
        worst = std::max(worst, std::abs(fit.loglik - oracle.loglik));
        worst = std::max(worst, std::abs(fit.filt_mean.back() - oracle.post_mean));
        worst = std::max(worst, std::abs(fit.filt_var.back() - oracle.post_var));
    }
    const double secs = elapsed_s(start);
    Outcome out;
    out.pass = worst < 1e-10 && secs < 1.0;
    out.detail = "max deviation " + fmt(worst) + ", " + fmt(secs) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome hamilton_oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        BreakParams p;
        p.mu0 = 0.05 * (u01(rng) - 0.5);
        p.mu1 = 0.1 * (u01(rng) - 0.5);
        p.sd0 = 0.01 + 0.08 * u01(rng);
        p.sd1 = 0.02 + 0.12 * u01(rng);
        p.p00 = 0.4 + 0.59 * u01(rng);
        p.p11 = 0.4 + 0.59 * u01(rng);
        std::vector<double> f(10);
        for (auto& x : f) x = 0.2 * (u01(rng) - 0.5);
        const auto init = ergodic_distribution(p);
        const BreakFit fit = hamilton_filter(f, p, init);
        const double oracle = oracles::hamilton_enumeration(f, p, init);
        worst = std::max(worst, std::abs(fit.loglik - oracle));
    }
    const double secs = elapsed_s(start);
    Outcome out;
    out.pass = worst < 1e-9 && secs < 5.0;
    out.detail = "max |loglik diff| " + fmt(worst) + ", " + fmt(secs) + " s";
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome lemma1_closed_form() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        MixtureLRConfig c;
        c.m = 2.0 * (u01(rng) - 0.5);
        c.s_S2 = 0.05 + 3.0 * u01(rng);
        c.sigma_J2 = 3.0 * u01(rng);
        c.mu_J = 4.0 * (u01(rng) - 0.5);
        c.p = u01(rng);
        const double x = c.m + (12.0 * u01(rng) - 6.0) * std::sqrt(c.s_S2);
        const auto r = mixture_log_ratio(c, x);
        const double ps = std::exp(log_normal_pdf(x, c.m, c.s_S2));
        const double pb = (1.0 - c.p) * ps +
                          c.p * std::exp(log_normal_pdf(x, c.m + c.mu_J, c.s_B2()));
        const double direct = std::log(pb) - std::log(ps);
        worst = std::max(worst, std::abs(r.delta - direct));
    }
    Outcome out;
    out.pass = worst < 1e-12;
    out.detail = "max |delta - direct log ratio| " + fmt(worst) + " over 10^4 points";
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome proposition1() {
    const auto start = std::chrono::steady_clock::now();
    Prop1Config cfg;
    cfg.seed = 7;
    cfg.threads = 4;
    const auto rows = prop1_experiment(cfg);
    const double secs = elapsed_s(start);
    Outcome out;
    out.pass = secs < 30.0;
    std::string fails;
    for (const auto& r : rows) {
        if (!r.pass) {
            out.pass = false;
            fails += " " + r.check;
        }
    }
    out.detail = "10^5 paths, h in {0,1,5,10}, gain grid; " + fmt(secs) + " s" +
                 (fails.empty() ? "" : "; failed:" + fails);
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome proposition2() {
    Prop2Config cfg;
    cfg.seed = 105;
    const auto rows = prop2_experiment(cfg);
    Outcome out;
    out.pass = true;
    for (const auto& r : rows) out.pass = out.pass && r.pass;
    out.detail = "slope grid 10^4, rigidity sign grid 10^3";
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome theorem1_lemma2() {
    Theorem1Config cfg;
    cfg.seed = 106;
    cfg.threads = 4;
    cfg.wedge_reps = 1000;
    const auto rows = theorem1_experiment(cfg);
    Outcome out;
    out.pass = true;
    double worst = 0.0;
    for (const auto& r : rows) {
        if (r.check.find("identity") != std::string::npos ||
            r.check.find("demand") != std::string::npos) {
            out.pass = out.pass && r.pass;
            worst = std::max(worst, r.value);
        }
    }
    out.detail = "max identity violation " + fmt(worst);
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome proposition4_identity() {
    std::mt19937_64 rng(107);
    std::normal_distribution<double> gauss(0.0, 0.3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int series = 0; series < 100; ++series) {
        const int n = 60 + static_cast<int>(u01(rng) * 400);
        std::vector<double> delta(n), prob(n);
        for (int t = 0; t < n; ++t) {
            delta[t] = gauss(rng);
            prob[t] = u01(rng);
        }
        const DecompositionRow r = decompose("s", delta, prob, 0.5);
        if (r.mu1 && r.mu0) {
            worst = std::max(worst,
                             std::abs(r.e_delta - (r.pi * *r.mu1 + (1.0 - r.pi) * *r.mu0)));
        }
    }
    Outcome out;
    out.pass = worst <= 1e-12;
    out.detail = "max decomposition error " + fmt(worst) + " over 100 random panels";
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome corollary41_constructive() {
    std::vector<DecompositionRow> rows;
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> pis;
    for (int i = 0; i < 100; ++i) pis.push_back(u01(rng));
    std::sort(pis.begin(), pis.end());
    const double mu0 = 0.05, gap = 0.2;  // common mu0, constant positive gap
    for (int i = 0; i < 100; ++i) {
        DecompositionRow r;
        r.series_id = "c" + std::to_string(100 + i);
        r.pi = pis[i];
        r.mu0 = mu0;
        r.mu1 = mu0 + gap;
        r.e_delta = r.pi * *r.mu1 + (1.0 - r.pi) * *r.mu0;
        r.ivol = 0.02;
        rows.push_back(r);
    }
    const Corollary41Report rep = corollary41_check(rows, 1e-9);
    Outcome out;
    out.pass = rep.hypotheses_hold && rep.monotonicity_violations == 0 &&
               rep.verdict == "supported";
    out.detail = "violations " + std::to_string(rep.monotonicity_violations) + ", rank corr " +
                 fmt(rep.rank_corr);
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome delta_spikes() {
    DeltaSpikeConfig cfg;
    cfg.seed = 109;
    cfg.threads = 4;
    const auto rows = delta_spike_experiment(cfg);
    Outcome out;
    out.pass = rows[0].pass;
    out.detail = "detection rate " + fmt(rows[0].value) + " (need >= " + fmt(rows[0].bound) + ")";
    return out;
}

// --------------------------------------------------------------- criterion 10
Outcome regression_oracles() {
    std::mt19937_64 rng(110);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = 9;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = gauss(rng);
        y[i] = 0.8 * x[i] + gauss(rng) * (1.0 + 0.3 * std::abs(x[i]));
    }
    DataTable t;
    for (int i = 0; i < n; ++i) {
        t.series.push_back(i < 5 ? "a" : "b");
        t.month.push_back(MonthIndex{2000, 1}.plus(i < 5 ? i : i - 5));
        t.columns["y"].push_back(y[i]);
        t.columns["x"].push_back(x[i]);
    }
    Eigen::MatrixXd xm(n, 2);
    Eigen::VectorXd yv(n);
    for (int i = 0; i < n; ++i) {
        xm(i, 0) = 1.0;
        xm(i, 1) = x[i];
        yv[i] = y[i];
    }

    double worst = 0.0;
    RegressionSpec spec;
    spec.y = "y";
    spec.x = {"x"};

    spec.cov.kind = CovEstimator::HC3;
    const auto hc3 = run_regression(t, spec);
    const auto hc3_oracle = oracles::ols_hc3(xm, yv);
    worst = std::max(worst, std::abs(hc3.at("x").estimate - hc3_oracle.beta[1]));
    worst = std::max(worst, std::abs(hc3.at("x").se - std::sqrt(hc3_oracle.cov(1, 1))));

    spec.cov.kind = CovEstimator::HC0;
    const auto hc0 = run_regression(t, spec);
    const auto hc0_oracle = oracles::ols_hc0(xm, yv);
    worst = std::max(worst, std::abs(hc0.at("x").se - std::sqrt(hc0_oracle.cov(1, 1))));

    spec.cov.kind = CovEstimator::NeweyWest;
    spec.cov.nw_lag = 0;
    const auto nw0 = run_regression(t, spec);
    const bool nw0_exact = nw0.at("x").se == hc0.at("x").se &&
                           nw0.at("const").se == hc0.at("const").se;

    // single ordered series for the lagged NW oracle
    DataTable ts;
    for (int i = 0; i < n; ++i) {
        ts.series.push_back("a");
        ts.month.push_back(MonthIndex{2000, 1}.plus(i));
        ts.columns["y"].push_back(y[i]);
        ts.columns["x"].push_back(x[i]);
    }
    spec.cov.nw_lag = 2;
    const auto nw2 = run_regression(ts, spec);
    const auto nw_oracle = oracles::ols_newey_west(xm, yv, 2);
    worst = std::max(worst, std::abs(nw2.at("x").se - std::sqrt(nw_oracle.cov(1, 1))));

    spec.cov.kind = CovEstimator::ClusterSeries;
    spec.cov.nw_lag = 0;
    const auto cl = run_regression(t, spec);
    std::vector<int> gid(n);
    for (int i = 0; i < n; ++i) gid[i] = i < 5 ? 0 : 1;
    const auto cl_oracle = oracles::ols_cluster(xm, yv, gid, true);
    worst = std::max(worst, std::abs(cl.at("x").se - std::sqrt(cl_oracle.cov(1, 1))));

    Outcome out;
    out.pass = worst < 1e-10 && nw0_exact;
    out.detail = "max |estimator - oracle| " + fmt(worst) +
                 (nw0_exact ? ", NW(0) == HC0 exact" : ", NW(0) != HC0");
    return out;
}

// --------------------------------------------------------------- criterion 11
Outcome hp_filter_checks() {
    std::vector<double> line(60);
    for (int t = 0; t < 60; ++t) line[t] = -1.0 + 0.2 * t;
    const auto cycle = one_sided_hp_detrend(line, 129600.0);
    double worst_line = 0.0;
    for (int t = 3; t < 60; ++t) worst_line = std::max(worst_line, std::abs(cycle[t]));

    std::mt19937_64 rng(111);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> y(150);
    for (auto& v : y) v = gauss(rng);
    const auto full = one_sided_hp_detrend(y, 129600.0);
    bool causal = true;
    for (int cut : {10, 80, 149}) {
        const std::vector<double> prefix(y.begin(), y.begin() + cut);
        const auto part = one_sided_hp_detrend(prefix, 129600.0);
        for (int t = 0; t < cut; ++t) causal = causal && part[t] == full[t];
    }
    Outcome out;
    out.pass = worst_line < 1e-9 && causal;
    out.detail = "max |cycle on line| " + fmt(worst_line) +
                 (causal ? ", prefix recomputation bit-identical" : ", causality violated");
    return out;
}

// --------------------------------------------------------------- criterion 12
struct TableTargets {
    double loglik_stable, loglik_break;
    int n_obs;
};

Outcome ff6_replication() {
    const char* env = std::getenv("MISLEARN_FF6_CSV");
    Outcome out;
    if (env == nullptr || std::string(env).empty()) {
        out.skipped = true;
        out.detail = "set MISLEARN_FF6_CSV to a wide percent CSV with MKT,SMB,HML,RMW,CMA,UMD";
        return out;
    }
    const std::map<std::string, TableTargets> targets = {
        {"MKT", {1255.79, 1314.32, 751}}, {"SMB", {1551.30, 1596.43, 751}},
        {"HML", {1572.75, 1649.15, 751}}, {"RMW", {1787.94, 1943.01, 751}},
        {"CMA", {1842.33, 1915.91, 751}}, {"UMD", {1937.79, 2277.97, 1189}},
    };
    const ReturnPanel panel = load_returns(env, Layout::Wide, Unit::Percent);
    FitOptions opts;
    opts.threads = 4;
    const PanelFitResult fits = fit_panel(panel, opts);

    bool ok = true;
    std::ostringstream detail;
    std::map<std::string, double> dll;
    for (const auto& fit : fits.fits) {
        const auto it = targets.find(fit.id);
        if (it == targets.end()) continue;
        dll[fit.id] = fit.brk.loglik - fit.stable.loglik;
        if (fit.stable.n_obs == it->second.n_obs) {
            const double gap_s = std::abs(fit.stable.loglik - it->second.loglik_stable);
            const double gap_b = std::abs(fit.brk.loglik - it->second.loglik_break);
            if (gap_s > 2.0 || gap_b > 2.0) {
                ok = false;
                detail << fit.id << " loglik gap s=" << fmt(gap_s) << " b=" << fmt(gap_b) << "; ";
            }
        } else {
            detail << fit.id << " N=" << fit.stable.n_obs << " differs from table ("
                   << it->second.n_obs << "), loglik comparison skipped; ";
        }
    }
    if (dll.count("UMD") && dll.count("SMB")) {
        double max_dll = -1e300, min_dll = 1e300;
        std::string max_id, min_id;
        for (const auto& [id, v] : dll) {
            if (v > max_dll) {
                max_dll = v;
                max_id = id;
            }
            if (v < min_dll) {
                min_dll = v;
                min_id = id;
            }
            if (v <= 0.0) ok = false;  // break model must fit better
        }
        if (max_id != "UMD" || min_id != "SMB") {
            ok = false;
            detail << "ordering: max=" << max_id << " min=" << min_id << "; ";
        }
    } else {
        ok = false;
        detail << "missing UMD or SMB in the supplied file; ";
    }
    out.pass = ok;
    out.detail = detail.str().empty() ? "loglik and ordering consistent with the fit tables"
                                      : detail.str();
    return out;
}

// --------------------------------------------------------------- criterion 13
bool trees_identical(const fs::path& a, const fs::path& b, std::string* why) {
    std::vector<fs::path> fa, fb;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
    }
    std::sort(fa.begin(), fa.end());
    std::sort(fb.begin(), fb.end());
    if (fa != fb) {
        *why = "file sets differ";
        return false;
    }
    for (const auto& rel : fa) {
        std::ifstream ia(a / rel, std::ios::binary), ib(b / rel, std::ios::binary);
        std::ostringstream sa, sb;
        sa << ia.rdbuf();
        sb << ib.rdbuf();
        if (sa.str() != sb.str()) {
            *why = "byte difference in " + rel.string();
            return false;
        }
    }
    return true;
}

Outcome determinism() {
    const char* cli = std::getenv("MISLEARN_CLI_BIN");
    Outcome out;
    if (cli == nullptr || std::string(cli).empty()) {
        out.skipped = true;
        out.detail = "set MISLEARN_CLI_BIN to the mislearn binary path";
        return out;
    }
    const fs::path work = fs::temp_directory_path() / "mislearn_determinism";
    fs::remove_all(work);
    fs::create_directories(work);

    // synthetic panel for the fit stage
    ReturnPanel panel;
    for (int s = 0; s < 3; ++s) {
        TrueProcessConfig tp;
        tp.a = 0.4;
        tp.sigma_eta = 0.01;
        tp.sigma_u = 0.03;
        tp.p = 0.02;
        tp.mu_j = 0.05;
        tp.sigma_j = 0.02;
        tp.t_len = 160;
        tp.seed = 500 + s;
        const SimPath path = simulate_true_process(tp);
        for (int t = 0; t < tp.t_len; ++t) {
            panel.add("S" + std::to_string(s), MonthIndex{1990, 1}.plus(t), path.f[t]);
        }
    }
    write_panel(panel, (work / "panel.csv").string());
    {
        std::ofstream cfg(work / "cfg.ini");
        cfg << "seed = 11\n[data]\nreturns = " << (work / "panel.csv").string()
            << "\nlayout = long\nunit = decimal\nmarket_series = S0\n"
            << "[simulate]\nprop1_paths = 2000\ncorollary1_reps_per_size = 200\n"
            << "delta_spike_paths = 100\nwedge_reps = 200\n"
            << "[regress]\noutcomes = sharpe,cumret\nhorizons = 3,12\ninference_sweep = true\n";
    }

    auto run = [&](const std::string& sub, const std::string& dir) {
        const std::string cmd = std::string("\"") + cli + "\" " + sub + " --config " +
                                (work / "cfg.ini").string() + " --out " + (work / dir).string() +
                                " --threads 2 >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    std::string why;
    bool ok = true;
    for (const char* sub_name : {"fit", "simulate", "regress", "xsec"}) {
        const std::string sub(sub_name);
        const int rc1 = run(sub, sub + "_a");
        const int rc2 = run(sub, sub + "_b");
        if (rc1 != rc2 || rc1 != 0) {
            ok = false;
            why = sub + " exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2);
            break;
        }
        if (!trees_identical(work / (sub + "_a"), work / (sub + "_b"), &why)) {
            ok = false;
            why = sub + ": " + why;
            break;
        }
    }
    out.pass = ok;
    out.detail = ok ? "fit and simulate output trees byte-identical across reruns" : why;
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        Outcome (*fn)();
    };
    const std::vector<Criterion> criteria = {
        {1, "Kalman filter matches the joint-Gaussian oracle (T=5, 50 draws, 1e-10)",
         kalman_oracle_equivalence},
        {2, "Hamilton filter matches exhaustive path enumeration (T=10, 50 draws, 1e-9)",
         hamilton_oracle_equivalence},
        {3, "mixture log-ratio closed form equals direct densities (1e-12)", lemma1_closed_form},
        {4, "post-break mean error matches the geometric closed form; gain monotone",
         proposition1},
        {5, "likelihood-gap slopes positive; rigidity condition sign agreement", proposition2},
        {6, "market-clearing and return-decomposition identities hold to 1e-12", theorem1_lemma2},
        {7, "break-state decomposition identity exact on random panels", proposition4_identity},
        {8, "constructive monotonicity under common mu0 and constant positive gap",
         corollary41_constructive},
        {9, "delta spikes after a 4-sigma break in >= 95% of 500 paths", delta_spikes},
        {10, "OLS covariance estimators match direct matrix oracles (1e-10); NW(0) == HC0",
         regression_oracles},
        {11, "one-sided HP: zero cycle on lines, exact prefix causality", hp_filter_checks},
        {12, "FF6 data-conditional replication of the fit tables", ff6_replication},
        {13, "byte-identical output trees across seeded pipeline reruns", determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const char* tag = out.skipped ? "SKIP" : (out.pass ? "PASS" : "FAIL");
        if (!out.pass && !out.skipped) ++failures;
        std::cout << "[" << tag << "] " << c.id << ". " << c.name;
        if (!out.detail.empty()) std::cout << " -- " << out.detail;
        std::cout << "\n";
    }
    std::cout << (failures == 0 ? "acceptance: all criteria satisfied\n"
                                : "acceptance: " + std::to_string(failures) + " failure(s)\n");
    return failures;
}
