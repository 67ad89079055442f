#include "mislearn/cross_section.hpp"

#include <algorithm>
#include <cmath>

#include "mislearn/errors.hpp"
#include "mislearn/stats.hpp"

namespace mislearn {

DecompositionRow decompose(const std::string& id, std::span<const double> delta,
                           std::span<const double> break_prob, double spike_thresh,
                           double state_threshold) {
    if (delta.size() != break_prob.size() || delta.empty()) {
        throw DataError("decompose: delta and break probability timelines differ");
    }
    const double n = static_cast<double>(delta.size());

    double wsum1 = 0.0, wsum0 = 0.0, wdelta1 = 0.0, wdelta0 = 0.0, dsum = 0.0;
    double hard1 = 0.0, spike_n = 0.0, spike_hard1 = 0.0, spike_hard0 = 0.0, hard0 = 0.0;
    for (size_t t = 0; t < delta.size(); ++t) {
        const double p = break_prob[t];
        wsum1 += p;
        wsum0 += 1.0 - p;
        wdelta1 += p * delta[t];
        wdelta0 += (1.0 - p) * delta[t];
        dsum += delta[t];
        const bool hard = p > state_threshold;
        const bool spike = delta[t] > spike_thresh;
        hard1 += hard ? 1.0 : 0.0;
        hard0 += hard ? 0.0 : 1.0;
        spike_n += spike ? 1.0 : 0.0;
        if (spike && hard) spike_hard1 += 1.0;
        if (spike && !hard) spike_hard0 += 1.0;
    }

    DecompositionRow row;
    row.series_id = id;
    row.pi = wsum1 / n;
    row.pi_hard = hard1 / n;
    row.e_delta = dsum / n;
    row.spike_freq = spike_n / n;
    if (wsum1 > 0.0) row.mu1 = wdelta1 / wsum1;
    if (wsum0 > 0.0) row.mu0 = wdelta0 / wsum0;
    if (hard1 > 0.0) row.q1 = spike_hard1 / hard1;
    if (hard0 > 0.0) row.q0 = spike_hard0 / hard0;
    return row;
}

std::optional<double> compute_ivol(std::span<const Observation> series,
                                   const ReturnPanel& factors,
                                   const std::vector<std::string>& factor_ids) {
    if (factor_ids.size() != 3) throw DataError("compute_ivol: exactly three factor ids expected");

    DataTable table;
    for (const auto& obs : series) {
        bool have_all = true;
        std::array<double, 3> fs{};
        for (size_t j = 0; j < 3; ++j) {
            const auto& fobs = factors.observations(factor_ids[j]);
            auto it = std::lower_bound(fobs.begin(), fobs.end(), obs.t,
                                       [](const Observation& o, MonthIndex m) { return o.t < m; });
            if (it == fobs.end() || it->t != obs.t) {
                have_all = false;
                break;
            }
            fs[j] = it->ret;
        }
        if (!have_all) continue;
        table.series.push_back("anomaly");
        table.month.push_back(obs.t);
        table.columns["y"].push_back(obs.ret);
        for (size_t j = 0; j < 3; ++j) table.columns["f" + std::to_string(j)].push_back(fs[j]);
    }
    if (table.n_rows() < 36) return std::nullopt;

    RegressionSpec spec;
    spec.y = "y";
    spec.x = {"f0", "f1", "f2"};
    spec.cov.kind = CovEstimator::Classic;
    const RegressionResult fit = run_regression(table, spec);

    // residual sample s.d.
    const auto& y = table.column("y");
    std::vector<double> resid(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        double pred = fit.at("const").estimate;
        for (size_t j = 0; j < 3; ++j) {
            pred += fit.at("f" + std::to_string(j)).estimate * table.column("f" + std::to_string(j))[i];
        }
        resid[i] = y[i] - pred;
    }
    return sample_sd(resid);
}

namespace {

RegressionResult univariate_hc3(std::span<const double> y, std::span<const double> x,
                                const std::string& xname) {
    DataTable t;
    for (size_t i = 0; i < y.size(); ++i) {
        t.series.push_back("s" + std::to_string(i));
        t.month.push_back(MonthIndex{2000, 1});
        t.columns["y"].push_back(y[i]);
        t.columns[xname].push_back(x[i]);
    }
    RegressionSpec spec;
    spec.y = "y";
    spec.x = {xname};
    spec.cov.kind = CovEstimator::HC3;
    return run_regression(t, spec);
}

std::vector<DecompositionRow> usable_rows(std::span<const DecompositionRow> rows) {
    std::vector<DecompositionRow> out;
    for (const auto& r : rows) {
        if (!r.degenerate && r.ivol.has_value()) out.push_back(r);
    }
    return out;
}

}  // namespace

std::vector<TertileStats> tertile_analysis(std::span<const DecompositionRow> rows) {
    std::vector<DecompositionRow> usable = usable_rows(rows);
    if (usable.size() < 9) throw DataError("tertile_analysis: need at least 9 usable rows");

    std::stable_sort(usable.begin(), usable.end(), [](const auto& a, const auto& b) {
        if (*a.ivol != *b.ivol) return *a.ivol < *b.ivol;
        return a.series_id < b.series_id;
    });
    const int n = static_cast<int>(usable.size());
    const int k1 = static_cast<int>(std::llround(n / 3.0));
    const int k2 = static_cast<int>(std::llround(2.0 * n / 3.0));

    const std::vector<std::pair<std::string, std::pair<int, int>>> groups = {
        {"Low", {0, k1}}, {"Medium", {k1, k2}}, {"High", {k2, n}}};

    std::vector<TertileStats> out;
    for (const auto& [label, span] : groups) {
        TertileStats ts;
        ts.label = label;
        ts.n = span.second - span.first;
        std::vector<double> pis, eds, spikes, mu1s, mu0s, ivols;
        for (int i = span.first; i < span.second; ++i) {
            const auto& r = usable[i];
            pis.push_back(r.pi);
            eds.push_back(r.e_delta);
            spikes.push_back(r.spike_freq);
            ivols.push_back(*r.ivol);
            if (r.mu1) mu1s.push_back(*r.mu1);
            if (r.mu0) mu0s.push_back(*r.mu0);
        }
        ts.mean_ivol = mean(ivols);
        ts.mean_pi = mean(pis);
        ts.mean_e_delta = mean(eds);
        ts.mean_spike = mean(spikes);
        ts.sd_mu1 = sample_sd(mu1s);
        ts.sd_mu0 = sample_sd(mu0s);
        ts.sd_e_delta = sample_sd(eds);
        ts.e_delta_on_pi = univariate_hc3(eds, pis, "pi");
        ts.spike_on_pi = univariate_hc3(spikes, pis, "pi");
        out.push_back(std::move(ts));
    }
    return out;
}

std::vector<XsecModel> xsec_regressions(std::span<const DecompositionRow> rows) {
    std::vector<DecompositionRow> usable = usable_rows(rows);
    if (usable.size() < 10) throw DataError("xsec_regressions: need at least 10 usable rows");

    const size_t n = usable.size();
    std::vector<double> mu1(n), pi(n), pi2(n), ed(n), spike(n), ivol(n);
    for (size_t i = 0; i < n; ++i) {
        mu1[i] = usable[i].mu1.value_or(std::numeric_limits<double>::quiet_NaN());
        pi[i] = usable[i].pi;
        pi2[i] = pi[i] * pi[i];
        ed[i] = usable[i].e_delta;
        spike[i] = usable[i].spike_freq;
        ivol[i] = *usable[i].ivol;
    }
    // standardized IVOL, as the reduced-form tables use
    const double im = mean(ivol), isd = sample_sd(ivol);
    std::vector<double> ivol_z(n);
    for (size_t i = 0; i < n; ++i) ivol_z[i] = isd > 0.0 ? (ivol[i] - im) / isd : 0.0;

    DataTable t;
    for (size_t i = 0; i < n; ++i) {
        t.series.push_back(usable[i].series_id);
        t.month.push_back(MonthIndex{2000, 1});
        t.columns["mu1"].push_back(mu1[i]);
        t.columns["pi"].push_back(pi[i]);
        t.columns["pi2"].push_back(pi2[i]);
        t.columns["e_delta"].push_back(ed[i]);
        t.columns["spike_freq"].push_back(spike[i]);
        t.columns["ivol_z"].push_back(ivol_z[i]);
    }

    auto model = [&](const std::string& name, const std::string& y,
                     const std::vector<std::string>& xs) {
        RegressionSpec spec;
        spec.y = y;
        spec.x = xs;
        spec.cov.kind = CovEstimator::HC3;
        return XsecModel{name, run_regression(t, spec)};
    };

    return {
        model("mu1~ivol_z", "mu1", {"ivol_z"}),
        model("pi~ivol_z", "pi", {"ivol_z"}),
        model("mu1~pi", "mu1", {"pi"}),
        model("e_delta~pi", "e_delta", {"pi"}),
        model("e_delta~pi+pi2", "e_delta", {"pi", "pi2"}),
        model("spike~pi", "spike_freq", {"pi"}),
        model("spike~pi+pi2", "spike_freq", {"pi", "pi2"}),
    };
}

Corollary41Report corollary41_check(std::span<const DecompositionRow> rows,
                                    double common_mu0_tolerance) {
    Corollary41Report rep;
    std::vector<const DecompositionRow*> usable;
    for (const auto& r : rows) {
        if (r.mu0 && r.mu1 && !r.degenerate) usable.push_back(&r);
    }
    rep.n = static_cast<int>(usable.size());
    if (rep.n == 0) {
        rep.verdict = "no-usable-rows";
        return rep;
    }

    std::sort(usable.begin(), usable.end(), [](const auto* a, const auto* b) {
        if (a->pi != b->pi) return a->pi < b->pi;
        return a->series_id < b->series_id;
    });

    std::vector<double> mu0s, gaps, pis, eds;
    for (const auto* r : usable) {
        mu0s.push_back(*r->mu0);
        gaps.push_back(*r->mu1 - *r->mu0);
        pis.push_back(r->pi);
        eds.push_back(r->e_delta);
    }
    const auto [mn0, mx0] = std::minmax_element(mu0s.begin(), mu0s.end());
    rep.max_mu0_spread = *mx0 - *mn0;
    rep.min_gap = *std::min_element(gaps.begin(), gaps.end());

    bool gaps_nondecreasing = true;
    for (size_t i = 0; i + 1 < gaps.size(); ++i) {
        if (gaps[i + 1] < gaps[i] - common_mu0_tolerance) gaps_nondecreasing = false;
    }
    rep.hypotheses_hold = rep.max_mu0_spread <= common_mu0_tolerance &&
                          rep.min_gap >= -common_mu0_tolerance && gaps_nondecreasing;

    for (size_t i = 0; i + 1 < eds.size(); ++i) {
        if (eds[i + 1] < eds[i] - 1e-12) ++rep.monotonicity_violations;
    }
    rep.rank_corr = spearman(pis, eds);

    if (!rep.hypotheses_hold) {
        rep.verdict = "hypotheses-violated";
    } else if (rep.monotonicity_violations == 0) {
        rep.verdict = "supported";
    } else {
        rep.verdict = "violated-within-hypotheses";
    }
    return rep;
}

RankTable rank_diagnostic(std::span<const DecompositionRow> rows,
                          const std::vector<std::pair<std::string, std::vector<double>>>& metrics) {
    if (rows.size() < 3) throw DataError("rank_diagnostic: need at least 3 rows");
    RankTable out;
    for (const auto& r : rows) out.series.push_back(r.series_id);
    for (const auto& [name, values] : metrics) {
        if (values.size() != rows.size()) {
            throw DataError("rank_diagnostic: metric '" + name + "' has the wrong length");
        }
        out.metrics.push_back(name);
        out.ranks.push_back(ranks_desc(values));
    }
    return out;
}

}  // namespace mislearn
