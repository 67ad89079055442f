#include "mislearn/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mislearn/errors.hpp"

namespace mislearn {

std::vector<double>& DataTable::column(const std::string& name) {
    auto it = columns.find(name);
    if (it == columns.end()) throw DataError("unknown column '" + name + "'");
    return it->second;
}

const std::vector<double>& DataTable::column(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw DataError("unknown column '" + name + "'");
    return it->second;
}

const Coefficient& RegressionResult::at(const std::string& name) const {
    for (const auto& c : coef) {
        if (c.name == name) return c;
    }
    throw DataError("no coefficient named '" + name + "'");
}

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
    const int kMaxIter = 300;
    const double kEps = 3e-16, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, double dof) {
    if (dof <= 0.0) return 1.0;
    return reg_inc_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

namespace {

struct Design {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> names;
    std::vector<int> rows;              // indices into the DataTable
    int absorbed_dof = 0;               // levels used up by fixed effects
    double y_mean_removed = 0.0;        // for centered R^2 bookkeeping
    bool centered = false;
};

std::vector<int> group_codes(const std::vector<std::string>& keys, const std::vector<int>& rows,
                             int* n_groups) {
    std::map<std::string, int> index;
    std::vector<int> codes(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto [it, _] = index.try_emplace(keys[rows[i]], static_cast<int>(index.size()));
        codes[i] = it->second;
    }
    *n_groups = static_cast<int>(index.size());
    return codes;
}

std::vector<int> month_codes(const std::vector<MonthIndex>& months, const std::vector<int>& rows,
                             int* n_groups) {
    std::map<int, int> index;
    std::vector<int> codes(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto [it, _] =
            index.try_emplace(months[rows[i]].serial(), static_cast<int>(index.size()));
        codes[i] = it->second;
    }
    *n_groups = static_cast<int>(index.size());
    return codes;
}

void demean_by(Eigen::VectorXd& v, const std::vector<int>& codes, int n_groups) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n_groups);
    Eigen::VectorXd cnt = Eigen::VectorXd::Zero(n_groups);
    for (int i = 0; i < v.size(); ++i) {
        sum[codes[i]] += v[i];
        cnt[codes[i]] += 1.0;
    }
    for (int i = 0; i < v.size(); ++i) v[i] -= sum[codes[i]] / cnt[codes[i]];
}

Design build_design(const DataTable& data, const RegressionSpec& spec) {
    const auto& yc = data.column(spec.y);
    std::vector<const std::vector<double>*> xs;
    for (const auto& name : spec.x) xs.push_back(&data.column(name));

    Design d;
    for (size_t i = 0; i < data.n_rows(); ++i) {
        bool ok = std::isfinite(yc[i]);
        for (const auto* col : xs) ok = ok && std::isfinite((*col)[i]);
        if (ok) d.rows.push_back(static_cast<int>(i));
    }
    const int n = static_cast<int>(d.rows.size());
    if (n == 0) throw DataError("run_regression: no complete observations");

    const bool demean = spec.fe_series || spec.fe_month;
    const bool with_intercept = spec.intercept && !demean;
    const int k = static_cast<int>(spec.x.size()) + (with_intercept ? 1 : 0);

    d.x.resize(n, k);
    d.y.resize(n);
    int col = 0;
    if (with_intercept) {
        d.x.col(col).setOnes();
        d.names.push_back("const");
        ++col;
    }
    for (size_t j = 0; j < xs.size(); ++j) {
        for (int i = 0; i < n; ++i) d.x(i, col) = (*xs[j])[d.rows[i]];
        d.names.push_back(spec.x[j]);
        ++col;
    }
    for (int i = 0; i < n; ++i) d.y[i] = yc[d.rows[i]];

    if (demean) {
        int gs = 0, gm = 0;
        std::vector<int> cs, cm;
        if (spec.fe_series) cs = group_codes(data.series, d.rows, &gs);
        if (spec.fe_month) cm = month_codes(data.month, d.rows, &gm);
        // alternating projections; one-way converges in a single pass
        for (int it = 0; it < 200; ++it) {
            double change = 0.0;
            for (int pass = 0; pass < 2; ++pass) {
                const bool series_pass = pass == 0;
                if (series_pass && !spec.fe_series) continue;
                if (!series_pass && !spec.fe_month) continue;
                const auto& codes = series_pass ? cs : cm;
                const int ng = series_pass ? gs : gm;
                Eigen::VectorXd before = d.y;
                demean_by(d.y, codes, ng);
                change = std::max(change, (d.y - before).cwiseAbs().maxCoeff());
                for (int j = 0; j < d.x.cols(); ++j) {
                    Eigen::VectorXd v = d.x.col(j);
                    before = v;
                    demean_by(v, codes, ng);
                    d.x.col(j) = v;
                    change = std::max(change, (v - before).cwiseAbs().maxCoeff());
                }
            }
            if (change < 1e-12) break;
        }
        d.absorbed_dof = (spec.fe_series ? gs : 0) + (spec.fe_month ? gm : 0) -
                         (spec.fe_series && spec.fe_month ? 1 : 0);
        d.centered = true;
    } else {
        d.centered = spec.intercept;
    }
    return d;
}

Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd& x, const Eigen::VectorXd& e,
                             const std::vector<int>& codes, int n_groups) {
    const int k = static_cast<int>(x.cols());
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n_groups, k);
    for (int i = 0; i < x.rows(); ++i) scores.row(codes[i]) += e[i] * x.row(i);
    return scores.transpose() * scores;
}

double cr1(int n_groups, int n, int k) {
    return (static_cast<double>(n_groups) / (n_groups - 1.0)) *
           ((n - 1.0) / static_cast<double>(n - k));
}

}  // namespace

RegressionResult run_regression(const DataTable& data, const RegressionSpec& spec) {
    Design d = build_design(data, spec);
    const int n = static_cast<int>(d.x.rows());
    const int k = static_cast<int>(d.x.cols());
    const int k_total = k + d.absorbed_dof;
    if (n <= k_total) throw DataError("run_regression: n_obs must exceed the parameter count");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        const auto& perm = qr.colsPermutation().indices();
        std::string names;
        for (int j = qr.rank(); j < k; ++j) {
            if (!names.empty()) names += ", ";
            names += d.names[perm[j]];
        }
        throw DataError("run_regression: rank-deficient design, collinear column(s): " + names);
    }

    const Eigen::VectorXd beta = qr.solve(d.y);
    const Eigen::VectorXd resid = d.y - d.x * beta;
    const Eigen::MatrixXd bread = (d.x.transpose() * d.x).inverse();

    const double dof_resid = static_cast<double>(n - k_total);
    Eigen::MatrixXd cov(k, k);
    double infer_dof = dof_resid;  // t reference unless overridden below
    bool use_normal = false;

    switch (spec.cov.kind) {
        case CovEstimator::Classic: {
            const double s2 = resid.squaredNorm() / dof_resid;
            cov = s2 * bread;
            break;
        }
        case CovEstimator::HC0: {
            Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < n; ++i) {
                meat.noalias() += resid[i] * resid[i] * d.x.row(i).transpose() * d.x.row(i);
            }
            cov = bread * meat * bread;
            break;
        }
        case CovEstimator::HC3: {
            Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < n; ++i) {
                const double h = d.x.row(i) * bread * d.x.row(i).transpose();
                const double w = resid[i] / (1.0 - h);
                meat.noalias() += w * w * d.x.row(i).transpose() * d.x.row(i);
            }
            cov = bread * meat * bread;
            break;
        }
        case CovEstimator::NeweyWest: {
            const int lag = spec.cov.nw_lag;
            if (lag < 0) throw DataError("run_regression: Newey-West lag must be >= 0");
            Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < n; ++i) {
                meat.noalias() += resid[i] * resid[i] * d.x.row(i).transpose() * d.x.row(i);
            }
            if (lag > 0) {
                // within-series pairs weighted by Bartlett kernel on the
                // calendar-month distance
                std::vector<int> order(n);
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    const int ra = d.rows[a], rb = d.rows[b];
                    if (data.series[ra] != data.series[rb]) return data.series[ra] < data.series[rb];
                    return data.month[ra].serial() < data.month[rb].serial();
                });
                for (int ii = 0; ii < n; ++ii) {
                    const int i = order[ii];
                    for (int jj = ii - 1; jj >= 0; --jj) {
                        const int j = order[jj];
                        if (data.series[d.rows[i]] != data.series[d.rows[j]]) break;
                        const int dist = data.month[d.rows[i]].serial() -
                                         data.month[d.rows[j]].serial();
                        if (dist > lag) break;
                        const double w = 1.0 - static_cast<double>(dist) / (lag + 1.0);
                        const Eigen::MatrixXd s =
                            resid[i] * resid[j] * d.x.row(i).transpose() * d.x.row(j);
                        meat.noalias() += w * (s + s.transpose());
                    }
                }
            }
            cov = bread * meat * bread;
            break;
        }
        case CovEstimator::ClusterTime:
        case CovEstimator::ClusterSeries: {
            int ng = 0;
            std::vector<int> codes;
            if (spec.cov.kind == CovEstimator::ClusterTime) {
                codes = month_codes(data.month, d.rows, &ng);
            } else {
                codes = group_codes(data.series, d.rows, &ng);
            }
            if (ng < 2) throw DataError("run_regression: fewer than 2 clusters");
            Eigen::MatrixXd meat = cluster_meat(d.x, resid, codes, ng);
            if (spec.cov.small_sample_correction) meat *= cr1(ng, n, k_total);
            cov = bread * meat * bread;
            infer_dof = ng - 1;
            break;
        }
        case CovEstimator::ClusterTwoWay: {
            int ng_s = 0, ng_t = 0, ng_i = 0;
            const auto cs = group_codes(data.series, d.rows, &ng_s);
            const auto ct = month_codes(data.month, d.rows, &ng_t);
            if (ng_s < 2 || ng_t < 2) throw DataError("run_regression: fewer than 2 clusters");
            std::vector<std::string> inter_keys(data.n_rows());
            for (int idx : d.rows) {
                inter_keys[idx] = data.series[idx] + "\x1f" + std::to_string(data.month[idx].serial());
            }
            const auto ci = group_codes(inter_keys, d.rows, &ng_i);
            Eigen::MatrixXd meat_s = cluster_meat(d.x, resid, cs, ng_s);
            Eigen::MatrixXd meat_t = cluster_meat(d.x, resid, ct, ng_t);
            Eigen::MatrixXd meat_i = cluster_meat(d.x, resid, ci, ng_i);
            if (spec.cov.small_sample_correction) {
                meat_s *= cr1(ng_s, n, k_total);
                meat_t *= cr1(ng_t, n, k_total);
                meat_i *= cr1(ng_i, n, k_total);
            }
            cov = bread * (meat_s + meat_t - meat_i) * bread;
            use_normal = true;
            break;
        }
    }

    RegressionResult res;
    res.n_obs = n;
    res.dof_used = k_total;
    for (int j = 0; j < k; ++j) {
        Coefficient c;
        c.name = d.names[j];
        c.estimate = beta[j];
        const double v = cov(j, j);
        c.se = v > 0.0 ? std::sqrt(v) : 0.0;
        if (c.se > 0.0) {
            c.t = c.estimate / c.se;
            c.p = use_normal ? normal_two_sided_p(c.t) : student_t_two_sided_p(c.t, infer_dof);
        } else {
            c.t = 0.0;
            c.p = c.estimate == 0.0 ? 1.0 : 0.0;
        }
        res.coef.push_back(std::move(c));
    }

    double sst;
    if (d.centered) {
        const double ym = d.y.mean();
        sst = (d.y.array() - ym).square().sum();
    } else {
        sst = d.y.squaredNorm();
    }
    res.r_squared = sst > 0.0 ? std::max(0.0, 1.0 - resid.squaredNorm() / sst) : 0.0;
    return res;
}

LeaveOneYearOut leave_one_year_out(const DataTable& data, const RegressionSpec& spec,
                                   const std::string& coef_name) {
    std::set<int> years;
    for (const auto& m : data.month) years.insert(m.year);
    if (years.size() < 2) throw DataError("leave_one_year_out: need at least 2 calendar years");

    LeaveOneYearOut out;
    for (int y : years) {
        DataTable subset;
        for (size_t i = 0; i < data.n_rows(); ++i) {
            if (data.month[i].year == y) continue;
            subset.series.push_back(data.series[i]);
            subset.month.push_back(data.month[i]);
        }
        for (const auto& [name, col] : data.columns) {
            auto& dst = subset.columns[name];
            dst.reserve(subset.n_rows());
            for (size_t i = 0; i < data.n_rows(); ++i) {
                if (data.month[i].year == y) continue;
                dst.push_back(col[i]);
            }
        }
        try {
            const RegressionResult r = run_regression(subset, spec);
            out.coef_by_year[y] = r.at(coef_name).estimate;
        } catch (const DataError&) {
            out.skipped.push_back(y);
        }
    }
    return out;
}

}  // namespace mislearn
