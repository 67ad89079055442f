#include "mislearn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mislearn/errors.hpp"

namespace mislearn {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const ObjectiveFn& f, const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

SimplexResult simplex_once(const ObjectiveFn& f, const std::vector<double>& x0, double step,
                           const SimplexOptions& opts) {
    const int n = static_cast<int>(x0.size());
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (int i = 0; i < n; ++i) {
        pts[i + 1][i] += (x0[i] != 0.0 ? step * std::abs(x0[i]) : step);
    }
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) fv[i] = safe_eval(f, pts[i]);

    const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;
    std::vector<int> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    SimplexResult res;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];

        const double spread = std::abs(fv[worst] - fv[best]);
        const double scale = std::abs(fv[best]) + std::abs(fv[worst]) + 1e-300;
        if (spread <= opts.rel_tol * scale) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (int j = 0; j < n; ++j) centroid[j] /= n;

        for (int j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - pts[worst][j]);
        const double fr = safe_eval(f, xr);

        if (fr < fv[best]) {
            for (int j = 0; j < n; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            const double fe = safe_eval(f, xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto& anchor = outside ? xr : pts[worst];
            for (int j = 0; j < n; ++j) xc[j] = centroid[j] + beta * (anchor[j] - centroid[j]);
            const double fc = safe_eval(f, xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward best
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int j = 0; j < n; ++j) {
                        pts[i][j] = pts[best][j] + delta * (pts[i][j] - pts[best][j]);
                    }
                    fv[i] = safe_eval(f, pts[i]);
                }
            }
        }
    }

    const auto it_best = std::min_element(fv.begin(), fv.end());
    res.x = pts[static_cast<size_t>(it_best - fv.begin())];
    res.fmin = *it_best;
    res.iterations = it;
    return res;
}

}  // namespace

SimplexResult nelder_mead(const ObjectiveFn& f, const std::vector<double>& x0,
                          const SimplexOptions& opts) {
    SimplexResult best = simplex_once(f, x0, opts.initial_step, opts);
    double step = opts.initial_step;
    for (int r = 0; r < opts.restarts; ++r) {
        step *= 0.25;
        SimplexResult next = simplex_once(f, best.x, step, opts);
        next.iterations += best.iterations;
        if (next.fmin <= best.fmin) {
            best = next;
        } else {
            best.iterations = next.iterations;
        }
    }
    return best;
}

SimplexResult multi_start_minimize(const ObjectiveFn& f,
                                   const std::vector<std::vector<double>>& starts,
                                   const SimplexOptions& opts) {
    if (starts.empty()) throw std::invalid_argument("multi_start_minimize: no starts");
    bool any_converged = false;
    SimplexResult best;
    best.fmin = kInf;
    for (const auto& s : starts) {
        SimplexResult r = nelder_mead(f, s, opts);
        any_converged = any_converged || r.converged;
        if (best.x.empty() || r.fmin < best.fmin) best = r;
    }
    if (!any_converged) {
        throw EstimationError("optimizer failed to converge from every start", best.x, best.fmin);
    }
    return best;
}

std::vector<double> numerical_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                       double h) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x, xm = x;
    for (size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

}  // namespace mislearn
