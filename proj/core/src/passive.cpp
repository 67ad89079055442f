#include "mislearn/passive.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "mislearn/errors.hpp"

namespace mislearn {

int merge_lagged_exogenous(DataTable& table, const ExogenousSeries& passive,
                           const std::string& column, std::vector<MonthIndex>* missing) {
    auto& col = table.columns[column];
    col.assign(table.n_rows(), std::numeric_limits<double>::quiet_NaN());
    std::set<MonthIndex> missed;
    for (size_t i = 0; i < table.n_rows(); ++i) {
        const MonthIndex lag = table.month[i].prev();
        if (auto v = passive.at(lag)) {
            col[i] = *v;
        } else {
            missed.insert(table.month[i]);
        }
    }
    if (missing) missing->assign(missed.begin(), missed.end());
    return static_cast<int>(missed.size());
}

PassiveSuiteResult passive_interaction_suite(DataTable table, const ExogenousSeries& passive,
                                             PassiveVariant variant, PassiveFe fe,
                                             const std::string& outcome_column,
                                             const std::vector<std::string>& controls,
                                             const CovSpec& cov) {
    PassiveSuiteResult out;
    out.dropped_missing_passive =
        merge_lagged_exogenous(table, passive, "passive_lag", &out.missing_months);

    const std::string main_effect = variant == PassiveVariant::Onset ? "break_state" : "delta";
    if (!table.has_column(main_effect)) {
        throw DataError("passive_interaction_suite: table lacks column '" + main_effect + "'");
    }
    out.interaction_name = main_effect + "_x_passive_lag";
    auto& inter = table.columns[out.interaction_name];
    const auto& base = table.column(main_effect);
    const auto& plag = table.column("passive_lag");
    inter.resize(table.n_rows());
    for (size_t i = 0; i < table.n_rows(); ++i) inter[i] = base[i] * plag[i];

    RegressionSpec spec;
    spec.y = variant == PassiveVariant::Onset ? "delta" : outcome_column;
    spec.x.push_back(variant == PassiveVariant::Onset ? "break_state" : "delta");
    // with month FE the passive level is absorbed; keep the interaction only
    if (fe != PassiveFe::SeriesAndMonth) spec.x.push_back("passive_lag");
    spec.x.push_back(out.interaction_name);
    if (variant == PassiveVariant::Outcome) {
        for (const auto& c : controls) spec.x.push_back(c);
    }
    spec.fe_series = true;
    spec.fe_month = fe == PassiveFe::SeriesAndMonth;
    spec.cov = cov;

    out.regression = run_regression(table, spec);
    return out;
}

}  // namespace mislearn
