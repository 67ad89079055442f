#include "mislearn/panel.hpp"

#include <algorithm>

namespace mislearn {

void ReturnPanel::add(const std::string& series, MonthIndex t, double ret) {
    auto& obs = series_[series];
    auto it = std::lower_bound(obs.begin(), obs.end(), t,
                               [](const Observation& o, MonthIndex m) { return o.t < m; });
    if (it != obs.end() && it->t == t) {
        throw DataError("duplicate observation for (" + series + ", " + t.str() + ")");
    }
    obs.insert(it, Observation{t, ret});
}

void ReturnPanel::set_family(const std::string& series, const std::string& family) {
    family_[series] = family;
}

std::optional<std::string> ReturnPanel::family(const std::string& series) const {
    auto it = family_.find(series);
    if (it == family_.end()) return std::nullopt;
    return it->second;
}

bool ReturnPanel::has_series(const std::string& series) const { return series_.count(series) > 0; }

const std::vector<Observation>& ReturnPanel::observations(const std::string& series) const {
    auto it = series_.find(series);
    if (it == series_.end()) throw DataError("unknown series '" + series + "'");
    return it->second;
}

std::vector<double> ReturnPanel::returns(const std::string& series) const {
    const auto& obs = observations(series);
    std::vector<double> out;
    out.reserve(obs.size());
    for (const auto& o : obs) out.push_back(o.ret);
    return out;
}

std::vector<MonthIndex> ReturnPanel::months(const std::string& series) const {
    const auto& obs = observations(series);
    std::vector<MonthIndex> out;
    out.reserve(obs.size());
    for (const auto& o : obs) out.push_back(o.t);
    return out;
}

std::vector<std::string> ReturnPanel::series_ids() const {
    std::vector<std::string> out;
    out.reserve(series_.size());
    for (const auto& [id, _] : series_) out.push_back(id);
    return out;
}

std::size_t ReturnPanel::n_observations() const {
    std::size_t n = 0;
    for (const auto& [_, obs] : series_) n += obs.size();
    return n;
}

ReturnPanel ReturnPanel::align_common_sample(const std::set<std::string>& series) const {
    for (const auto& id : series) {
        if (!has_series(id)) throw DataError("align_common_sample: series '" + id + "' not present");
    }
    std::set<MonthIndex> common;
    bool first = true;
    for (const auto& id : series) {
        std::set<MonthIndex> mine;
        for (const auto& o : observations(id)) mine.insert(o.t);
        if (first) {
            common = std::move(mine);
            first = false;
        } else {
            std::set<MonthIndex> out;
            std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                                  std::inserter(out, out.begin()));
            common = std::move(out);
        }
    }
    if (common.empty()) throw DataError("align_common_sample: empty common sample");
    ReturnPanel result;
    for (const auto& id : series) {
        for (const auto& o : observations(id)) {
            if (common.count(o.t)) result.add(id, o.t, o.ret);
        }
        if (auto fam = family(id)) result.set_family(id, *fam);
    }
    return result;
}

}  // namespace mislearn
