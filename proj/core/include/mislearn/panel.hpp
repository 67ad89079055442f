#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mislearn/calendar.hpp"

namespace mislearn {

struct Observation {
    MonthIndex t;
    double ret = 0.0;  // decimal units: 0.01 == 1%
};

// Long-format monthly return panel. Per-series observations are kept sorted by
// month; gaps are represented by absent keys, never by sentinel values.
class ReturnPanel {
public:
    // Throws DataError on a duplicate (series, t) key.
    void add(const std::string& series, MonthIndex t, double ret);

    void set_family(const std::string& series, const std::string& family);
    std::optional<std::string> family(const std::string& series) const;

    bool has_series(const std::string& series) const;
    const std::vector<Observation>& observations(const std::string& series) const;
    std::vector<double> returns(const std::string& series) const;
    std::vector<MonthIndex> months(const std::string& series) const;

    std::vector<std::string> series_ids() const;
    std::size_t n_series() const { return series_.size(); }
    std::size_t n_observations() const;
    bool empty() const { return series_.empty(); }

    // Restricts the requested series to the months where every one of them has
    // an observation. Throws DataError if a series is missing or the
    // intersection is empty.
    ReturnPanel align_common_sample(const std::set<std::string>& series) const;

private:
    std::map<std::string, std::vector<Observation>> series_;
    std::map<std::string, std::string> family_;
};

// Single-valued monthly series (e.g. a passive ownership share).
struct ExogenousSeries {
    std::map<MonthIndex, double> values;

    std::optional<double> at(MonthIndex t) const {
        auto it = values.find(t);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
};

}  // namespace mislearn
