#pragma once

#include <string>
#include <vector>

#include "mislearn/panel.hpp"

namespace mislearn {

enum class Layout { Wide, Long };
enum class Unit { Percent, Decimal };

// Comma-delimited UTF-8 with a header row.
//   long layout:  series,date,ret
//   wide layout:  date,<series1>,<series2>,...
// Dates parse as YYYYMM or YYYY-MM. Percent inputs are divided by 100.
// Empty wide-layout cells are treated as missing months.
ReturnPanel load_returns(const std::string& path, Layout layout, Unit unit);

// Layout: date,value
ExogenousSeries load_exogenous(const std::string& path);

// Long-format writer; load_returns(write_panel(p)) reproduces the observation
// multiset exactly.
void write_panel(const ReturnPanel& panel, const std::string& path);

// Shared CSV plumbing used by the writers in the pipeline.
std::vector<std::string> split_csv_line(const std::string& line);
std::string format_double(double v);

}  // namespace mislearn
