#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "mislearn/errors.hpp"

namespace mislearn {

// Monthly calendar index. Arithmetic is in whole months.
struct MonthIndex {
    int year = 0;
    int month = 1;  // 1..12

    auto operator<=>(const MonthIndex&) const = default;

    int serial() const { return year * 12 + (month - 1); }

    static MonthIndex from_serial(int s) {
        int y = s / 12;
        int m = s % 12;
        if (m < 0) {
            m += 12;
            y -= 1;
        }
        return MonthIndex{y, m + 1};
    }

    MonthIndex next() const { return from_serial(serial() + 1); }
    MonthIndex prev() const { return from_serial(serial() - 1); }
    MonthIndex plus(int months) const { return from_serial(serial() + months); }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }
};

// Whole months from a to b (b - a).
inline int months_between(MonthIndex a, MonthIndex b) { return b.serial() - a.serial(); }

// Accepts YYYYMM and YYYY-MM only.
inline MonthIndex parse_month(const std::string& s) {
    int y = 0, m = 0;
    bool ok = false;
    if (s.size() == 6) {
        ok = std::sscanf(s.c_str(), "%4d%2d", &y, &m) == 2;
    } else if (s.size() == 7 && s[4] == '-') {
        ok = std::sscanf(s.c_str(), "%4d-%2d", &y, &m) == 2;
    }
    if (!ok || m < 1 || m > 12) {
        throw DataError("unparseable date '" + s + "' (expected YYYYMM or YYYY-MM)");
    }
    return MonthIndex{y, m};
}

}  // namespace mislearn
