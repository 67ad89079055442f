#include "mislearn/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace mislearn {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, size_t line_no) {
    const std::string t = trim(field);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw DataError("unparseable number '" + field + "' at line " + std::to_string(line_no));
    }
    return v;
}

MonthIndex parse_month_at(const std::string& field, size_t line_no) {
    try {
        return parse_month(trim(field));
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file '" + path + "'");
    return in;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

ReturnPanel load_returns(const std::string& path, Layout layout, Unit unit) {
    std::ifstream in = open_or_throw(path);
    const double scale = unit == Unit::Percent ? 0.01 : 1.0;

    std::string line;
    if (!std::getline(in, line)) throw DataError("file '" + path + "' is empty (no header row)");
    const auto header = split_csv_line(line);
    if (header.empty()) throw DataError("file '" + path + "' has an empty header row");

    ReturnPanel panel;
    size_t line_no = 1;

    if (layout == Layout::Long) {
        if (header.size() < 3) throw DataError("long layout needs columns series,date,ret");
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto fields = split_csv_line(line);
            if (fields.size() < 3) {
                throw DataError("expected 3 fields at line " + std::to_string(line_no));
            }
            const std::string series = trim(fields[0]);
            const MonthIndex t = parse_month_at(fields[1], line_no);
            const double r = parse_number(fields[2], line_no) * scale;
            try {
                panel.add(series, t, r);
            } catch (const DataError& e) {
                throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
            }
        }
    } else {
        std::vector<std::string> series_names;
        for (size_t j = 1; j < header.size(); ++j) series_names.push_back(trim(header[j]));
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto fields = split_csv_line(line);
            const MonthIndex t = parse_month_at(fields[0], line_no);
            for (size_t j = 1; j < fields.size() && j <= series_names.size(); ++j) {
                if (trim(fields[j]).empty()) continue;  // gap
                const double r = parse_number(fields[j], line_no) * scale;
                try {
                    panel.add(series_names[j - 1], t, r);
                } catch (const DataError& e) {
                    throw DataError(std::string(e.what()) + " at line " + std::to_string(line_no));
                }
            }
        }
    }
    return panel;
}

ExogenousSeries load_exogenous(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("file '" + path + "' is empty (no header row)");
    ExogenousSeries out;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2) throw DataError("expected 2 fields at line " + std::to_string(line_no));
        const MonthIndex t = parse_month_at(fields[0], line_no);
        const double v = parse_number(fields[1], line_no);
        if (out.values.count(t)) {
            throw DataError("duplicate month " + t.str() + " at line " + std::to_string(line_no));
        }
        out.values[t] = v;
    }
    return out;
}

void write_panel(const ReturnPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file '" + path + "'");
    out << "series,date,ret\n";
    for (const auto& id : panel.series_ids()) {
        for (const auto& o : panel.observations(id)) {
            out << id << ',' << o.t.str() << ',' << format_double(o.ret) << '\n';
        }
    }
}

}  // namespace mislearn
