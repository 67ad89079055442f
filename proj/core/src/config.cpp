#include "mislearn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mislearn/errors.hpp"

namespace mislearn {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header at line " + std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            cfg.data_[section];  // register even if empty
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value at line " + std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
        if (cfg.data_[section].count(key)) {
            throw ConfigError("duplicate key '" + key + "' at line " + std::to_string(line_no));
        }
        cfg.data_[section][key] = value;
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

std::string KeyValueConfig::get_str(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
    auto it = data_.find(section);
    if (it == data_.end()) return fallback;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? fallback : jt->second;
}

std::string KeyValueConfig::require_str(const std::string& section, const std::string& key) const {
    if (!has(section, key)) {
        throw ConfigError("missing required config key '" + section + "." + key + "'");
    }
    return get_str(section, key, "");
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key,
                                  double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        throw ConfigError("config key '" + section + "." + key + "' is not a number: '" + v + "'");
    }
    return d;
}

int KeyValueConfig::get_int(const std::string& section, const std::string& key,
                            int fallback) const {
    const double d = get_double(section, key, static_cast<double>(fallback));
    return static_cast<int>(d);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& section, const std::string& key,
                                      std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    char* end = nullptr;
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        throw ConfigError("config key '" + section + "." + key + "' is not an integer: '" + v + "'");
    }
    return u;
}

bool KeyValueConfig::get_bool(const std::string& section, const std::string& key,
                              bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + section + "." + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& section,
                                                  const std::string& key) const {
    std::vector<std::string> out;
    const std::string v = get_str(section, key, "");
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            const std::string item = trim(cur);
            if (!item.empty()) out.push_back(item);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    const std::string item = trim(cur);
    if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& section,
                                              const std::string& key) const {
    std::vector<int> out;
    for (const auto& s : get_list(section, key)) {
        char* end = nullptr;
        const long v = std::strtol(s.c_str(), &end, 10);
        if (end != s.c_str() + s.size()) {
            throw ConfigError("config key '" + section + "." + key + "' has a non-integer item '" +
                              s + "'");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void KeyValueConfig::validate(const std::string& section,
                              const std::set<std::string>& allowed) const {
    auto it = data_.find(section);
    if (it == data_.end()) return;
    for (const auto& [key, _] : it->second) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key '" + key + "' in section [" + section + "]");
        }
    }
}

void KeyValueConfig::validate_sections(const std::set<std::string>& allowed) const {
    for (const auto& [section, _] : data_) {
        if (!section.empty() && !allowed.count(section)) {
            throw ConfigError("unknown config section [" + section + "]");
        }
    }
}

std::vector<std::string> KeyValueConfig::sections() const {
    std::vector<std::string> out;
    for (const auto& [section, _] : data_) out.push_back(section);
    return out;
}

}  // namespace mislearn
