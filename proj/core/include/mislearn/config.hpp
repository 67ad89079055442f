#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mislearn {

// Plain-text key-value configuration with [section] headers, '#' comments,
// and comma-separated lists. Unknown keys are rejected by validate().
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    std::string require_str(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key) const;

    // Throws ConfigError naming the first key in `section` outside `allowed`.
    void validate(const std::string& section, const std::set<std::string>& allowed) const;
    // Throws ConfigError naming the first section outside `allowed`.
    void validate_sections(const std::set<std::string>& allowed) const;

    std::vector<std::string> sections() const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

}  // namespace mislearn
